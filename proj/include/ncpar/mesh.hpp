#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ncpar/domain.hpp"
#include "ncpar/errors.hpp"

namespace ncpar {

enum class FacetTag { S, Robin };

/// Boundary facet: a point in 1D, a segment in 2D.
struct Facet {
  std::array<std::size_t, 2> nodes{};
  int node_count = 1;
  Point normal = Point::Zero();  // outward unit normal
  double measure = 1.0;          // counting measure for points
  Point midpoint = Point::Zero();
  FacetTag tag = FacetTag::Robin;
};

/// Conforming simplicial mesh (segments in 1D, triangles in 2D).
struct Mesh {
  int dim = 1;
  std::vector<Point> nodes;
  std::vector<std::array<std::size_t, 3>> elements;  // third entry unused in 1D
  std::vector<Facet> facets;

  int nodes_per_element() const { return dim + 1; }
  std::size_t num_nodes() const { return nodes.size(); }
  std::size_t num_elements() const { return elements.size(); }

  /// Signed length / area of element e.
  double element_measure(std::size_t e) const {
    const auto& el = elements[e];
    if (dim == 1) return nodes[el[1]].x() - nodes[el[0]].x();
    const Point a = nodes[el[1]] - nodes[el[0]];
    const Point b = nodes[el[2]] - nodes[el[0]];
    return 0.5 * (a.x() * b.y() - a.y() * b.x());
  }

  /// Nodes lying on the closure of S: endpoints of every facet tagged S.
  std::vector<bool> constrained_mask() const {
    std::vector<bool> mask(nodes.size(), false);
    for (const Facet& f : facets) {
      if (f.tag != FacetTag::S) continue;
      for (int k = 0; k < f.node_count; ++k) mask[f.nodes[static_cast<std::size_t>(k)]] = true;
    }
    return mask;
  }

  /// Perimeter of the discrete boundary (number of boundary points in 1D).
  double boundary_measure() const {
    double s = 0.0;
    for (const Facet& f : facets) s += f.measure;
    return s;
  }

  /// Throws InvalidDomain if the mesh breaks conformity, orientation, or
  /// facet-tagging invariants.
  void check() const {
    for (std::size_t e = 0; e < elements.size(); ++e) {
      if (!(element_measure(e) > 0.0)) {
        throw Error(ErrorCode::InvalidDomain, "discretization",
                    "element " + std::to_string(e) + " has nonpositive measure");
      }
    }
    for (const Facet& f : facets) {
      if (std::abs(f.normal.norm() - 1.0) > 1e-12)
        throw Error(ErrorCode::InvalidDomain, "discretization", "facet normal is not unit");
    }
    if (dim == 1) {
      std::vector<int> count(nodes.size(), 0);
      for (const auto& el : elements) {
        ++count[el[0]];
        ++count[el[1]];
      }
      std::size_t ends = 0;
      for (std::size_t i = 0; i < nodes.size(); ++i)
        if (count[i] == 1) ++ends;
      if (ends != facets.size())
        throw Error(ErrorCode::InvalidDomain, "discretization", "facet count mismatch");
      return;
    }
    std::map<std::pair<std::size_t, std::size_t>, int> edges;
    for (const auto& el : elements) {
      for (int k = 0; k < 3; ++k) {
        std::size_t a = el[static_cast<std::size_t>(k)];
        std::size_t b = el[static_cast<std::size_t>((k + 1) % 3)];
        if (a > b) std::swap(a, b);
        ++edges[{a, b}];
      }
    }
    std::map<std::pair<std::size_t, std::size_t>, int> tagged;
    for (const Facet& f : facets) {
      auto key = std::minmax(f.nodes[0], f.nodes[1]);
      ++tagged[{key.first, key.second}];
    }
    for (const auto& [edge, uses] : edges) {
      if (uses > 2)
        throw Error(ErrorCode::InvalidDomain, "discretization", "edge shared by >2 elements");
      const auto it = tagged.find(edge);
      const int facet_uses = it == tagged.end() ? 0 : it->second;
      if ((uses == 1) != (facet_uses == 1) || facet_uses > 1)
        throw Error(ErrorCode::InvalidDomain, "discretization",
                    "boundary edge not tagged exactly once");
    }
  }
};

namespace detail {

inline void tag_facets(Mesh& mesh, const std::function<bool(const Point&)>& selector) {
  for (Facet& f : mesh.facets) {
    f.tag = (selector && selector(f.midpoint)) ? FacetTag::S : FacetTag::Robin;
  }
}

inline Facet segment_facet(const Mesh& mesh, std::size_t a, std::size_t b) {
  // Boundary traversed counter-clockwise: outward normal is the right-hand normal.
  Facet f;
  f.nodes = {a, b};
  f.node_count = 2;
  const Point d = mesh.nodes[b] - mesh.nodes[a];
  f.measure = d.norm();
  f.normal = Point(d.y(), -d.x()) / f.measure;
  f.midpoint = 0.5 * (mesh.nodes[a] + mesh.nodes[b]);
  return f;
}

// Triangulate the annulus between two closed node rings (counter-clockwise,
// both starting at angle `start`).
inline void stitch_rings(Mesh& mesh, const std::vector<std::size_t>& inner,
                         const std::vector<std::size_t>& outer) {
  const std::size_t na = inner.size();
  const std::size_t nb = outer.size();
  std::size_t i = 0, j = 0;
  while (i < na || j < nb) {
    const double next_a = static_cast<double>(i + 1) / static_cast<double>(na);
    const double next_b = static_cast<double>(j + 1) / static_cast<double>(nb);
    if (j < nb && (i >= na || next_b <= next_a)) {
      mesh.elements.push_back({inner[i % na], outer[j % nb], outer[(j + 1) % nb]});
      ++j;
    } else {
      mesh.elements.push_back({inner[i % na], outer[j % nb], inner[(i + 1) % na]});
      ++i;
    }
  }
}

}  // namespace detail

/// Uniform mesh of the domain.
///
/// interval: `resolution` segments. rectangle: resolution x resolution cells,
/// each cut along its rising diagonal. disk polygon: `resolution` concentric
/// rings around a centre node, the outer ring being the vertices of the
/// inscribed regular polygon; ring i carries max(6, round(K i / resolution))
/// nodes with K the number of polygon sides.
inline Mesh build_mesh(const Domain& domain, int resolution,
                       const std::function<bool(const Point&)>& s_selector = {}) {
  domain.check();
  if (resolution < 2)
    throw Error(ErrorCode::InvalidDomain, "discretization", "resolution must be at least 2");
  Mesh mesh;
  mesh.dim = domain.dim();

  switch (domain.kind) {
    case Domain::Kind::Interval: {
      const double h = (domain.bx - domain.ax) / resolution;
      for (int i = 0; i <= resolution; ++i)
        mesh.nodes.emplace_back(i == resolution ? domain.bx : domain.ax + i * h, 0.0);
      for (int i = 0; i < resolution; ++i)
        mesh.elements.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(i + 1), 0});
      Facet left;
      left.nodes = {0, 0};
      left.normal = Point(-1.0, 0.0);
      left.midpoint = mesh.nodes.front();
      Facet right;
      right.nodes = {static_cast<std::size_t>(resolution), 0};
      right.normal = Point(1.0, 0.0);
      right.midpoint = mesh.nodes.back();
      mesh.facets = {left, right};
      break;
    }
    case Domain::Kind::Rectangle: {
      const int n = resolution;
      auto id = [n](int i, int j) { return static_cast<std::size_t>(j * (n + 1) + i); };
      for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
          mesh.nodes.emplace_back(domain.ax + (domain.bx - domain.ax) * i / n,
                                  domain.ay + (domain.by - domain.ay) * j / n);
      for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
          mesh.elements.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
          mesh.elements.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
      }
      for (int i = 0; i < n; ++i) mesh.facets.push_back(detail::segment_facet(mesh, id(i, 0), id(i + 1, 0)));
      for (int j = 0; j < n; ++j) mesh.facets.push_back(detail::segment_facet(mesh, id(n, j), id(n, j + 1)));
      for (int i = n; i > 0; --i) mesh.facets.push_back(detail::segment_facet(mesh, id(i, n), id(i - 1, n)));
      for (int j = n; j > 0; --j) mesh.facets.push_back(detail::segment_facet(mesh, id(0, j), id(0, j - 1)));
      break;
    }
    case Domain::Kind::UnitDiskPolygon: {
      const int rings = resolution;
      const int k_outer = domain.segments;
      if (static_cast<double>(rings - 1) / rings >= std::cos(std::numbers::pi / k_outer)) {
        throw Error(ErrorCode::InvalidDomain, "discretization",
                    "too many rings for the number of boundary segments");
      }
      mesh.nodes.emplace_back(0.0, 0.0);
      std::vector<std::size_t> previous;
      for (int r = 1; r <= rings; ++r) {
        const int count = r == rings
                              ? k_outer
                              : std::max(6, static_cast<int>(std::lround(
                                                static_cast<double>(k_outer) * r / rings)));
        const double radius = r == rings ? 1.0 : static_cast<double>(r) / rings;
        std::vector<std::size_t> ring;
        for (int k = 0; k < count; ++k) {
          const double angle = 2.0 * std::numbers::pi * k / count;
          ring.push_back(mesh.nodes.size());
          mesh.nodes.emplace_back(radius * std::cos(angle), radius * std::sin(angle));
        }
        if (r == 1) {
          for (std::size_t k = 0; k < ring.size(); ++k)
            mesh.elements.push_back({0, ring[k], ring[(k + 1) % ring.size()]});
        } else {
          detail::stitch_rings(mesh, previous, ring);
        }
        previous = std::move(ring);
      }
      for (std::size_t k = 0; k < previous.size(); ++k)
        mesh.facets.push_back(
            detail::segment_facet(mesh, previous[k], previous[(k + 1) % previous.size()]));
      break;
    }
  }
  detail::tag_facets(mesh, s_selector);
  mesh.check();
  return mesh;
}

/// nodes.csv: id,x[,y]
inline std::string nodes_csv(const Mesh& mesh) {
  std::ostringstream os;
  os.precision(17);
  os << (mesh.dim == 1 ? "id,x\n" : "id,x,y\n");
  for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
    os << i << ',' << mesh.nodes[i].x();
    if (mesh.dim == 2) os << ',' << mesh.nodes[i].y();
    os << '\n';
  }
  return os.str();
}

/// elements.csv: id,n0,n1[,n2]
inline std::string elements_csv(const Mesh& mesh) {
  std::ostringstream os;
  os << (mesh.dim == 1 ? "id,n0,n1\n" : "id,n0,n1,n2\n");
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    const auto& el = mesh.elements[e];
    os << e << ',' << el[0] << ',' << el[1];
    if (mesh.dim == 2) os << ',' << el[2];
    os << '\n';
  }
  return os.str();
}

/// facets.csv: id,n0[,n1],tag with tag S or R
inline std::string facets_csv(const Mesh& mesh) {
  std::ostringstream os;
  os << (mesh.dim == 1 ? "id,n0,tag\n" : "id,n0,n1,tag\n");
  for (std::size_t k = 0; k < mesh.facets.size(); ++k) {
    const Facet& f = mesh.facets[k];
    os << k << ',' << f.nodes[0];
    if (mesh.dim == 2) os << ',' << f.nodes[1];
    os << ',' << (f.tag == FacetTag::S ? "S" : "R") << '\n';
  }
  return os.str();
}

}  // namespace ncpar
