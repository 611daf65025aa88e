#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ncpar/errors.hpp"

namespace ncpar {

/// Spatial point. One-dimensional problems use x() only and keep y() == 0.
using Point = Eigen::Vector2d;

/// Spatial domain: an interval, an axis-aligned rectangle, or the unit disk
/// approximated by an inscribed regular polygon.
struct Domain {
  enum class Kind { Interval, Rectangle, UnitDiskPolygon };

  Kind kind = Kind::Interval;
  double ax = 0.0, bx = 1.0;
  double ay = 0.0, by = 1.0;
  int segments = 0;  // polygon sides for the disk

  static Domain interval(double a, double b) {
    Domain d;
    d.kind = Kind::Interval;
    d.ax = a;
    d.bx = b;
    d.ay = d.by = 0.0;
    return d;
  }
  static Domain rectangle(double ax, double bx, double ay, double by) {
    Domain d;
    d.kind = Kind::Rectangle;
    d.ax = ax;
    d.bx = bx;
    d.ay = ay;
    d.by = by;
    return d;
  }
  static Domain unit_disk_polygon(int segments) {
    Domain d;
    d.kind = Kind::UnitDiskPolygon;
    d.ax = d.ay = -1.0;
    d.bx = d.by = 1.0;
    d.segments = segments;
    return d;
  }

  int dim() const { return kind == Kind::Interval ? 1 : 2; }

  void check() const {
    switch (kind) {
      case Kind::Interval:
        if (!(bx > ax)) throw Error(ErrorCode::InvalidDomain, "discretization", "empty interval");
        break;
      case Kind::Rectangle:
        if (!(bx > ax) || !(by > ay))
          throw Error(ErrorCode::InvalidDomain, "discretization", "empty rectangle");
        break;
      case Kind::UnitDiskPolygon:
        if (segments < 3)
          throw Error(ErrorCode::InvalidDomain, "discretization",
                      "disk polygon needs at least 3 boundary segments");
        break;
    }
  }

  /// Measure of the discrete domain (the polygon, not the disk).
  double measure() const {
    switch (kind) {
      case Kind::Interval: return bx - ax;
      case Kind::Rectangle: return (bx - ax) * (by - ay);
      case Kind::UnitDiskPolygon:
        return 0.5 * segments * std::sin(2.0 * std::numbers::pi / segments);
    }
    return 0.0;
  }

  /// Closed-domain membership test with a small tolerance.
  bool contains(const Point& p, double tol = 1e-12) const {
    switch (kind) {
      case Kind::Interval:
        return p.x() >= ax - tol && p.x() <= bx + tol;
      case Kind::Rectangle:
        return p.x() >= ax - tol && p.x() <= bx + tol && p.y() >= ay - tol && p.y() <= by + tol;
      case Kind::UnitDiskPolygon: {
        const double h = 2.0 * std::numbers::pi / segments;
        const double apothem = std::cos(h / 2.0);
        for (int k = 0; k < segments; ++k) {
          const double mid = (k + 0.5) * h;
          if (p.x() * std::cos(mid) + p.y() * std::sin(mid) > apothem + tol) return false;
        }
        return true;
      }
    }
    return false;
  }

  /// Regular grid of `density` points per axis over the bounding box, kept
  /// where they lie in the closed domain.
  std::vector<Point> interior_samples(int density) const {
    std::vector<Point> out;
    const int nd = std::max(density, 2);
    if (dim() == 1) {
      for (int i = 0; i < nd; ++i) out.emplace_back(ax + (bx - ax) * i / (nd - 1), 0.0);
      return out;
    }
    for (int j = 0; j < nd; ++j) {
      for (int i = 0; i < nd; ++i) {
        Point p(ax + (bx - ax) * i / (nd - 1), ay + (by - ay) * j / (nd - 1));
        if (contains(p)) out.push_back(p);
      }
    }
    return out;
  }

  /// Points on the boundary of the discrete domain.
  std::vector<Point> boundary_samples(int density) const {
    std::vector<Point> out;
    const int nd = std::max(density, 2);
    switch (kind) {
      case Kind::Interval:
        out.emplace_back(ax, 0.0);
        out.emplace_back(bx, 0.0);
        break;
      case Kind::Rectangle:
        for (int i = 0; i < nd; ++i) {
          const double s = static_cast<double>(i) / (nd - 1);
          out.emplace_back(ax + (bx - ax) * s, ay);
          out.emplace_back(ax + (bx - ax) * s, by);
          out.emplace_back(ax, ay + (by - ay) * s);
          out.emplace_back(bx, ay + (by - ay) * s);
        }
        break;
      case Kind::UnitDiskPolygon: {
        const double h = 2.0 * std::numbers::pi / segments;
        for (int k = 0; k < segments; ++k) {
          const Point a(std::cos(k * h), std::sin(k * h));
          const Point b(std::cos((k + 1) * h), std::sin((k + 1) * h));
          out.push_back(a);
          out.push_back(0.5 * (a + b));
        }
        break;
      }
    }
    return out;
  }

  std::string describe() const {
    switch (kind) {
      case Kind::Interval:
        return "interval(" + std::to_string(ax) + "," + std::to_string(bx) + ")";
      case Kind::Rectangle:
        return "rectangle(" + std::to_string(ax) + "," + std::to_string(bx) + "," +
               std::to_string(ay) + "," + std::to_string(by) + ")";
      case Kind::UnitDiskPolygon:
        return "unit_disk_polygon(" + std::to_string(segments) + ")";
    }
    return "?";
  }
};

}  // namespace ncpar
