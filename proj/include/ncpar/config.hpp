#pragma once

// Run configuration: flat "key = value" text with dotted sections, named
// problem presets, and the coefficient/field vocabulary used in configs.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ncpar/io.hpp"
#include "ncpar/problem.hpp"

namespace ncpar {

// ---------------------------------------------------------------------------
// Scalar parsing

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

[[noreturn]] inline void config_error(const std::string& what) {
  throw Error(ErrorCode::ConfigError, "cli", what);
}

inline double parse_double(const std::string& text) {
  const std::string s = trim(text);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) config_error("not a number: '" + text + "'");
  return v;
}

inline long parse_int(const std::string& text) {
  const std::string s = trim(text);
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size()) config_error("not an integer: '" + text + "'");
  return v;
}

inline bool parse_bool(const std::string& text) {
  const std::string s = trim(text);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  config_error("not a boolean: '" + text + "'");
}

// "name(a,b,...)" -> {name, {a, b, ...}}; plain "name" -> {name, {}}
inline std::pair<std::string, std::vector<std::string>> parse_call(const std::string& text) {
  const std::string s = trim(text);
  const auto open = s.find('(');
  if (open == std::string::npos) return {s, {}};
  if (s.back() != ')') config_error("unbalanced parentheses in '" + text + "'");
  return {trim(s.substr(0, open)), split(s.substr(open + 1, s.size() - open - 2), ',')};
}

}  // namespace detail

/// Parses complex literals such as "3", "-2+1i", "0.5i", "i", "1e-3-2i".
inline cd parse_complex(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.empty()) detail::config_error("empty complex literal");
  if (s.back() != 'i' && s.back() != 'j') return {detail::parse_double(s), 0.0};
  s.pop_back();
  std::size_t split = std::string::npos;
  for (std::size_t i = s.size(); i-- > 1;) {
    if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  const std::string re = split == std::string::npos ? "" : s.substr(0, split);
  std::string im = split == std::string::npos ? s : s.substr(split);
  if (im.empty() || im == "+") im = "1";
  if (im == "-") im = "-1";
  return {re.empty() ? 0.0 : detail::parse_double(re), detail::parse_double(im)};
}

// ---------------------------------------------------------------------------
// Tabulated fields

/// Complex scalar field sampled at points, read from CSV with a header and
/// columns x[,y],re,im. 1D tables are linearly interpolated; 2D tables use
/// the nearest sample.
class TabulatedField {
 public:
  static TabulatedField from_csv_text(const std::string& text) {
    TabulatedField t;
    std::istringstream in(text);
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
      if (detail::trim(line).empty()) continue;
      if (header) {
        header = false;
        const auto cols = detail::split(line, ',');
        if (cols.size() != 3 && cols.size() != 4)
          detail::config_error("tabulated field needs columns x[,y],re,im");
        t.dim_ = static_cast<int>(cols.size()) - 2;
        continue;
      }
      const auto cells = detail::split(line, ',');
      if (static_cast<int>(cells.size()) != t.dim_ + 2)
        detail::config_error("tabulated field row has wrong width");
      Point p(detail::parse_double(cells[0]), t.dim_ == 2 ? detail::parse_double(cells[1]) : 0.0);
      t.points_.push_back(p);
      t.values_.emplace_back(detail::parse_double(cells[static_cast<std::size_t>(t.dim_)]),
                             detail::parse_double(cells[static_cast<std::size_t>(t.dim_) + 1]));
    }
    if (t.points_.empty()) detail::config_error("tabulated field has no rows");
    if (t.dim_ == 1) {
      std::vector<std::size_t> order(t.points_.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::sort(order.begin(), order.end(),
                [&](std::size_t a, std::size_t b) { return t.points_[a].x() < t.points_[b].x(); });
      std::vector<Point> p;
      std::vector<cd> v;
      for (std::size_t i : order) {
        p.push_back(t.points_[i]);
        v.push_back(t.values_[i]);
      }
      t.points_ = std::move(p);
      t.values_ = std::move(v);
    }
    return t;
  }

  cd operator()(const Point& x) const {
    if (dim_ == 1) {
      if (x.x() <= points_.front().x()) return values_.front();
      if (x.x() >= points_.back().x()) return values_.back();
      const auto it = std::upper_bound(points_.begin(), points_.end(), x.x(),
                                       [](double v, const Point& p) { return v < p.x(); });
      const std::size_t hi = static_cast<std::size_t>(it - points_.begin());
      const std::size_t lo = hi - 1;
      const double s = (x.x() - points_[lo].x()) / (points_[hi].x() - points_[lo].x());
      return (1.0 - s) * values_[lo] + s * values_[hi];
    }
    std::size_t best = 0;
    double dist = INFINITY;
    for (std::size_t i = 0; i < points_.size(); ++i) {
      const double d = (points_[i] - x).squaredNorm();
      if (d < dist) {
        dist = d;
        best = i;
      }
    }
    return values_[best];
  }

  int dim() const { return dim_; }

 private:
  int dim_ = 1;
  std::vector<Point> points_;
  std::vector<cd> values_;
};

/// Complex literal or "csv:PATH".
inline ComplexField parse_complex_field(const std::string& text) {
  const std::string s = detail::trim(text);
  if (s.rfind("csv:", 0) == 0) {
    auto table = std::make_shared<TabulatedField>(
        TabulatedField::from_csv_text(io::read_file(s.substr(4))));
    return [table](const Point& x) { return (*table)(x); };
  }
  const cd v = parse_complex(s);
  return [v](const Point&) { return v; };
}

// ---------------------------------------------------------------------------
// Named coefficient vocabulary

/// identity | paper_disk | diag(d1[,d2]) | scalar(c) | matrix(a11,a22,re12,im12)
inline MatrixField principal_preset(const std::string& text, int dim) {
  const auto [name, args] = detail::parse_call(text);
  auto constant = [](SmallCMatrix m) { return [m](const Point&) { return m; }; };
  if (name == "identity") return constant(SmallCMatrix::Identity(dim, dim));
  if (name == "paper_disk") {
    if (dim != 2) detail::config_error("paper_disk principal needs a planar domain");
    SmallCMatrix a(2, 2);
    a << cd(1, 0), cd(0, 1), cd(0, -1), cd(1, 0);
    return constant(a);
  }
  if (name == "diag") {
    if (static_cast<int>(args.size()) != dim) detail::config_error("diag() needs one entry per axis");
    SmallCMatrix a = SmallCMatrix::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) a(i, i) = detail::parse_double(args[static_cast<std::size_t>(i)]);
    return constant(a);
  }
  if (name == "scalar") {
    if (args.size() != 1) detail::config_error("scalar() takes one value");
    return constant(detail::parse_double(args[0]) * SmallCMatrix::Identity(dim, dim));
  }
  if (name == "matrix") {
    if (dim != 2 || args.size() != 4) detail::config_error("matrix(a11,a22,re12,im12) is planar");
    SmallCMatrix a(2, 2);
    const cd off(detail::parse_double(args[2]), detail::parse_double(args[3]));
    a << detail::parse_double(args[0]), off, std::conj(off), detail::parse_double(args[1]);
    return constant(a);
  }
  detail::config_error("unknown principal preset '" + text + "'");
}

/// interval(a,b) | rectangle(ax,bx,ay,by) | unit_disk_polygon(K)
inline Domain parse_domain(const std::string& text) {
  const auto [name, args] = detail::parse_call(text);
  if (name == "interval" && args.size() == 2)
    return Domain::interval(detail::parse_double(args[0]), detail::parse_double(args[1]));
  if (name == "rectangle" && args.size() == 4)
    return Domain::rectangle(detail::parse_double(args[0]), detail::parse_double(args[1]),
                             detail::parse_double(args[2]), detail::parse_double(args[3]));
  if (name == "unit_disk_polygon" && args.size() == 1)
    return Domain::unit_disk_polygon(static_cast<int>(detail::parse_int(args[0])));
  detail::config_error("unknown domain '" + text + "'");
}

/// none | all | ends | left | right | bottom | top | left_right
inline FacetSelector dirichlet_selector(const std::string& name, const Domain& d) {
  const double tol = 1e-9;
  if (name == "none") return [](const Point&) { return false; };
  if (name == "all") return [](const Point&) { return true; };
  if (name == "left") return [d, tol](const Point& x) { return std::abs(x.x() - d.ax) < tol; };
  if (name == "right") return [d, tol](const Point& x) { return std::abs(x.x() - d.bx) < tol; };
  if (name == "ends" || name == "left_right")
    return [d, tol](const Point& x) {
      return std::abs(x.x() - d.ax) < tol || std::abs(x.x() - d.bx) < tol;
    };
  if (name == "bottom") return [d, tol](const Point& x) { return std::abs(x.y() - d.ay) < tol; };
  if (name == "top") return [d, tol](const Point& x) { return std::abs(x.y() - d.by) < tol; };
  detail::config_error("unknown dirichlet selector '" + name + "'");
}

/// zero | one | sin_pi | z | z2 | gauss
inline ComplexField initial_preset(const std::string& name, const Domain& d) {
  if (name == "zero") return [](const Point&) { return cd(0.0); };
  if (name == "one") return [](const Point&) { return cd(1.0); };
  if (name == "sin_pi") {
    if (d.dim() == 1)
      return [d](const Point& x) {
        return cd(std::sin(std::numbers::pi * (x.x() - d.ax) / (d.bx - d.ax)));
      };
    return [d](const Point& x) {
      return cd(std::sin(std::numbers::pi * (x.x() - d.ax) / (d.bx - d.ax)) *
                std::sin(std::numbers::pi * (x.y() - d.ay) / (d.by - d.ay)));
    };
  }
  if (name == "z") return [](const Point& x) { return cd(x.x(), x.y()); };
  if (name == "z2") return [](const Point& x) { return cd(x.x(), x.y()) * cd(x.x(), x.y()); };
  if (name == "gauss") {
    const Point c(0.5 * (d.ax + d.bx), 0.5 * (d.ay + d.by));
    return [c](const Point& x) {
      const double r2 = (x - c).squaredNorm();
      return std::exp(-10.0 * r2) * std::polar(1.0, 3.0 * x.x());
    };
  }
  detail::config_error("unknown initial field '" + name + "'");
}

/// none | complex literal (constant in space and time) | step:VALUE (VALUE for t >= T/2)
inline SpaceTimeField source_preset(const std::string& text, double final_time) {
  const std::string s = detail::trim(text);
  if (s == "none") return [](const Point&, double) { return cd(0.0); };
  if (s.rfind("step:", 0) == 0) {
    const cd v = parse_complex(s.substr(5));
    return [v, final_time](const Point&, double t) { return t >= 0.5 * final_time ? v : cd(0.0); };
  }
  const ComplexField f = parse_complex_field(s);
  return [f](const Point& x, double) { return f(x); };
}

// ---------------------------------------------------------------------------
// Run configuration

struct CheckSelection {
  bool apriori = true;
  bool energy = true;
  bool orthogonality = true;
  bool uniqueness = false;
  bool continuity = false;
  bool cauchy = false;
  bool twin = false;
  bool operator==(const CheckSelection&) const = default;
};

struct RunConfig {
  std::string preset = "heat1d";
  std::map<std::string, std::string> problem;  // problem.* overrides
  int resolution = 0;                          // 0: preset default
  long basis_k = 0;                            // 0: whole basis
  int time_steps = 0;                          // 0: preset default
  double theta = 0.5;
  CheckSelection checks;
  std::string convergence_kind = "combined";  // combined | time | eigen
  std::vector<int> convergence_levels = {25, 50, 100, 200};
  std::optional<double> sharpness_s;
  std::optional<double> sharpness_epsilon;
  long sharpness_terms = 1'000'000;

  bool operator==(const RunConfig&) const = default;
};

inline const std::vector<std::string>& problem_override_keys() {
  static const std::vector<std::string> keys = {
      "domain", "final_time", "principal", "first_order", "a0",
      "b0",     "b1",         "dirichlet", "source",      "initial"};
  return keys;
}

inline RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      detail::config_error("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));

    if (key == "problem.preset") {
      c.preset = value;
    } else if (key.rfind("problem.", 0) == 0) {
      const std::string sub = key.substr(8);
      const auto& keys = problem_override_keys();
      if (std::find(keys.begin(), keys.end(), sub) == keys.end())
        detail::config_error("unknown key '" + key + "'");
      c.problem[sub] = value;
    } else if (key == "mesh.resolution") {
      c.resolution = static_cast<int>(detail::parse_int(value));
    } else if (key == "basis.k") {
      c.basis_k = detail::parse_int(value);
    } else if (key == "time.steps") {
      c.time_steps = static_cast<int>(detail::parse_int(value));
    } else if (key == "time.theta") {
      c.theta = detail::parse_double(value);
    } else if (key == "checks.apriori") {
      c.checks.apriori = detail::parse_bool(value);
    } else if (key == "checks.energy") {
      c.checks.energy = detail::parse_bool(value);
    } else if (key == "checks.orthogonality") {
      c.checks.orthogonality = detail::parse_bool(value);
    } else if (key == "checks.uniqueness") {
      c.checks.uniqueness = detail::parse_bool(value);
    } else if (key == "checks.continuity") {
      c.checks.continuity = detail::parse_bool(value);
    } else if (key == "checks.cauchy") {
      c.checks.cauchy = detail::parse_bool(value);
    } else if (key == "checks.twin") {
      c.checks.twin = detail::parse_bool(value);
    } else if (key == "convergence.kind") {
      c.convergence_kind = value;
    } else if (key == "convergence.levels") {
      c.convergence_levels.clear();
      for (const auto& v : detail::split(value, ','))
        c.convergence_levels.push_back(static_cast<int>(detail::parse_int(v)));
    } else if (key == "sharpness.s") {
      c.sharpness_s = detail::parse_double(value);
    } else if (key == "sharpness.epsilon") {
      c.sharpness_epsilon = detail::parse_double(value);
    } else if (key == "sharpness.terms") {
      c.sharpness_terms = detail::parse_int(value);
    } else {
      detail::config_error("unknown key '" + key + "'");
    }
  }

  if (c.resolution < 0 || c.time_steps < 0 || c.basis_k < 0)
    detail::config_error("numeric parameters must be positive");
  if (!(c.theta >= 0.0 && c.theta <= 1.0)) detail::config_error("time.theta must lie in [0,1]");
  if (c.convergence_levels.empty()) detail::config_error("convergence.levels is empty");
  for (int l : c.convergence_levels)
    if (l < 1) detail::config_error("convergence levels must be positive");
  if (c.sharpness_terms < 1) detail::config_error("sharpness.terms must be positive");
  if (c.convergence_kind != "combined" && c.convergence_kind != "time" &&
      c.convergence_kind != "eigen")
    detail::config_error("convergence.kind must be combined, time or eigen");
  return c;
}

inline std::string serialize_config(const RunConfig& c) {
  std::ostringstream os;
  auto b = [](bool v) { return v ? "true" : "false"; };
  os << "problem.preset = " << c.preset << '\n';
  for (const auto& [k, v] : c.problem) os << "problem." << k << " = " << v << '\n';
  os << "mesh.resolution = " << c.resolution << '\n';
  os << "basis.k = " << c.basis_k << '\n';
  os << "time.steps = " << c.time_steps << '\n';
  os << "time.theta = " << io::fmt(c.theta) << '\n';
  os << "checks.apriori = " << b(c.checks.apriori) << '\n';
  os << "checks.energy = " << b(c.checks.energy) << '\n';
  os << "checks.orthogonality = " << b(c.checks.orthogonality) << '\n';
  os << "checks.uniqueness = " << b(c.checks.uniqueness) << '\n';
  os << "checks.continuity = " << b(c.checks.continuity) << '\n';
  os << "checks.cauchy = " << b(c.checks.cauchy) << '\n';
  os << "checks.twin = " << b(c.checks.twin) << '\n';
  os << "convergence.kind = " << c.convergence_kind << '\n';
  os << "convergence.levels = ";
  for (std::size_t i = 0; i < c.convergence_levels.size(); ++i)
    os << (i ? "," : "") << c.convergence_levels[i];
  os << '\n';
  if (c.sharpness_s) os << "sharpness.s = " << io::fmt(*c.sharpness_s) << '\n';
  if (c.sharpness_epsilon) os << "sharpness.epsilon = " << io::fmt(*c.sharpness_epsilon) << '\n';
  os << "sharpness.terms = " << c.sharpness_terms << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------
// Problem presets

/// Problem data before the zero-order splitting, plus run defaults.
struct ProblemRecipe {
  std::map<std::string, std::string> settings;  // same vocabulary as problem.* keys
  int resolution = 20;
  int time_steps = 100;
  /// Closed-form solution when one is known.
  std::function<cd(const Point&, double)> exact;
};

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {
      "heat1d",     "zero",       "growth1d",          "convection1d",
      "rect_robin", "paper_disk", "paper_disk_forced", "nonpsd"};
  return names;
}

inline ProblemRecipe preset_recipe(const std::string& name) {
  ProblemRecipe r;
  auto& s = r.settings;
  s = {{"domain", "interval(0,1)"}, {"final_time", "0.1"}, {"principal", "identity"},
       {"first_order", ""},         {"a0", "0"},           {"b0", "1"},
       {"b1", "1"},                 {"dirichlet", "ends"}, {"source", "none"},
       {"initial", "sin_pi"}};
  if (name == "heat1d") {
    r.resolution = 50;
    r.time_steps = 100;
    r.exact = [](const Point& x, double t) {
      return cd(std::exp(-std::numbers::pi * std::numbers::pi * t) * std::sin(std::numbers::pi * x.x()));
    };
  } else if (name == "zero") {
    s["initial"] = "zero";
    r.resolution = 20;
    r.time_steps = 50;
    r.exact = [](const Point&, double) { return cd(0.0); };
  } else if (name == "growth1d") {
    s["dirichlet"] = "none";
    s["a0"] = "-5";
    s["initial"] = "one";
    s["final_time"] = "0.5";
    r.resolution = 40;
    r.time_steps = 200;
  } else if (name == "convection1d") {
    s["first_order"] = "1";
    s["source"] = "1";
    s["final_time"] = "0.5";
    r.resolution = 50;
    r.time_steps = 200;
  } else if (name == "rect_robin") {
    s["domain"] = "rectangle(0,2,0,1)";
    s["dirichlet"] = "left";
    s["a0"] = "1";
    s["source"] = "1";
    s["final_time"] = "0.2";
    r.resolution = 8;
    r.time_steps = 50;
  } else if (name == "paper_disk") {
    s["domain"] = "unit_disk_polygon(32)";
    s["principal"] = "paper_disk";
    s["dirichlet"] = "none";
    s["initial"] = "z2";
    s["final_time"] = "0.5";
    r.resolution = 4;
    r.time_steps = 100;
  } else if (name == "paper_disk_forced") {
    s["domain"] = "unit_disk_polygon(32)";
    s["principal"] = "paper_disk";
    s["dirichlet"] = "none";
    s["a0"] = "1+0.5i";
    s["source"] = "1";
    s["initial"] = "z";
    s["final_time"] = "0.5";
    r.resolution = 4;
    r.time_steps = 100;
  } else if (name == "nonpsd") {
    s["domain"] = "rectangle(0,1,0,1)";
    s["principal"] = "matrix(1,1,0,2)";
    s["dirichlet"] = "all";
    r.resolution = 4;
    r.time_steps = 10;
  } else {
    detail::config_error("unknown preset '" + name + "'");
  }
  return r;
}

/// Builds the ProblemSpec from settings, applying the zero-order splitting.
inline ProblemSpec make_problem(const std::map<std::string, std::string>& settings) {
  auto get = [&](const std::string& k) {
    const auto it = settings.find(k);
    if (it == settings.end()) detail::config_error("missing problem." + k);
    return it->second;
  };
  ProblemSpec spec;
  spec.domain = parse_domain(get("domain"));
  spec.final_time = detail::parse_double(get("final_time"));
  spec.principal = principal_preset(get("principal"), spec.domain.dim());
  const std::string first = detail::trim(get("first_order"));
  if (!first.empty())
    for (const auto& term : detail::split(first, ';')) spec.first_order.push_back(parse_complex_field(term));
  if (!spec.first_order.empty() && static_cast<int>(spec.first_order.size()) != spec.domain.dim())
    detail::config_error("problem.first_order needs one coefficient per axis");

  const ComplexField a0 = parse_complex_field(get("a0"));
  const ComplexField b0 = parse_complex_field(get("b0"));
  const cd b1_value = parse_complex(get("b1"));
  if (b1_value.imag() != 0.0) detail::config_error("problem.b1 must be real");
  const RealField b1 = [v = b1_value.real()](const Point&) { return v; };
  const ZeroOrderSplit split = split_zero_order(a0, b0, b1);
  spec.zero_order_a00 = split.a00;
  spec.zero_order_delta_a0 = split.delta_a0;
  spec.boundary_b1 = b1;
  spec.boundary_b00 = split.b00;
  spec.boundary_delta_b0 = split.delta_b0;
  spec.dirichlet_set = dirichlet_selector(get("dirichlet"), spec.domain);
  spec.source = source_preset(get("source"), spec.final_time);
  spec.initial = initial_preset(get("initial"), spec.domain);
  return spec;
}

/// Preset merged with the config's problem.* overrides.
struct ResolvedProblem {
  ProblemSpec spec;
  int resolution = 0;
  int time_steps = 0;
  std::function<cd(const Point&, double)> exact;
};

inline ResolvedProblem resolve_problem(const RunConfig& config) {
  ProblemRecipe recipe = preset_recipe(config.preset);
  bool overridden = false;
  for (const auto& [k, v] : config.problem) {
    recipe.settings[k] = v;
    overridden = true;
  }
  ResolvedProblem out;
  out.spec = make_problem(recipe.settings);
  out.resolution = config.resolution > 0 ? config.resolution : recipe.resolution;
  out.time_steps = config.time_steps > 0 ? config.time_steps : recipe.time_steps;
  if (!overridden) out.exact = recipe.exact;
  return out;
}

}  // namespace ncpar
