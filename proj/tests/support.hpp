#pragma once

#include <map>
#include <string>

#include "ncpar/config.hpp"

namespace ncpar::testing {

/// Problem settings on (0,1) with A = 1, no lower-order terms, Dirichlet ends.
inline std::map<std::string, std::string> base_settings() {
  return {{"domain", "interval(0,1)"}, {"final_time", "0.1"}, {"principal", "identity"},
          {"first_order", ""},         {"a0", "0"},           {"b0", "1"},
          {"b1", "1"},                 {"dirichlet", "ends"}, {"source", "none"},
          {"initial", "sin_pi"}};
}

inline ProblemSpec problem_with(std::map<std::string, std::string> overrides) {
  auto s = base_settings();
  for (auto& [k, v] : overrides) s[k] = v;
  return make_problem(s);
}

inline ProblemSpec disk_problem(int segments = 32) {
  return problem_with({{"domain", "unit_disk_polygon(" + std::to_string(segments) + ")"},
                       {"principal", "paper_disk"},
                       {"dirichlet", "none"}});
}

}  // namespace ncpar::testing
