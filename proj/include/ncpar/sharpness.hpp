#pragma once

// Series behind the non-embedding example on the unit disk with
// A = [[1, i], [-i, 1]]:
//   u_eps(z,t) = sum_k z^k t^{k/2} / (T^{(k+1)/2} (k+1)^{eps/2})
// whose L2(0,T;H^+) norm is A(eps) = 2 pi sum_k (k+1)^{-1-eps}, while its
// L2(0,T;H^s) norm is bounded below by B(s,eps) = pi sum_k k^{2s-1} (k+1)^{-1-eps}.

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <vector>

#include "ncpar/assembly.hpp"

namespace ncpar {

namespace detail {

// Compensated forward sum of term(k), k = 0..max(checkpoints); returns the
// partial sums at each checkpoint (ascending).
inline std::vector<double> partial_sums(const std::function<double(std::int64_t)>& term,
                                        const std::vector<std::int64_t>& checkpoints) {
  std::vector<double> out;
  double sum = 0.0, comp = 0.0;
  std::size_t next = 0;
  const std::int64_t last = checkpoints.empty() ? -1 : checkpoints.back();
  for (std::int64_t k = 0; k <= last; ++k) {
    const double y = term(k) - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    while (next < checkpoints.size() && checkpoints[next] == k) {
      out.push_back(sum);
      ++next;
    }
  }
  return out;
}

}  // namespace detail

struct PlusNormSeries {
  double epsilon = 0.0;
  std::int64_t terms = 0;  // N
  double partial = 0.0;    // 2 pi sum_{k=0}^N (k+1)^{-1-eps}
  double tail_bound = 0.0; // 2 pi (N+1)^{-eps} / eps  (<= 2 pi N^{-eps} / eps)
};

inline PlusNormSeries series_plus_norm(double epsilon, std::int64_t n) {
  if (!(epsilon > 0.0))
    throw Error(ErrorCode::ConfigError, "sharpness", "epsilon must be positive");
  if (n < 0) throw Error(ErrorCode::ConfigError, "sharpness", "truncation must be nonnegative");
  PlusNormSeries s;
  s.epsilon = epsilon;
  s.terms = n;
  // Smallest terms first.
  double sum = 0.0;
  for (std::int64_t k = n; k >= 0; --k) sum += std::pow(static_cast<double>(k + 1), -1.0 - epsilon);
  s.partial = 2.0 * std::numbers::pi * sum;
  s.tail_bound = 2.0 * std::numbers::pi * std::pow(static_cast<double>(n + 1), -epsilon) / epsilon;
  return s;
}

/// k-th term of B(s, eps)/pi. The k = 0 term follows 0^{2s-1}: zero for
/// s > 1/2, one for s = 1/2; for s < 1/2 it is dropped (0^{negative} is not finite).
inline double hs_term(double s, double epsilon, std::int64_t k) {
  const double p = 2.0 * s - 1.0;
  if (k == 0) return p == 0.0 ? 1.0 : 0.0;
  const double kk = static_cast<double>(k);
  return std::pow(kk, p) * std::pow(kk + 1.0, -1.0 - epsilon);
}

struct HsSeries {
  double s = 0.0;
  double epsilon = 0.0;
  std::int64_t terms = 0;
  double partial = 0.0;     // pi sum_{k=0}^N
  double partial_2n = 0.0;  // at 2N
  double partial_4n = 0.0;  // at 4N
  double exponent = 0.0;    // summand ~ k^{exponent}, exponent = 2s - 2 - eps
  bool diverges = false;    // exact exponent test: eps <= 2s - 1
  double observed_exponent = 0.0;  // log2 of the increment ratio, minus 1
  bool growth_corroborates = false;
  double tail_bound = INFINITY;    // bound on sum_{k>N} when convergent

  /// Exponent test and growth measurement agree.
  bool consistent() const {
    return diverges ? growth_corroborates : (partial_2n - partial) <= tail_bound;
  }
};

inline HsSeries series_hs_lower_bound(double s, double epsilon, std::int64_t n) {
  if (!(s > 0.0 && s <= 1.0))
    throw Error(ErrorCode::SOutOfRange, "sharpness", "s must lie in (0, 1]");
  if (!(epsilon > 0.0))
    throw Error(ErrorCode::ConfigError, "sharpness", "epsilon must be positive");
  if (n < 1) throw Error(ErrorCode::ConfigError, "sharpness", "truncation must be at least 1");
  HsSeries r;
  r.s = s;
  r.epsilon = epsilon;
  r.terms = n;
  r.exponent = 2.0 * s - 2.0 - epsilon;
  r.diverges = epsilon <= 2.0 * s - 1.0;
  const auto sums = detail::partial_sums([&](std::int64_t k) { return hs_term(s, epsilon, k); },
                                         {n, 2 * n, 4 * n});
  r.partial = std::numbers::pi * sums[0];
  r.partial_2n = std::numbers::pi * sums[1];
  r.partial_4n = std::numbers::pi * sums[2];
  const double inc1 = r.partial_2n - r.partial;
  const double inc2 = r.partial_4n - r.partial_2n;
  // For a summand ~ k^q the dyadic increments scale like 2^{q+1}.
  r.observed_exponent = (inc1 > 0.0 && inc2 > 0.0) ? std::log2(inc2 / inc1) - 1.0 : -INFINITY;
  r.growth_corroborates = r.observed_exponent >= -1.0 - 0.01;
  if (!r.diverges) {
    // k^{2s-1}(k+1)^{-1-eps} <= k^q and sum_{k>N} k^q <= N^{q+1} / (-q-1).
    const double q = r.exponent;
    r.tail_bound = std::numbers::pi * std::pow(static_cast<double>(n), q + 1.0) / (-q - 1.0);
  }
  return r;
}

struct DivergenceWitness {
  double s = 0.0;
  double epsilon = 0.0;
  PlusNormSeries plus;  // finite
  HsSeries hs;          // divergent
  bool witnessed() const {
    return std::isfinite(plus.partial + plus.tail_bound) && hs.diverges && hs.growth_corroborates;
  }
};

/// For s in (1/2, 1): eps = (2s - 1)/2 makes A(eps) finite and B(s, eps) divergent.
inline DivergenceWitness find_divergence_epsilon(double s, std::int64_t n = 1'000'000) {
  if (!(s > 0.5 && s < 1.0))
    throw Error(ErrorCode::SOutOfRange, "sharpness", "s must lie in (1/2, 1)");
  DivergenceWitness w;
  w.s = s;
  w.epsilon = (2.0 * s - 1.0) / 2.0;
  w.plus = series_plus_norm(w.epsilon, n);
  w.hs = series_hs_lower_bound(s, w.epsilon, n);
  return w;
}

/// 2 pi sum_{k=0}^{K} (k+1)^{-1-eps}: the H^+ time-integrated norm of u_eps
/// truncated after the z^K term.
inline double truncated_plus_norm_exact(int k_terms, double epsilon) {
  double s = 0.0;
  for (int k = k_terms; k >= 0; --k) s += std::pow(k + 1.0, -1.0 - epsilon);
  return 2.0 * std::numbers::pi * s;
}

/// Discrete int_0^T ||u_eps(t)||_+^2 for u_eps truncated after z^K, using the
/// nodal interpolants Z_k of z^k and the assembled (+)-matrix over all nodes.
/// The time integrals int_0^T a_k a_k' dt are evaluated in closed form and do
/// not depend on T.
inline double truncated_plus_norm_discrete(const Mesh& mesh, const CMatrix& k_plus_full,
                                           int k_terms, double epsilon) {
  const auto nn = static_cast<Eigen::Index>(mesh.num_nodes());
  CMatrix z(nn, k_terms + 1);
  for (int k = 0; k <= k_terms; ++k) {
    z.col(k) = interpolate(mesh, [k](const Point& p) { return std::pow(cd(p.x(), p.y()), k); });
  }
  const CMatrix gram = z.adjoint() * k_plus_full * z;  // gram(k', k) = (Z_k, Z_k')_+
  double total = 0.0;
  for (int k = 0; k <= k_terms; ++k) {
    for (int kp = 0; kp <= k_terms; ++kp) {
      const double weight = 1.0 / ((0.5 * (k + kp) + 1.0) *
                                   std::pow((k + 1.0) * (kp + 1.0), 0.5 * epsilon));
      total += weight * gram(kp, k).real();
    }
  }
  return total;
}

}  // namespace ncpar
