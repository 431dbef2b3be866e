#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "latbox/errors.hpp"

// Exact lattice point counts of Z^d in dilated, translated hypercubes.
//
// The box with half side a, dilated by t and translated by X, meets Z^d in
//
//     N(t, X) = prod_i ( floor(a t + x_i) - ceil(-a t + x_i) + 1 )
//
// because the i-th coordinate of a lattice point must lie in the interval
// [-a t + x_i, a t + x_i]. Everything downstream is built from the per-axis
// discrepancy
//
//     delta_tilde(t, x) = floor(t + x) - ceil(-t + x) + 1 - 2t,
//
// which lies in (-1, 1]: the error term R = N - (2 a t)^d, the normalized
// error R / t^(d-1), and (for a = 1) the reduced statistic
//
//     Delta(t, X) = 2^(d-1) * sum_i delta_tilde(t, x_i),
//
// whose distance from the normalized error shrinks like O(1/t) with the
// computable envelope reduction_gap_bound below. General half sides are
// handled by rescaling the dilation to a*t, so Delta itself is only defined
// for a = 1.

namespace latbox {

using Translation = std::vector<double>;

// Inputs with a*t +/- x_i closer than this to an integer sit on a box face;
// floor/ceil results there depend on the last rounding bit.
inline constexpr double kBoundaryEps = 1e-9;

struct BoxSpec {
  int d;     // dimension, >= 1
  double a;  // half side length, > 0

  BoxSpec(int dim, double half_side) : d(dim), a(half_side) {
    if (d < 1) throw std::invalid_argument("BoxSpec: dimension must be >= 1");
    if (!(a > 0.0) || !std::isfinite(a))
      throw std::invalid_argument("BoxSpec: half side must be positive and finite");
  }
};

namespace detail {

inline void require_finite(double v, const char* name) {
  if (!std::isfinite(v))
    throw std::domain_error(std::string(name) + " must be finite");
}

inline void require_positive_t(double t) {
  require_finite(t, "t");
  if (!(t > 0.0)) throw std::domain_error("t must be positive");
}

inline void require_dimension(const BoxSpec& box, const Translation& x) {
  if (x.size() != static_cast<std::size_t>(box.d))
    throw std::invalid_argument("translation length " + std::to_string(x.size()) +
                                " does not match dimension " + std::to_string(box.d));
}

// x^k by repeated multiplication; k small, avoids libm pow variability.
inline double ipow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

// Number of integers in [ -td + x, td + x ], clamped at zero.
inline double axis_count(double td, double x) {
  const double n = std::floor(td + x) - std::ceil(-td + x) + 1.0;
  return n > 0.0 ? n : 0.0;
}

inline std::uint64_t binom_u64(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (int j = 1; j <= k; ++j) r = r * static_cast<std::uint64_t>(n - k + j) / j;
  return r;
}

inline bool near_integer(double v, double eps = kBoundaryEps) {
  return std::fabs(v - std::round(v)) < eps;
}

}  // namespace detail

inline double fractional_part(double x) {
  detail::require_finite(x, "x");
  double f = x - std::floor(x);
  // Tiny negative x rounds x - floor(x) up to exactly 1; wrap to 0.
  if (f >= 1.0) f = 0.0;
  return f;
}

// Gap parameter y = |1 - 2{x}|: the offset between the two 1-periodic time
// grids at which t + x and -t + x cross integers. Always in [0, 1].
inline double gap_y(double x) { return std::fabs(1.0 - 2.0 * fractional_part(x)); }

inline double delta_tilde(double t, double x) {
  detail::require_positive_t(t);
  detail::require_finite(x, "x");
  return std::floor(t + x) - std::ceil(-t + x) + 1.0 - 2.0 * t;
}

// True when any face of the dilated box passes within kBoundaryEps of an
// integer coordinate; counts and discrepancies there are rounding-fragile.
inline bool boundary_degenerate(const BoxSpec& box, double t, const Translation& x) {
  detail::require_positive_t(t);
  detail::require_dimension(box, x);
  const double td = box.a * t;
  for (double xi : x) {
    detail::require_finite(xi, "x[i]");
    if (detail::near_integer(td + xi) || detail::near_integer(td - xi)) return true;
  }
  return false;
}

// Closed-form count via the per-axis interval formula.
inline std::uint64_t count_points(const BoxSpec& box, double t, const Translation& x) {
  detail::require_positive_t(t);
  detail::require_dimension(box, x);
  const double td = box.a * t;
  unsigned __int128 prod = 1;
  for (double xi : x) {
    detail::require_finite(xi, "x[i]");
    const double n = detail::axis_count(td, xi);
    if (n == 0.0) return 0;
    prod *= static_cast<std::uint64_t>(n);
    if (prod > std::numeric_limits<std::uint64_t>::max() >> 1)
      throw std::overflow_error("count_points: product exceeds 64-bit range");
  }
  return static_cast<std::uint64_t>(prod);
}

// Independent oracle: enumerate a padded candidate grid and test the
// defining inequality |n_i - x_i| <= a t directly.
inline std::uint64_t count_points_bruteforce(const BoxSpec& box, double t,
                                             const Translation& x,
                                             std::uint64_t budget = 100000000ULL) {
  detail::require_positive_t(t);
  detail::require_dimension(box, x);
  const double td = box.a * t;

  std::vector<long long> lo(x.size()), hi(x.size());
  double cost = 1.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    detail::require_finite(x[i], "x[i]");
    lo[i] = static_cast<long long>(std::floor(x[i] - td)) - 1;
    hi[i] = static_cast<long long>(std::ceil(x[i] + td)) + 1;
    cost *= static_cast<double>(hi[i] - lo[i] + 1);
  }
  if (cost > static_cast<double>(budget))
    throw resource_error("count_points_bruteforce: enumeration of ~" +
                         std::to_string(cost) + " candidates exceeds budget " +
                         std::to_string(budget));

  std::vector<long long> n(lo);
  std::uint64_t count = 0;
  while (true) {
    bool inside = true;
    for (std::size_t i = 0; i < n.size(); ++i) {
      if (!(std::fabs(static_cast<double>(n[i]) - x[i]) <= td)) {
        inside = false;
        break;
      }
    }
    if (inside) ++count;
    std::size_t axis = 0;
    while (axis < n.size() && ++n[axis] > hi[axis]) n[axis++] = lo[axis];
    if (axis == n.size()) break;
  }
  return count;
}

inline double box_volume(const BoxSpec& box, double t) {
  return detail::ipow(2.0 * box.a * t, box.d);
}

inline double error_term(const BoxSpec& box, double t, const Translation& x) {
  return static_cast<double>(count_points(box, t, x)) - box_volume(box, t);
}

inline double normalized_error(const BoxSpec& box, double t, const Translation& x) {
  return error_term(box, t, x) / detail::ipow(t, box.d - 1);
}

// Delta(t, X) = 2^(d-1) * sum_i delta_tilde(t, x_i). Defined for a = 1 only;
// for other half sides rescale the dilation to a*t first.
inline double delta(const BoxSpec& box, double t, const Translation& x) {
  if (box.a != 1.0)
    throw std::invalid_argument("delta is defined for a = 1; rescale t to a*t");
  detail::require_positive_t(t);
  detail::require_dimension(box, x);
  double sum = 0.0;
  for (double xi : x) sum += delta_tilde(t, xi);
  return std::ldexp(sum, box.d - 1);
}

// Envelope dominating |R/t^(d-1) - Delta| for t >= 1/2:
//
//     sum_{i=1}^{d-1} 2^(i-1) * [ (2t+1)^(d-i) - (2t-1)^(d-i) ] / t^(d-i)
//
// The bracket comes from squeezing each per-axis count between 2t-1 and
// 2t+1; it is evaluated through its odd binomial terms to avoid the
// cancellation of two nearly equal powers at large t. O(1/t) as t grows.
inline double reduction_gap_bound(int d, double t) {
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");
  detail::require_finite(t, "t");
  if (!(t >= 0.5)) throw std::domain_error("reduction_gap_bound requires t >= 1/2");
  const double two_t = 2.0 * t;
  double total = 0.0;
  for (int i = 1; i <= d - 1; ++i) {
    const int k = d - i;
    double diff = 0.0;  // (2t+1)^k - (2t-1)^k
    for (int j = 1; j <= k; j += 2)
      diff += static_cast<double>(detail::binom_u64(k, j)) * detail::ipow(two_t, k - j);
    diff *= 2.0;
    total += std::ldexp(diff / detail::ipow(t, k), i - 1);
  }
  return total;
}

struct LatticeCountResult {
  double t = 0.0;
  std::uint64_t count = 0;
  double volume = 0.0;
  double error = 0.0;             // count - volume
  double normalized_error = 0.0;  // error / t^(d-1)
  double delta = std::numeric_limits<double>::quiet_NaN();  // a = 1 only
  std::vector<double> per_axis_delta_tilde;                 // at dilation a*t
  bool boundary_degenerate = false;
};

inline LatticeCountResult count_record(const BoxSpec& box, double t,
                                       const Translation& x) {
  LatticeCountResult r;
  r.t = t;
  r.count = count_points(box, t, x);
  r.volume = box_volume(box, t);
  r.error = static_cast<double>(r.count) - r.volume;
  r.normalized_error = r.error / detail::ipow(t, box.d - 1);
  r.per_axis_delta_tilde.reserve(x.size());
  const double td = box.a * t;
  for (double xi : x) r.per_axis_delta_tilde.push_back(delta_tilde(td, xi));
  if (box.a == 1.0) {
    double sum = 0.0;
    for (double dt : r.per_axis_delta_tilde) sum += dt;
    r.delta = std::ldexp(sum, box.d - 1);
  }
  r.boundary_degenerate = boundary_degenerate(box, t, x);
  return r;
}

}  // namespace latbox
