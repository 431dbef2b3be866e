#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "latbox/errors.hpp"
#include "latbox/lattice.hpp"

// Limit laws of the reduced statistic Delta under the two randomization
// regimes.
//
// Diagonal translation X = (x, ..., x), t uniform on (0, T], T -> infinity:
// with b = d * 2^(d-1) and y = |1 - 2{x}|, Delta converges to the mixture
//
//     Z = B * U,   U ~ Uniform(-1, 1),
//     B = b*y with probability y,  B = b*(1-y) with probability 1-y,
//
// whose characteristic function is
//
//     phi(u) = y * sinc(b u y) + (1 - y) * sinc(b u (1 - y)).
//
// The density is a sum of two centered boxes, (1/(2b)) * ( 1{|z| <= b y}
// + 1{|z| <= b (1-y)} ), degenerating to a single box when y is 0 or 1 and
// to two coincident boxes at y = 1/2.
//
// Independent translation X ~ Uniform([0,1)^d): each axis contributes an
// independent triangular-shaped factor and, with s = 2^(d-1),
//
//     phi(u) = [ 2 (1 - cos(s u)) / (s u)^2 ]^d,
//
// the characteristic function of s * (S - d) where S is an Irwin-Hall sum
// of 2d independent Uniform(0,1) variables. Density and CDF follow from
// the Irwin-Hall closed form, scaled and centered; support is [-s d, s d].

namespace latbox {

// sin(v)/v, continued through v = 0 by its Taylor polynomial. The quartic
// term keeps the switchover error below double rounding at |v| = 1e-4.
inline double sinc(double v) {
  const double av = std::fabs(v);
  if (av < 1e-4) {
    const double v2 = v * v;
    return 1.0 - v2 / 6.0 + v2 * v2 / 120.0;
  }
  return std::sin(v) / v;
}

// 2(1 - cos v)/v^2, written as sinc(v/2)^2 via 1 - cos v = 2 sin^2(v/2).
// The direct form cancels near cos v = 1 and can stray above 1 by ~1e-8;
// the squared form is exact at the axioms' edge |phi| <= 1.
inline double cosc(double v) {
  const double s = sinc(0.5 * v);
  return s * s;
}

// Characteristic function of delta_tilde(t, x) with t uniform on a long
// window, for a fixed axis translation x with gap parameter y = |1-2{x}|:
// delta_tilde is uniform on (-y, y) with probability y and uniform on
// (-(1-y), 1-y) with probability 1-y.
inline double axis_cf_fixed(double u, double y) {
  if (!(y >= 0.0 && y <= 1.0)) throw std::domain_error("gap parameter y must be in [0, 1]");
  return y * sinc(u * y) + (1.0 - y) * sinc(u * (1.0 - y));
}

// Same axis statistic with x additionally uniform on [0, 1): averaging
// axis_cf_fixed over y gives the triangular factor 2(1 - cos u)/u^2.
inline double axis_cf_uniform(double u) { return cosc(u); }

namespace detail {

inline double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

// Pairwise sum of the alternating Irwin-Hall series; the terms grow to
// ~binom(n, n/2) * (n/2)^(n-1) before cancelling, so summation order
// matters by n ~ 20.
inline double pairwise_sum(const std::vector<double>& v, std::size_t lo, std::size_t hi) {
  if (hi - lo <= 4) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += v[i];
    return s;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

}  // namespace detail

// Density of the sum of n independent Uniform(0,1) variables:
//
//     f(x) = 1/(n-1)! * sum_{k <= x} (-1)^k binom(n,k) (x-k)^(n-1).
inline double irwin_hall_pdf(double x, int n) {
  if (n < 1 || n > 40) throw std::invalid_argument("irwin_hall_pdf: n must be in [1, 40]");
  detail::require_finite(x, "x");
  if (x <= 0.0 || x >= static_cast<double>(n)) return 0.0;
  // The density is symmetric about n/2. Evaluating on the left half keeps
  // the leading term of the alternating sum within a modest factor of the
  // result; near the right edge the raw sum cancels catastrophically.
  if (2.0 * x > static_cast<double>(n)) x = static_cast<double>(n) - x;
  const int kmax = static_cast<int>(std::floor(x));
  std::vector<double> terms(static_cast<std::size_t>(kmax) + 1);
  for (int k = 0; k <= kmax; ++k) {
    const double term = static_cast<double>(detail::binom_u64(n, k)) *
                        detail::ipow(x - static_cast<double>(k), n - 1);
    terms[static_cast<std::size_t>(k)] = (k % 2 == 0) ? term : -term;
  }
  const double s = detail::pairwise_sum(terms, 0, terms.size());
  return std::max(0.0, s / detail::factorial(n - 1));
}

// CDF of the same sum: integrate the series term by term.
inline double irwin_hall_cdf(double x, int n) {
  if (n < 1 || n > 40) throw std::invalid_argument("irwin_hall_cdf: n must be in [1, 40]");
  detail::require_finite(x, "x");
  if (x <= 0.0) return 0.0;
  if (x >= static_cast<double>(n)) return 1.0;
  // Same reflection as the density: the right tail of the raw sum cancels
  // catastrophically, while 1 - F(n - x) stays accurate to roundoff.
  if (2.0 * x > static_cast<double>(n))
    return 1.0 - irwin_hall_cdf(static_cast<double>(n) - x, n);
  const int kmax = static_cast<int>(std::floor(x));
  std::vector<double> terms(static_cast<std::size_t>(kmax) + 1);
  for (int k = 0; k <= kmax; ++k) {
    const double term = static_cast<double>(detail::binom_u64(n, k)) *
                        detail::ipow(x - static_cast<double>(k), n);
    terms[static_cast<std::size_t>(k)] = (k % 2 == 0) ? term : -term;
  }
  const double s = detail::pairwise_sum(terms, 0, terms.size());
  return std::clamp(s / detail::factorial(n), 0.0, 1.0);
}

// Limit of Delta under the diagonal regime, parameterized by dimension and
// the axis translation's gap parameter y.
class DiagonalLaw {
 public:
  DiagonalLaw(int d, double y) : d_(d), y_(y) {
    if (d < 1 || d > 20) throw std::invalid_argument("DiagonalLaw: d must be in [1, 20]");
    if (!(y >= 0.0 && y <= 1.0)) throw std::domain_error("DiagonalLaw: y must be in [0, 1]");
    b_ = static_cast<double>(d) * std::ldexp(1.0, d - 1);
  }

  static DiagonalLaw from_translation(int d, double x0) {
    return DiagonalLaw(d, gap_y(x0));
  }

  int dimension() const { return d_; }
  double y() const { return y_; }
  double scale() const { return b_; }  // b = d * 2^(d-1)

  double cf(double u) const {
    detail::require_finite(u, "u");
    return y_ * sinc(b_ * u * y_) + (1.0 - y_) * sinc(b_ * u * (1.0 - y_));
  }

  // Mixture of Uniform(-b y, b y) (weight y) and Uniform(-b(1-y), b(1-y))
  // (weight 1-y): each box's weight equals its width over 2b, so the
  // density is 1/(2b) on each box's support, stacked where they overlap.
  double pdf(double z) const {
    detail::require_finite(z, "z");
    const double az = std::fabs(z);
    double v = 0.0;
    if (y_ > 0.0 && az <= b_ * y_) v += 1.0;
    if (y_ < 1.0 && az <= b_ * (1.0 - y_)) v += 1.0;
    return v / (2.0 * b_);
  }

  double cdf(double z) const {
    detail::require_finite(z, "z");
    auto box_cdf = [](double zz, double half) {
      if (half <= 0.0) return zz < 0.0 ? 0.0 : 1.0;  // point mass at 0
      if (zz <= -half) return 0.0;
      if (zz >= half) return 1.0;
      return (zz + half) / (2.0 * half);
    };
    return y_ * box_cdf(z, b_ * y_) + (1.0 - y_) * box_cdf(z, b_ * (1.0 - y_));
  }

  // E B^2 U^2 = (y (by)^2 + (1-y)(b(1-y))^2) / 3.
  double variance() const {
    const double y3 = y_ * y_ * y_;
    const double w = 1.0 - y_;
    return b_ * b_ * (y3 + w * w * w) / 3.0;
  }

  double support_radius() const { return b_ * std::max(y_, 1.0 - y_); }

 private:
  int d_;
  double y_;
  double b_;
};

// Limit of Delta under the iid-uniform regime: s * (S - d) with s = 2^(d-1)
// and S an Irwin-Hall sum of 2d uniforms.
class IidUniformLaw {
 public:
  explicit IidUniformLaw(int d) : d_(d) {
    if (d < 1 || d > 20) throw std::invalid_argument("IidUniformLaw: d must be in [1, 20]");
    s_ = std::ldexp(1.0, d - 1);
  }

  int dimension() const { return d_; }
  double scale() const { return s_; }  // s = 2^(d-1)

  double cf(double u) const {
    detail::require_finite(u, "u");
    return detail::ipow(cosc(s_ * u), d_);
  }

  double pdf(double z) const {
    detail::require_finite(z, "z");
    return irwin_hall_pdf(z / s_ + static_cast<double>(d_), 2 * d_) / s_;
  }

  double cdf(double z) const {
    detail::require_finite(z, "z");
    return irwin_hall_cdf(z / s_ + static_cast<double>(d_), 2 * d_);
  }

  // 2d uniforms, each of variance 1/12, scaled by s: d s^2 / 6.
  double variance() const { return static_cast<double>(d_) * s_ * s_ / 6.0; }

  double support_radius() const { return s_ * static_cast<double>(d_); }

 private:
  int d_;
  double s_;
};

// Abscissae where either law's density changes analytic form. Quadrature
// panels must not straddle these.
inline std::vector<double> pdf_breakpoints(const DiagonalLaw& law) {
  const double b = law.scale();
  std::vector<double> pts = {-b * law.y(), -b * (1.0 - law.y()), 0.0,
                             b * (1.0 - law.y()), b * law.y()};
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

inline std::vector<double> pdf_breakpoints(const IidUniformLaw& law) {
  const double s = law.scale();
  const int n = 2 * law.dimension();
  std::vector<double> pts;
  pts.reserve(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k)
    pts.push_back(s * (static_cast<double>(k) - static_cast<double>(law.dimension())));
  return pts;
}

enum class CurveKind { pdf, cdf, cf };

struct CurveTable {
  CurveKind kind = CurveKind::pdf;
  std::vector<double> arg;    // z for pdf/cdf, u for cf
  std::vector<double> value;
};

inline void validate(const CurveTable& table) {
  if (table.arg.size() != table.value.size())
    throw std::invalid_argument("CurveTable: column lengths differ");
  if (table.arg.empty()) throw std::invalid_argument("CurveTable: empty");
  for (std::size_t i = 1; i < table.arg.size(); ++i)
    if (!(table.arg[i] > table.arg[i - 1]))
      throw std::invalid_argument("CurveTable: abscissae must be strictly increasing");
}

template <class Law>
CurveTable make_pdf_table(const Law& law, const std::vector<double>& z) {
  CurveTable t;
  t.kind = CurveKind::pdf;
  t.arg = z;
  t.value.reserve(z.size());
  for (double zi : z) t.value.push_back(law.pdf(zi));
  validate(t);
  return t;
}

template <class Law>
CurveTable make_cdf_table(const Law& law, const std::vector<double>& z) {
  CurveTable t;
  t.kind = CurveKind::cdf;
  t.arg = z;
  t.value.reserve(z.size());
  for (double zi : z) t.value.push_back(law.cdf(zi));
  validate(t);
  return t;
}

template <class Law>
CurveTable make_cf_table(const Law& law, const std::vector<double>& u) {
  CurveTable t;
  t.kind = CurveKind::cf;
  t.arg = u;
  t.value.reserve(u.size());
  for (double ui : u) t.value.push_back(law.cf(ui));
  validate(t);
  return t;
}

namespace detail {

// 16-point Gauss-Legendre nodes/weights on [-1, 1], positive half.
inline constexpr double kGl16Node[8] = {
    0.0950125098376374402, 0.281603550779258913, 0.458016777657227386,
    0.617876244402643748,  0.755404408355003034, 0.865631202387831744,
    0.944575023073232576,  0.989400934991649933};
inline constexpr double kGl16Weight[8] = {
    0.189450610455068496,  0.182603415044923589,  0.169156519395002538,
    0.149595988816576732,  0.124628971255533872,  0.0951585116824927848,
    0.0622535239386478929, 0.0271524594117540949};

inline double gl16_panel(const std::function<double(double)>& f, double lo, double hi) {
  const double c = 0.5 * (lo + hi);
  const double h = 0.5 * (hi - lo);
  double s = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double dx = h * kGl16Node[i];
    s += kGl16Weight[i] * (f(c - dx) + f(c + dx));
  }
  return s * h;
}

}  // namespace detail

// Integrate f over [breakpoints.front(), breakpoints.back()] with composite
// 16-point Gauss-Legendre panels that respect the breakpoints. Panel counts
// double until two successive refinements agree to tol; panels_hint seeds
// the subdivision (use ~|u| panels per unit length for oscillatory
// integrands so each panel sees at most a few periods).
inline double integrate_piecewise(const std::function<double(double)>& f,
                                  const std::vector<double>& breakpoints,
                                  double tol = 1e-10, int panels_hint = 1,
                                  int max_doublings = 12) {
  if (breakpoints.size() < 2)
    throw std::invalid_argument("integrate_piecewise: need at least 2 breakpoints");
  for (std::size_t i = 1; i < breakpoints.size(); ++i)
    if (!(breakpoints[i] >= breakpoints[i - 1]))
      throw std::invalid_argument("integrate_piecewise: breakpoints must be nondecreasing");
  panels_hint = std::max(1, panels_hint);

  auto pass = [&](int per_piece) {
    double total = 0.0;
    for (std::size_t i = 1; i < breakpoints.size(); ++i) {
      const double lo = breakpoints[i - 1];
      const double hi = breakpoints[i];
      if (hi <= lo) continue;
      const double w = (hi - lo) / per_piece;
      for (int p = 0; p < per_piece; ++p)
        total += detail::gl16_panel(f, lo + p * w, lo + (p + 1) * w);
    }
    return total;
  };

  double prev = pass(panels_hint);
  for (int k = 1; k <= max_doublings; ++k) {
    const double cur = pass(panels_hint << k);
    if (std::fabs(cur - prev) <= tol) return cur;
    prev = cur;
  }
  throw numeric_error("integrate_piecewise: no convergence to tol " +
                      std::to_string(tol) + " after " +
                      std::to_string(max_doublings) + " refinements");
}

// Fourier transform of a compactly supported density evaluated at u:
// integral of pdf(z) cos(u z) over the support (densities here are even,
// so the sine part vanishes and is not computed). Used to cross-check the
// closed-form characteristic functions.
inline double cf_from_density(const std::function<double(double)>& pdf,
                              const std::vector<double>& breakpoints, double u,
                              double tol = 1e-8) {
  if (breakpoints.size() < 2)
    throw std::invalid_argument("cf_from_density: need at least 2 breakpoints");
  const double span = breakpoints.back() - breakpoints.front();
  // Keep each panel under ~half a period of cos(u z).
  const int hint = 1 + static_cast<int>(std::fabs(u) * span /
                                        (6.28318530717958648 * breakpoints.size()));
  auto integrand = [&](double z) { return pdf(z) * std::cos(u * z); };
  return integrate_piecewise(integrand, breakpoints, tol, hint);
}

}  // namespace latbox
