#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "latbox/lattice.hpp"
#include "latbox/limit_laws.hpp"
#include "latbox/rng.hpp"
#include "latbox/sampling.hpp"

// Built-in verification suites: randomized cross-checks of the closed-form
// counting against direct enumeration, the per-axis discrepancy range, the
// reduction envelope, characteristic function axioms and factorizations,
// and quadrature consistency between each law's density and its closed-form
// transform. The quick set finishes in seconds; the full set is the same
// checks at larger draw counts and denser grids.

namespace latbox {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct VerifyOptions {
  bool full = false;
  std::uint64_t seed = 0x00C0FFEE5EEDULL;
};

namespace detail {

inline std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline double uniform_range(Xoshiro256pp& rng, double lo, double hi) {
  return lo + (hi - lo) * rng.uniform01();
}

}  // namespace detail

// Closed-form count against direct enumeration of the candidate grid, over
// random dilations and translations for each (d, a) combination.
inline std::vector<CheckResult> verify_counting_equivalence(const VerifyOptions& opts) {
  const int per_combo = opts.full ? 400 : 60;
  Xoshiro256pp rng(derive_stream_seed(opts.seed, 1));
  std::vector<CheckResult> out;
  for (int d : {1, 2, 3}) {
    for (double a : {0.5, 1.0, 2.0}) {
      const BoxSpec box(d, a);
      int mismatches = 0;
      double worst_t = 0.0;
      for (int i = 0; i < per_combo; ++i) {
        const double t = detail::uniform_range(rng, 1e-3, 15.0);
        Translation x(static_cast<std::size_t>(d));
        for (auto& xi : x) xi = detail::uniform_range(rng, -2.0, 2.0);
        if (count_points(box, t, x) != count_points_bruteforce(box, t, x)) {
          ++mismatches;
          worst_t = t;
        }
      }
      CheckResult r;
      r.name = "counting/closed-form-vs-enumeration d=" + std::to_string(d) +
               " a=" + detail::fmt_g(a);
      r.pass = mismatches == 0;
      r.detail = mismatches == 0
                     ? std::to_string(per_combo) + " instances agree"
                     : std::to_string(mismatches) + " mismatches (e.g. t=" +
                           detail::fmt_g(worst_t) + ")";
      out.push_back(std::move(r));
    }
  }
  return out;
}

// delta_tilde stays in (-1, 1] over random (t, x).
inline std::vector<CheckResult> verify_delta_range(const VerifyOptions& opts) {
  const std::uint64_t draws = opts.full ? 2000000 : 200000;
  Xoshiro256pp rng(derive_stream_seed(opts.seed, 2));
  std::uint64_t violations = 0;
  double lo = 1.0, hi = -1.0;
  for (std::uint64_t i = 0; i < draws; ++i) {
    const double t = detail::uniform_range(rng, 1e-6, 1000.0);
    const double x = detail::uniform_range(rng, -1000.0, 1000.0);
    const double dt = delta_tilde(t, x);
    lo = std::min(lo, dt);
    hi = std::max(hi, dt);
    if (!(dt > -1.0 && dt <= 1.0)) ++violations;
  }
  CheckResult r;
  r.name = "range/delta-tilde-in-(-1,1]";
  r.pass = violations == 0;
  r.detail = std::to_string(draws) + " draws, observed [" + detail::fmt_g(lo) + ", " +
             detail::fmt_g(hi) + "], " + std::to_string(violations) + " violations";
  return {r};
}

// |R/t^(d-1) - Delta| <= reduction_gap_bound(d, t) over random instances,
// plus monotone decay of the observed sup gap along t = 10, 100, 1000, 10000.
inline std::vector<CheckResult> verify_reduction_envelope(const VerifyOptions& opts) {
  const int draws = opts.full ? 10000 : 2000;
  const int sup_draws = opts.full ? 2000 : 300;
  Xoshiro256pp rng(derive_stream_seed(opts.seed, 3));
  std::vector<CheckResult> out;

  int violations = 0;
  double worst_ratio = 0.0;
  int checked = 0;
  for (int i = 0; i < draws; ++i) {
    const int d = 1 + static_cast<int>(rng.uniform01() * 5.0);
    const double t = std::exp(detail::uniform_range(rng, 0.0, std::log(1000.0)));
    const BoxSpec box(d, 1.0);
    Translation x(static_cast<std::size_t>(d));
    for (auto& xi : x) xi = detail::uniform_range(rng, -10.0, 10.0);
    if (boundary_degenerate(box, t, x)) continue;
    ++checked;
    const double gap = std::fabs(normalized_error(box, t, x) - delta(box, t, x));
    const double bound = reduction_gap_bound(d, t);
    if (bound > 0.0) worst_ratio = std::max(worst_ratio, gap / bound);
    if (gap > bound * (1.0 + 1e-9) + 1e-9) ++violations;
  }
  {
    CheckResult r;
    r.name = "reduction/gap-within-envelope";
    r.pass = violations == 0;
    r.detail = std::to_string(checked) + " instances, worst gap/bound = " +
               detail::fmt_g(worst_ratio) + ", " + std::to_string(violations) +
               " violations";
    out.push_back(std::move(r));
  }

  // At integer t every axis discrepancy vanishes, so probe each decade with
  // random dilations t in [10^k, 2*10^k) rather than the exact power.
  for (int d : {2, 3}) {
    const BoxSpec box(d, 1.0);
    std::vector<double> sup(4, 0.0);
    for (int k = 0; k < 4; ++k) {
      double decade = 10.0;
      for (int j = 0; j < k; ++j) decade *= 10.0;
      for (int i = 0; i < sup_draws; ++i) {
        const double t = decade * (1.0 + rng.uniform01());
        Translation x(static_cast<std::size_t>(d));
        for (auto& xi : x) xi = rng.uniform01();
        if (boundary_degenerate(box, t, x)) continue;
        sup[static_cast<std::size_t>(k)] =
            std::max(sup[static_cast<std::size_t>(k)],
                     std::fabs(normalized_error(box, t, x) - delta(box, t, x)));
      }
    }
    bool decreasing = true;
    for (int k = 1; k < 4; ++k)
      if (!(sup[static_cast<std::size_t>(k)] < sup[static_cast<std::size_t>(k - 1)]))
        decreasing = false;
    CheckResult r;
    r.name = "reduction/sup-gap-decays d=" + std::to_string(d);
    r.pass = decreasing;
    r.detail = "sup gaps per decade t ~ 10^{1..4}: " + detail::fmt_g(sup[0]) + ", " +
               detail::fmt_g(sup[1]) + ", " + detail::fmt_g(sup[2]) + ", " +
               detail::fmt_g(sup[3]);
    out.push_back(std::move(r));
  }
  return out;
}

// phi(0) = 1, |phi| <= 1, evenness, the y <-> 1-y symmetry of the diagonal
// law, and the factorizations through the axis characteristic functions.
inline std::vector<CheckResult> verify_cf_axioms(const VerifyOptions& opts) {
  const double step = opts.full ? 0.002 : 0.01;
  std::vector<CheckResult> out;

  auto check_law = [&](const std::string& label, auto&& cf) {
    bool pass = std::fabs(cf(0.0) - 1.0) <= 1e-15;
    double worst = 0.0;
    std::string why;
    if (!pass) why = "phi(0) != 1";
    for (double u = 0.0; u <= 50.0 && pass; u += step) {
      const double p = cf(u);
      const double m = cf(-u);
      worst = std::max(worst, std::fabs(p));
      if (std::fabs(p) > 1.0 + 1e-12) {
        pass = false;
        why = "|phi(" + detail::fmt_g(u) + ")| = " + detail::fmt_g(std::fabs(p));
      } else if (std::fabs(p - m) > 1e-15) {
        pass = false;
        why = "phi not even at u=" + detail::fmt_g(u);
      }
    }
    CheckResult r;
    r.name = "cf/axioms " + label;
    r.pass = pass;
    r.detail = pass ? "sup |phi| = " + detail::fmt_g(worst) + " on [-50, 50]" : why;
    out.push_back(std::move(r));
  };

  for (int d : {1, 2, 3}) {
    for (double y : {0.0, 0.25, 0.5, 0.7, 1.0}) {
      const DiagonalLaw law(d, y);
      check_law("diagonal d=" + std::to_string(d) + " y=" + detail::fmt_g(y),
                [&](double u) { return law.cf(u); });
    }
    const IidUniformLaw law(d);
    check_law("iid_uniform d=" + std::to_string(d),
              [&](double u) { return law.cf(u); });
  }

  {
    bool pass = true;
    std::string why;
    for (int d : {1, 2, 3, 4}) {
      const double b = static_cast<double>(d) * std::ldexp(1.0, d - 1);
      const double s = std::ldexp(1.0, d - 1);
      for (double u = -30.0; u <= 30.0 && pass; u += 0.37) {
        for (double y : {0.0, 0.2, 0.5, 0.9, 1.0}) {
          const DiagonalLaw diag(d, y);
          const DiagonalLaw mirror(d, 1.0 - y);
          if (std::fabs(diag.cf(u) - axis_cf_fixed(b * u, y)) > 1e-14 ||
              std::fabs(diag.cf(u) - mirror.cf(u)) > 1e-14) {
            pass = false;
            why = "diagonal identity fails at d=" + std::to_string(d) +
                  " y=" + detail::fmt_g(y) + " u=" + detail::fmt_g(u);
            break;
          }
        }
        const IidUniformLaw iid(d);
        double prod = 1.0;
        for (int i = 0; i < d; ++i) prod *= axis_cf_uniform(s * u);
        if (std::fabs(iid.cf(u) - prod) > 1e-14) {
          pass = false;
          why = "iid factorization fails at d=" + std::to_string(d) +
                " u=" + detail::fmt_g(u);
        }
      }
    }
    CheckResult r;
    r.name = "cf/factorization-and-symmetry";
    r.pass = pass;
    r.detail = pass ? "axis-factor identities hold to 1e-14" : why;
    out.push_back(std::move(r));
  }
  return out;
}

// The Fourier transform of each law's density, computed by piecewise
// quadrature, reproduces the closed-form characteristic function; the
// quadrature second moment reproduces the closed-form variance.
inline std::vector<CheckResult> verify_density_consistency(const VerifyOptions& opts) {
  std::vector<CheckResult> out;
  std::vector<double> us;
  if (opts.full) {
    for (double u = -50.0; u <= 50.0; u += 2.5) us.push_back(u);
  } else {
    us = {-40.0, -17.5, -5.0, -1.3, 0.0, 0.6, 3.0, 12.0, 33.0};
  }

  auto check_law = [&](const std::string& label, const LimitLaw& law) {
    const auto bp = law_breakpoints(law);
    auto pdf = [&](double z) { return law_pdf(law, z); };
    double sup = 0.0;
    for (double u : us)
      sup = std::max(sup, std::fabs(cf_from_density(pdf, bp, u) - law_cf(law, u)));
    auto second = [&](double z) { return z * z * law_pdf(law, z); };
    const double var_quad = integrate_piecewise(second, bp, 1e-10, 4);
    const double var_gap = std::fabs(var_quad - law_variance(law));

    CheckResult r;
    r.name = "density/transform-matches-cf " + label;
    r.pass = sup <= 1e-6 && var_gap <= 1e-8 * std::max(1.0, law_variance(law));
    r.detail = "sup cf gap = " + detail::fmt_g(sup) +
               ", variance gap = " + detail::fmt_g(var_gap);
    out.push_back(std::move(r));
  };

  for (int d : {1, 2, 3}) {
    for (double y : {0.0, 0.25, 0.5, 1.0})
      check_law("diagonal d=" + std::to_string(d) + " y=" + detail::fmt_g(y),
                LimitLaw(DiagonalLaw(d, y)));
    check_law("iid_uniform d=" + std::to_string(d), LimitLaw(IidUniformLaw(d)));
  }
  return out;
}

inline std::vector<CheckResult> run_all_checks(const VerifyOptions& opts = {}) {
  std::vector<CheckResult> all;
  for (auto* suite : {&verify_counting_equivalence, &verify_delta_range,
                      &verify_reduction_envelope, &verify_cf_axioms,
                      &verify_density_consistency}) {
    auto part = (*suite)(opts);
    all.insert(all.end(), part.begin(), part.end());
  }
  return all;
}

}  // namespace latbox
