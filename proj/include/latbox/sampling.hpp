#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "latbox/errors.hpp"
#include "latbox/lattice.hpp"
#include "latbox/limit_laws.hpp"
#include "latbox/rng.hpp"

// Monte Carlo engine for the distribution of the reduced statistic Delta
// and the normalized error R/t^(d-1) under the two randomization regimes.
//
// The dilation is drawn as t = T * xi with xi ~ rho on [0, 1]; rho defaults
// to Uniform(0, 1), matching the equidistribution window of the limit
// theorems. Samples are generated in fixed chunks of 4096, each chunk with
// its own RNG stream derived from the batch seed, so output is bit
// identical for any worker count.
//
// The normalized error is evaluated through the telescoped product
//
//     R = prod_i (2t + delta_i) - (2t)^d
//       = sum_k [ prod_{i<k} (2t + delta_i) ] * delta_k * (2t)^(d-1-k),
//
// which never forms the two nearly equal d-th powers and so keeps full
// relative accuracy at large t where the direct difference would lose
// most of its digits.

namespace latbox {

inline constexpr std::uint64_t kChunkSamples = 4096;

// Density of the dilation fraction xi = t / T on [0, 1]. Either the exact
// Uniform(0, 1) or a piecewise linear density given by knots.
class RhoSpec {
 public:
  RhoSpec() = default;  // Uniform(0, 1)

  static RhoSpec uniform01() { return RhoSpec(); }

  static RhoSpec tabulated(std::vector<double> knots, std::vector<double> values) {
    if (knots.size() < 2 || knots.size() != values.size())
      throw std::invalid_argument("RhoSpec: need matching knot/value lists, length >= 2");
    if (knots.front() != 0.0 || knots.back() != 1.0)
      throw std::invalid_argument("RhoSpec: knots must start at 0 and end at 1");
    double mass = 0.0;
    for (std::size_t i = 0; i < knots.size(); ++i) {
      if (!std::isfinite(knots[i]) || !std::isfinite(values[i]))
        throw std::invalid_argument("RhoSpec: knots and values must be finite");
      if (values[i] < 0.0) throw std::invalid_argument("RhoSpec: density values must be >= 0");
      if (i > 0) {
        if (!(knots[i] > knots[i - 1]))
          throw std::invalid_argument("RhoSpec: knots must be strictly increasing");
        mass += 0.5 * (values[i] + values[i - 1]) * (knots[i] - knots[i - 1]);
      }
    }
    if (std::fabs(mass - 1.0) > 1e-6)
      throw std::invalid_argument("RhoSpec: trapezoid mass " + std::to_string(mass) +
                                  " is not 1 within 1e-6");
    RhoSpec r;
    r.uniform_ = false;
    r.knots_ = std::move(knots);
    r.values_ = std::move(values);
    // Rescale so the piecewise CDF ends at 1; already-normalized inputs
    // (e.g. a spec reloaded from disk) pass through bit for bit.
    if (std::fabs(mass - 1.0) > 1e-12)
      for (double& v : r.values_) v /= mass;
    return r;
  }

  bool is_uniform() const { return uniform_; }
  const std::vector<double>& knots() const { return knots_; }
  const std::vector<double>& values() const { return values_; }

  std::string describe() const {
    if (uniform_) return "uniform01";
    return "tabulated(" + std::to_string(knots_.size()) + " knots)";
  }

 private:
  bool uniform_ = true;
  std::vector<double> knots_;
  std::vector<double> values_;
};

// Inverse-CDF sampler for a RhoSpec. The CDF restricted to one linear
// segment is quadratic; its inverse is evaluated in the subtraction-free
// form xi = 2r / (v0 + sqrt(v0^2 + 4 a r)), a = (v1 - v0)/(2w), which
// degrades gracefully to r/v0 on flat segments.
class RhoSampler {
 public:
  explicit RhoSampler(const RhoSpec& spec) : spec_(spec) {
    if (spec.is_uniform()) return;
    const auto& k = spec.knots();
    const auto& v = spec.values();
    cum_.resize(k.size());
    cum_[0] = 0.0;
    for (std::size_t i = 1; i < k.size(); ++i)
      cum_[i] = cum_[i - 1] + 0.5 * (v[i] + v[i - 1]) * (k[i] - k[i - 1]);
    cum_.back() = 1.0;
  }

  bool is_uniform() const { return spec_.is_uniform(); }

  double quantile(double r) const {
    if (!(r >= 0.0 && r < 1.0)) throw std::domain_error("quantile: r must be in [0, 1)");
    if (spec_.is_uniform()) return r;
    const auto& k = spec_.knots();
    const auto& v = spec_.values();
    const auto it = std::upper_bound(cum_.begin(), cum_.end(), r);
    const std::size_t seg = std::min(static_cast<std::size_t>(it - cum_.begin()),
                                     cum_.size() - 1) - 1;
    const double rr = r - cum_[seg];
    const double w = k[seg + 1] - k[seg];
    const double v0 = v[seg];
    const double a = (v[seg + 1] - v0) / (2.0 * w);
    const double disc = std::sqrt(v0 * v0 + 4.0 * a * rr);
    const double denom = v0 + disc;
    const double xi = denom > 0.0 ? 2.0 * rr / denom : 0.0;
    return k[seg] + std::min(xi, w);
  }

 private:
  RhoSpec spec_;
  std::vector<double> cum_;
};

// One dilation draw t = T * xi, kept strictly positive: the uniform case
// maps u to 1 - u so the window endpoint T is attainable and 0 is not, and
// the tabulated case clamps the measure-zero xi = 0 draw away from zero.
inline double sample_t(Xoshiro256pp& rng, double T, const RhoSampler& rho) {
  const double u = rng.uniform01();
  if (rho.is_uniform()) return T * (1.0 - u);
  double t = T * rho.quantile(u);
  if (!(t > 0.0)) t = std::numeric_limits<double>::min();
  return t;
}

enum class ScenarioKind { diagonal, iid_uniform };

inline std::string scenario_name(ScenarioKind k) {
  return k == ScenarioKind::diagonal ? "diagonal" : "iid_uniform";
}

struct Scenario {
  ScenarioKind kind = ScenarioKind::diagonal;
  int d = 1;
  double x0 = 0.0;  // axis translation; diagonal regime only
  RhoSpec rho = RhoSpec::uniform01();

  static Scenario diagonal(int d, double x0, RhoSpec rho = RhoSpec::uniform01()) {
    if (d < 1 || d > 20) throw std::invalid_argument("Scenario: d must be in [1, 20]");
    if (!std::isfinite(x0)) throw std::domain_error("Scenario: x0 must be finite");
    Scenario s;
    s.kind = ScenarioKind::diagonal;
    s.d = d;
    s.x0 = x0;
    s.rho = std::move(rho);
    return s;
  }

  static Scenario iid_uniform(int d, RhoSpec rho = RhoSpec::uniform01()) {
    if (d < 1 || d > 20) throw std::invalid_argument("Scenario: d must be in [1, 20]");
    Scenario s;
    s.kind = ScenarioKind::iid_uniform;
    s.d = d;
    s.x0 = 0.0;
    s.rho = std::move(rho);
    return s;
  }

  std::string name() const { return scenario_name(kind); }
};

struct SampleBatch {
  Scenario scenario;
  double T = 0.0;
  std::uint64_t n = 0;
  std::uint64_t seed = 0;
  std::vector<double> t_values;
  std::vector<double> delta_samples;
  std::vector<double> normalized_error_samples;
};

struct GenerateOptions {
  int workers = 1;
  std::uint64_t max_samples = 100000000ULL;
};

namespace detail {

// Draw order within a sample is fixed (t, then the translation coords for
// the iid regime); consumption per sample is constant, so chunk streams
// stay aligned regardless of how chunks are scheduled.
inline void fill_chunk(const Scenario& sc, double T, const RhoSampler& rho,
                       std::uint64_t seed, std::uint64_t chunk, std::uint64_t lo,
                       std::uint64_t hi, SampleBatch& out) {
  Xoshiro256pp rng(derive_stream_seed(seed, chunk));
  const int d = sc.d;
  const double ld = std::ldexp(1.0, d - 1);
  std::vector<double> dts(static_cast<std::size_t>(d));

  for (std::uint64_t idx = lo; idx < hi; ++idx) {
    const double t = sample_t(rng, T, rho);

    bool degenerate = false;
    double sum_dt = 0.0;
    const double two_t = 2.0 * t;
    double err = 0.0;     // telescoped R
    double prefix = 1.0;  // product of axis counts seen so far
    for (int i = 0; i < d; ++i) {
      const double xi = sc.kind == ScenarioKind::diagonal ? sc.x0 : rng.uniform01();
      const double dt = std::floor(t + xi) - std::ceil(-t + xi) + 1.0 - two_t;
      dts[static_cast<std::size_t>(i)] = dt;
      sum_dt += dt;
      if (near_integer(t + xi) || near_integer(t - xi)) degenerate = true;
      err += prefix * dt * ipow(two_t, d - 1 - i);
      prefix *= two_t + dt;
    }

    if (!degenerate) {
      for (double dt : dts)
        if (!(dt > -1.0 && dt <= 1.0))
          throw std::logic_error("generate_batch: delta_tilde outside (-1, 1]");
    }

    const double delta_val = ld * sum_dt;
    const double norm_err = err / ipow(t, d - 1);
    if (!degenerate && t >= 0.5) {
      const double gap = std::fabs(norm_err - delta_val);
      if (gap > reduction_gap_bound(d, t) * (1.0 + 1e-9) + 1e-9)
        throw std::logic_error("generate_batch: reduction bound violated");
    }

    out.t_values[idx] = t;
    out.delta_samples[idx] = delta_val;
    out.normalized_error_samples[idx] = norm_err;
  }
}

}  // namespace detail

inline SampleBatch generate_batch(const Scenario& sc, double T, std::uint64_t n,
                                  std::uint64_t seed,
                                  const GenerateOptions& opts = {}) {
  if (!(T > 0.0) || !std::isfinite(T)) throw std::domain_error("generate_batch: T must be positive");
  if (n == 0) throw std::invalid_argument("generate_batch: n must be >= 1");
  if (n > opts.max_samples)
    throw resource_error("generate_batch: n = " + std::to_string(n) +
                         " exceeds max_samples = " + std::to_string(opts.max_samples));
  if (opts.workers < 1) throw std::invalid_argument("generate_batch: workers must be >= 1");

  SampleBatch batch;
  batch.scenario = sc;
  batch.T = T;
  batch.n = n;
  batch.seed = seed;
  batch.t_values.resize(n);
  batch.delta_samples.resize(n);
  batch.normalized_error_samples.resize(n);

  const RhoSampler rho(sc.rho);
  const std::uint64_t nchunks = (n + kChunkSamples - 1) / kChunkSamples;

  if (opts.workers == 1 || nchunks == 1) {
    for (std::uint64_t c = 0; c < nchunks; ++c)
      detail::fill_chunk(sc, T, rho, seed, c, c * kChunkSamples,
                         std::min(n, (c + 1) * kChunkSamples), batch);
    return batch;
  }

  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&]() {
    try {
      while (true) {
        const std::uint64_t c = next.fetch_add(1);
        if (c >= nchunks || failed.load()) break;
        detail::fill_chunk(sc, T, rho, seed, c, c * kChunkSamples,
                           std::min(n, (c + 1) * kChunkSamples), batch);
      }
    } catch (...) {
      if (!failed.exchange(true)) failure = std::current_exception();
    }
  };
  std::vector<std::thread> pool;
  const int nw = std::min<int>(opts.workers, static_cast<int>(nchunks));
  pool.reserve(static_cast<std::size_t>(nw));
  for (int w = 0; w < nw; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return batch;
}

struct EmpiricalCf {
  std::vector<double> u;
  std::vector<double> real;
  std::vector<double> imag;
};

inline EmpiricalCf empirical_cf(const std::vector<double>& samples,
                                const std::vector<double>& u_grid) {
  if (samples.empty()) throw std::invalid_argument("empirical_cf: no samples");
  EmpiricalCf cf;
  cf.u = u_grid;
  cf.real.resize(u_grid.size());
  cf.imag.resize(u_grid.size());
  const double inv_n = 1.0 / static_cast<double>(samples.size());
  for (std::size_t k = 0; k < u_grid.size(); ++k) {
    double re = 0.0, im = 0.0;
    for (double z : samples) {
      re += std::cos(u_grid[k] * z);
      im += std::sin(u_grid[k] * z);
    }
    cf.real[k] = re * inv_n;
    cf.imag[k] = im * inv_n;
  }
  return cf;
}

// Two-sided Kolmogorov distance between the empirical CDF of the samples
// and a reference CDF: the empirical CDF jumps at each order statistic, so
// both the pre- and post-jump values are compared.
inline double ks_distance(std::vector<double> samples,
                          const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("ks_distance: no samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double dist = 0.0;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const double F = cdf(samples[k]);
    const double hi = (static_cast<double>(k) + 1.0) / n - F;
    const double lo = F - static_cast<double>(k) / n;
    dist = std::max(dist, std::max(std::fabs(hi), std::fabs(lo)));
  }
  return dist;
}

using LimitLaw = std::variant<DiagonalLaw, IidUniformLaw>;

inline LimitLaw limit_law_for(const Scenario& sc) {
  if (sc.kind == ScenarioKind::diagonal)
    return DiagonalLaw::from_translation(sc.d, sc.x0);
  return IidUniformLaw(sc.d);
}

inline double law_cf(const LimitLaw& law, double u) {
  return std::visit([&](const auto& l) { return l.cf(u); }, law);
}
inline double law_pdf(const LimitLaw& law, double z) {
  return std::visit([&](const auto& l) { return l.pdf(z); }, law);
}
inline double law_cdf(const LimitLaw& law, double z) {
  return std::visit([&](const auto& l) { return l.cdf(z); }, law);
}
inline double law_variance(const LimitLaw& law) {
  return std::visit([](const auto& l) { return l.variance(); }, law);
}
inline double law_support_radius(const LimitLaw& law) {
  return std::visit([](const auto& l) { return l.support_radius(); }, law);
}
inline int law_dimension(const LimitLaw& law) {
  return std::visit([](const auto& l) { return l.dimension(); }, law);
}
inline std::vector<double> law_breakpoints(const LimitLaw& law) {
  return std::visit([](const auto& l) { return pdf_breakpoints(l); }, law);
}

// u in [-20, 20] with step 1/4 (161 points), exact in binary.
inline std::vector<double> default_u_grid() {
  std::vector<double> u(161);
  for (int k = 0; k < 161; ++k) u[static_cast<std::size_t>(k)] = -20.0 + 0.25 * k;
  return u;
}

struct ComparisonReport {
  double T = 0.0;
  std::uint64_t n = 0;
  std::uint64_t seed = 0;
  double ks_delta = 0.0;       // KS distance, Delta samples vs limit CDF
  double ks_error = 0.0;       // KS distance, normalized error vs limit CDF
  double cf_sup_gap = 0.0;     // sup_u |empirical CF - limit CF| over the grid
  double mean = 0.0;           // sample mean of Delta
  double variance = 0.0;       // unbiased sample variance of Delta
};

inline ComparisonReport compare_batch(const SampleBatch& batch, const LimitLaw& law,
                                      const std::vector<double>& u_grid = default_u_grid()) {
  if (batch.n == 0 || batch.delta_samples.size() != batch.n)
    throw std::invalid_argument("compare_batch: batch is empty or inconsistent");
  if (law_dimension(law) != batch.scenario.d)
    throw std::invalid_argument("compare_batch: law dimension does not match batch");
  const bool law_is_diag = std::holds_alternative<DiagonalLaw>(law);
  if (law_is_diag != (batch.scenario.kind == ScenarioKind::diagonal))
    throw std::invalid_argument("compare_batch: law family does not match scenario");
  if (law_is_diag) {
    const double want = gap_y(batch.scenario.x0);
    if (std::fabs(std::get<DiagonalLaw>(law).y() - want) > 1e-12)
      throw std::invalid_argument("compare_batch: law gap parameter does not match x0");
  }

  ComparisonReport rep;
  rep.T = batch.T;
  rep.n = batch.n;
  rep.seed = batch.seed;
  auto F = [&](double z) { return law_cdf(law, z); };
  rep.ks_delta = ks_distance(batch.delta_samples, F);
  rep.ks_error = ks_distance(batch.normalized_error_samples, F);

  const EmpiricalCf ecf = empirical_cf(batch.delta_samples, u_grid);
  double gap = 0.0;
  for (std::size_t k = 0; k < u_grid.size(); ++k) {
    const double dre = ecf.real[k] - law_cf(law, u_grid[k]);
    const double dim = ecf.imag[k];
    gap = std::max(gap, std::hypot(dre, dim));
  }
  rep.cf_sup_gap = gap;

  double mean = 0.0;
  for (double z : batch.delta_samples) mean += z;
  mean /= static_cast<double>(batch.n);
  double ss = 0.0;
  for (double z : batch.delta_samples) ss += (z - mean) * (z - mean);
  rep.mean = mean;
  rep.variance = batch.n > 1 ? ss / static_cast<double>(batch.n - 1) : 0.0;
  return rep;
}

inline ComparisonReport compare_batch(const SampleBatch& batch) {
  return compare_batch(batch, limit_law_for(batch.scenario));
}

// One comparison per window length; each T gets its own seed derived from
// the master so reports are independent and individually reproducible.
inline std::vector<ComparisonReport> convergence_sweep(
    const Scenario& sc, const std::vector<double>& T_grid, std::uint64_t n_per_T,
    std::uint64_t master_seed, const GenerateOptions& opts = {}) {
  if (T_grid.size() < 2)
    throw std::invalid_argument("convergence_sweep: need at least 2 window lengths");
  for (std::size_t j = 1; j < T_grid.size(); ++j)
    if (!(T_grid[j] > T_grid[j - 1]))
      throw std::invalid_argument("convergence_sweep: T grid must be strictly increasing");

  const LimitLaw law = limit_law_for(sc);
  std::vector<ComparisonReport> reports;
  reports.reserve(T_grid.size());
  for (std::size_t j = 0; j < T_grid.size(); ++j) {
    const std::uint64_t seed_j = derive_stream_seed(master_seed, j);
    const SampleBatch batch = generate_batch(sc, T_grid[j], n_per_T, seed_j, opts);
    reports.push_back(compare_batch(batch, law));
  }
  return reports;
}

}  // namespace latbox
