#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <variant>
#include <vector>

#include "latbox/sampling.hpp"

using namespace latbox;

TEST_CASE("rho spec validation") {
  CHECK(RhoSpec::uniform01().is_uniform());
  CHECK(RhoSpec::uniform01().describe() == "uniform01");

  const RhoSpec tri = RhoSpec::tabulated({0.0, 0.5, 1.0}, {0.0, 2.0, 0.0});
  CHECK_FALSE(tri.is_uniform());
  CHECK(tri.describe() == "tabulated(3 knots)");

  CHECK_THROWS_AS(RhoSpec::tabulated({0.0, 1.0}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(RhoSpec::tabulated({0.1, 1.0}, {1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(RhoSpec::tabulated({0.0, 0.9}, {1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(RhoSpec::tabulated({0.0, 0.5, 0.5, 1.0}, {1.0, 1.0, 1.0, 1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(RhoSpec::tabulated({0.0, 1.0}, {-0.5, 2.5}), std::invalid_argument);
  // Trapezoid mass 2, far from a probability density.
  CHECK_THROWS_AS(RhoSpec::tabulated({0.0, 1.0}, {2.0, 2.0}), std::invalid_argument);
  // Off by a little more than the tolerance.
  CHECK_THROWS_AS(RhoSpec::tabulated({0.0, 1.0}, {1.001, 1.001}), std::invalid_argument);
  // Within tolerance: accepted and renormalized.
  const RhoSpec close = RhoSpec::tabulated({0.0, 1.0}, {1.0000001, 1.0000001});
  CHECK(close.values()[0] == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("rho sampler inverse CDF") {
  // Triangle density 2 - 2|2x - 1|... no: knots (0, 0.5, 1), values (0, 2, 0)
  // give CDF 2x^2 on [0, 1/2] and 1 - 2(1-x)^2 on [1/2, 1].
  const RhoSampler tri{RhoSpec::tabulated({0.0, 0.5, 1.0}, {0.0, 2.0, 0.0})};
  CHECK(tri.quantile(0.0) == 0.0);
  CHECK(tri.quantile(0.125) == Catch::Approx(0.25).margin(1e-12));
  CHECK(tri.quantile(0.5) == Catch::Approx(0.5).margin(1e-12));
  CHECK(tri.quantile(0.875) == Catch::Approx(0.75).margin(1e-12));

  // Increasing ramp: CDF x^2, quantile sqrt(r).
  const RhoSampler ramp{RhoSpec::tabulated({0.0, 1.0}, {0.0, 2.0})};
  CHECK(ramp.quantile(0.49) == Catch::Approx(0.7).margin(1e-12));
  CHECK(ramp.quantile(0.0001) == Catch::Approx(0.01).margin(1e-12));

  // Flat segments reduce to linear interpolation.
  const RhoSampler flat{RhoSpec::uniform01()};
  CHECK(flat.quantile(0.3125) == 0.3125);

  CHECK_THROWS_AS(ramp.quantile(1.0), std::domain_error);
  CHECK_THROWS_AS(ramp.quantile(-0.1), std::domain_error);
}

TEST_CASE("dilation draws") {
  Xoshiro256pp rng(99);
  const RhoSampler uni{RhoSpec::uniform01()};
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double t = sample_t(rng, 10.0, uni);
    REQUIRE(t > 0.0);
    REQUIRE(t <= 10.0);
    sum += t;
  }
  CHECK(sum / 100000.0 == Catch::Approx(5.0).margin(0.05));

  const RhoSampler ramp{RhoSpec::tabulated({0.0, 1.0}, {0.0, 2.0})};
  sum = 0.0;
  for (int i = 0; i < 100000; ++i) sum += sample_t(rng, 1.0, ramp);
  CHECK(sum / 100000.0 == Catch::Approx(2.0 / 3.0).margin(0.005));
}

TEST_CASE("scenario construction") {
  const Scenario diag = Scenario::diagonal(2, 0.25);
  CHECK(diag.name() == "diagonal");
  CHECK(diag.d == 2);
  CHECK(diag.x0 == 0.25);

  const Scenario iid = Scenario::iid_uniform(3);
  CHECK(iid.name() == "iid_uniform");
  CHECK(iid.x0 == 0.0);

  CHECK_THROWS_AS(Scenario::diagonal(0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(Scenario::iid_uniform(21), std::invalid_argument);
  CHECK_THROWS_AS(Scenario::diagonal(1, std::nan("")), std::domain_error);
}

TEST_CASE("batch generation is deterministic and worker independent") {
  const Scenario sc = Scenario::iid_uniform(2);
  const SampleBatch a = generate_batch(sc, 50.0, 9000, 1234);
  const SampleBatch b = generate_batch(sc, 50.0, 9000, 1234);
  CHECK(a.t_values == b.t_values);
  CHECK(a.delta_samples == b.delta_samples);
  CHECK(a.normalized_error_samples == b.normalized_error_samples);

  GenerateOptions three;
  three.workers = 3;
  const SampleBatch c = generate_batch(sc, 50.0, 9000, 1234, three);
  CHECK(a.t_values == c.t_values);
  CHECK(a.delta_samples == c.delta_samples);
  CHECK(a.normalized_error_samples == c.normalized_error_samples);

  const SampleBatch d = generate_batch(sc, 50.0, 9000, 1235);
  CHECK(a.delta_samples != d.delta_samples);
}

TEST_CASE("batch samples respect ranges") {
  for (const Scenario& sc :
       {Scenario::diagonal(3, 0.37), Scenario::iid_uniform(3)}) {
    const SampleBatch batch = generate_batch(sc, 200.0, 20000, 5);
    const double radius = 3.0 * std::ldexp(1.0, 2);  // d * 2^(d-1)
    for (std::uint64_t i = 0; i < batch.n; ++i) {
      REQUIRE(batch.t_values[i] > 0.0);
      REQUIRE(batch.t_values[i] <= 200.0);
      REQUIRE(std::fabs(batch.delta_samples[i]) <= radius + 1e-9);
    }
  }
}

TEST_CASE("batch generation validation") {
  const Scenario sc = Scenario::diagonal(1, 0.0);
  CHECK_THROWS_AS(generate_batch(sc, 0.0, 10, 1), std::domain_error);
  CHECK_THROWS_AS(generate_batch(sc, 10.0, 0, 1), std::invalid_argument);
  GenerateOptions opts;
  opts.max_samples = 10;
  CHECK_THROWS_AS(generate_batch(sc, 10.0, 11, 1, opts), resource_error);
  opts = GenerateOptions{};
  opts.workers = 0;
  CHECK_THROWS_AS(generate_batch(sc, 10.0, 10, 1, opts), std::invalid_argument);
}

TEST_CASE("kolmogorov distance hand values") {
  auto ident = [](double z) { return std::min(1.0, std::max(0.0, z)); };
  CHECK(ks_distance({0.5}, ident) == Catch::Approx(0.5).margin(1e-15));
  CHECK(ks_distance({0.25, 0.75}, ident) == Catch::Approx(0.25).margin(1e-15));
  CHECK(ks_distance({0.1, 0.2, 0.3}, ident) ==
        Catch::Approx(0.7).margin(1e-15));
  CHECK_THROWS_AS(ks_distance({}, ident), std::invalid_argument);
}

TEST_CASE("empirical characteristic function") {
  const std::vector<double> u = {0.0, 1.5};
  const EmpiricalCf one = empirical_cf({1.0}, u);
  CHECK(one.real[0] == 1.0);
  CHECK(one.imag[0] == 0.0);
  CHECK(one.real[1] == Catch::Approx(std::cos(1.5)).margin(1e-15));
  CHECK(one.imag[1] == Catch::Approx(std::sin(1.5)).margin(1e-15));

  const EmpiricalCf sym = empirical_cf({-2.0, 2.0}, u);
  CHECK(sym.imag[1] == Catch::Approx(0.0).margin(1e-15));
  CHECK(sym.real[1] == Catch::Approx(std::cos(3.0)).margin(1e-15));
  CHECK_THROWS_AS(empirical_cf({}, u), std::invalid_argument);
}

TEST_CASE("limit law dispatch") {
  const LimitLaw diag = limit_law_for(Scenario::diagonal(2, 0.25));
  REQUIRE(std::holds_alternative<DiagonalLaw>(diag));
  CHECK(std::get<DiagonalLaw>(diag).y() == 0.5);
  CHECK(law_dimension(diag) == 2);
  CHECK(law_cf(diag, 0.0) == 1.0);
  CHECK(law_support_radius(diag) == 2.0);

  const LimitLaw iid = limit_law_for(Scenario::iid_uniform(3));
  REQUIRE(std::holds_alternative<IidUniformLaw>(iid));
  CHECK(law_variance(iid) == Catch::Approx(8.0).margin(1e-14));
  CHECK(law_breakpoints(iid).size() == 7);
}

TEST_CASE("default u grid") {
  const std::vector<double> u = default_u_grid();
  REQUIRE(u.size() == 161);
  CHECK(u.front() == -20.0);
  CHECK(u.back() == 20.0);
  CHECK(u[81] == 0.25);
}

TEST_CASE("batch comparison against its limit law") {
  const Scenario sc = Scenario::diagonal(1, 0.0);
  const SampleBatch batch = generate_batch(sc, 2000.0, 20000, 77);
  const ComparisonReport rep = compare_batch(batch);
  CHECK(rep.T == 2000.0);
  CHECK(rep.n == 20000);
  CHECK(rep.seed == 77);
  // d=1, y=1: the limit is Uniform(-1, 1), variance 1/3.
  CHECK(rep.ks_delta < 0.05);
  CHECK(rep.ks_error < 0.05);
  CHECK(rep.cf_sup_gap < 0.1);
  CHECK(rep.mean == Catch::Approx(0.0).margin(0.05));
  CHECK(rep.variance == Catch::Approx(1.0 / 3.0).epsilon(0.1));

  // Mismatched laws are rejected.
  CHECK_THROWS_AS(compare_batch(batch, LimitLaw(IidUniformLaw(1))),
                  std::invalid_argument);
  CHECK_THROWS_AS(compare_batch(batch, LimitLaw(DiagonalLaw(2, 1.0))),
                  std::invalid_argument);
  CHECK_THROWS_AS(compare_batch(batch, LimitLaw(DiagonalLaw(1, 0.5))),
                  std::invalid_argument);
}

TEST_CASE("convergence sweep") {
  const Scenario sc = Scenario::iid_uniform(1);
  const std::vector<double> Ts = {50.0, 500.0};
  const auto reports = convergence_sweep(sc, Ts, 4000, 9001);
  REQUIRE(reports.size() == 2);
  CHECK(reports[0].T == 50.0);
  CHECK(reports[1].T == 500.0);
  CHECK(reports[0].seed == derive_stream_seed(9001, 0));
  CHECK(reports[1].seed == derive_stream_seed(9001, 1));
  CHECK(reports[1].ks_delta < 0.1);

  CHECK_THROWS_AS(convergence_sweep(sc, {10.0}, 100, 1), std::invalid_argument);
  CHECK_THROWS_AS(convergence_sweep(sc, {10.0, 5.0}, 100, 1), std::invalid_argument);
}
