#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "latbox/limit_laws.hpp"

using namespace latbox;

TEST_CASE("sinc and cosc") {
  CHECK(sinc(0.0) == 1.0);
  CHECK(sinc(1.0) == Catch::Approx(0.841470984807896507).margin(1e-16));
  CHECK(sinc(2.0) == Catch::Approx(0.454648713412840848).margin(1e-16));
  CHECK(sinc(-2.0) == sinc(2.0));
  // Taylor branch joins the libm branch smoothly at the 1e-4 switchover.
  for (double v : {9.9e-5, 1.01e-4, 5e-5, 2e-4}) {
    CHECK(sinc(v) == Catch::Approx(std::sin(v) / v).margin(1e-15));
  }

  CHECK(cosc(0.0) == 1.0);
  CHECK(cosc(2.0) == Catch::Approx((1.0 - std::cos(2.0)) / 2.0).margin(1e-16));
  // The direct form 2(1-cos v)/v^2 cancels badly just above the Taylor
  // window; the squared-sinc form must stay within [0, 1] there.
  for (double v = 1e-4; v < 1e-2; v *= 1.37) {
    const double c = cosc(v);
    REQUIRE(c <= 1.0);
    REQUIRE(c > 0.999966);
  }
}

TEST_CASE("axis characteristic functions") {
  CHECK(axis_cf_fixed(0.0, 0.3) == 1.0);
  CHECK(axis_cf_fixed(1.0, 1.0) == Catch::Approx(0.841470984807896507).margin(1e-16));
  CHECK(axis_cf_fixed(1.0, 0.5) == Catch::Approx(0.958851077208406001).margin(1e-15));
  CHECK(axis_cf_fixed(2.0, 0.0) == Catch::Approx(sinc(2.0)).margin(1e-16));
  CHECK_THROWS_AS(axis_cf_fixed(1.0, 1.5), std::domain_error);

  CHECK(axis_cf_uniform(0.0) == 1.0);
  // 2(1 - cos(pi))/pi^2 = 4/pi^2.
  CHECK(axis_cf_uniform(3.14159265358979324) ==
        Catch::Approx(0.405284734569351086).margin(1e-15));
}

TEST_CASE("Irwin-Hall closed form") {
  CHECK(irwin_hall_pdf(2.0, 4) == Catch::Approx(2.0 / 3.0).margin(1e-15));
  CHECK(irwin_hall_cdf(1.5, 2) == Catch::Approx(0.875).margin(1e-15));
  CHECK(irwin_hall_pdf(3.7, 6) == Catch::Approx(0.351019166666666667).margin(1e-15));
  CHECK(irwin_hall_cdf(3.7, 6) == Catch::Approx(0.834602819444444444).margin(1e-15));
  CHECK(irwin_hall_pdf(0.25, 3) == Catch::Approx(0.03125).margin(1e-16));

  CHECK(irwin_hall_pdf(-0.5, 3) == 0.0);
  CHECK(irwin_hall_pdf(3.5, 3) == 0.0);
  CHECK(irwin_hall_cdf(-0.5, 3) == 0.0);
  CHECK(irwin_hall_cdf(3.5, 3) == 1.0);

  // Symmetry about n/2 and monotone CDF.
  for (int n : {2, 5, 8, 12}) {
    double prev = 0.0;
    for (double x = 0.05; x < n; x += 0.1) {
      CHECK(irwin_hall_pdf(x, n) ==
            Catch::Approx(irwin_hall_pdf(n - x, n)).margin(1e-12));
      const double c = irwin_hall_cdf(x, n);
      REQUIRE(c >= prev - 1e-13);
      prev = c;
    }
    CHECK(irwin_hall_cdf(0.5 * n, n) == Catch::Approx(0.5).margin(1e-12));
  }

  CHECK_THROWS_AS(irwin_hall_pdf(1.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(irwin_hall_cdf(1.0, 41), std::invalid_argument);
}

TEST_CASE("diagonal limit law") {
  const DiagonalLaw law(2, 0.25);
  CHECK(law.scale() == 4.0);
  CHECK(law.cf(0.0) == 1.0);
  // cf(u) = y sinc(b u y) + (1-y) sinc(b u (1-y)) with b = 4.
  for (double u : {-3.0, -0.4, 0.7, 11.0}) {
    CHECK(law.cf(u) ==
          Catch::Approx(0.25 * sinc(u) + 0.75 * sinc(3.0 * u)).margin(1e-15));
    CHECK(law.cf(u) == Catch::Approx(axis_cf_fixed(4.0 * u, 0.25)).margin(1e-15));
  }

  CHECK(law.pdf(0.5) == Catch::Approx(0.25).margin(1e-16));   // both boxes
  CHECK(law.pdf(2.0) == Catch::Approx(0.125).margin(1e-16));  // outer box only
  CHECK(law.pdf(3.5) == 0.0);
  CHECK(law.cdf(1.7) == Catch::Approx(0.8375).margin(1e-15));
  CHECK(law.cdf(-4.0) == 0.0);
  CHECK(law.cdf(4.0) == 1.0);
  CHECK(law.variance() == Catch::Approx(7.0 / 3.0).margin(1e-15));
  CHECK(law.support_radius() == 3.0);

  // Degenerate gap parameters collapse to a single box.
  for (double y : {0.0, 1.0}) {
    const DiagonalLaw edge(2, y);
    CHECK(edge.pdf(0.0) == Catch::Approx(0.125).margin(1e-16));
    CHECK(edge.cdf(0.0) == Catch::Approx(0.5).margin(1e-16));
    CHECK(edge.variance() == Catch::Approx(16.0 / 3.0).margin(1e-14));
    for (double u : {0.3, 2.0}) CHECK(edge.cf(u) == Catch::Approx(sinc(4.0 * u)).margin(1e-15));
  }

  CHECK_THROWS_AS(DiagonalLaw(2, 1.2), std::domain_error);
  CHECK_THROWS_AS(DiagonalLaw(0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(DiagonalLaw(21, 0.5), std::invalid_argument);
  CHECK(DiagonalLaw::from_translation(3, 0.25).y() == 0.5);
}

TEST_CASE("iid uniform limit law") {
  const IidUniformLaw d1(1);
  CHECK(d1.scale() == 1.0);
  CHECK(d1.pdf(0.0) == Catch::Approx(1.0).margin(1e-15));  // triangular peak
  CHECK(d1.cdf(0.0) == Catch::Approx(0.5).margin(1e-15));
  CHECK(d1.variance() == Catch::Approx(1.0 / 6.0).margin(1e-16));
  for (double u : {0.5, 2.0, 9.0}) CHECK(d1.cf(u) == Catch::Approx(cosc(u)).margin(1e-15));

  const IidUniformLaw d2(2);
  CHECK(d2.scale() == 2.0);
  CHECK(d2.pdf(1.3) == Catch::Approx(0.190739583333333333).margin(1e-15));
  CHECK(d2.cdf(1.3) == Catch::Approx(0.864104947916666667).margin(1e-15));
  CHECK(d2.variance() == Catch::Approx(4.0 / 3.0).margin(1e-15));
  CHECK(d2.support_radius() == 4.0);

  const IidUniformLaw d3(3);
  CHECK(d3.pdf(2.0) == Catch::Approx(0.109505208333333333).margin(1e-15));
  CHECK(d3.cdf(-5.5) == Catch::Approx(0.025076648924085829).margin(1e-15));
  CHECK(d3.variance() == Catch::Approx(8.0).margin(1e-14));
  CHECK(d3.support_radius() == 12.0);

  CHECK_THROWS_AS(IidUniformLaw(0), std::invalid_argument);
  CHECK_THROWS_AS(IidUniformLaw(21), std::invalid_argument);
}

TEST_CASE("density breakpoints") {
  CHECK(pdf_breakpoints(DiagonalLaw(2, 0.25)) ==
        std::vector<double>{-3.0, -1.0, 0.0, 1.0, 3.0});
  CHECK(pdf_breakpoints(DiagonalLaw(1, 0.0)) == std::vector<double>{-1.0, 0.0, 1.0});
  CHECK(pdf_breakpoints(IidUniformLaw(1)) == std::vector<double>{-1.0, 0.0, 1.0});
  CHECK(pdf_breakpoints(IidUniformLaw(2)) ==
        std::vector<double>{-4.0, -2.0, 0.0, 2.0, 4.0});
}

TEST_CASE("piecewise quadrature") {
  // Exact for polynomials far below the rule's degree.
  const double cubic = integrate_piecewise([](double x) { return x * x; }, {0.0, 1.0});
  CHECK(cubic == Catch::Approx(1.0 / 3.0).margin(1e-14));

  // Kink at 0 sits on a breakpoint, so each piece is a polynomial.
  const double vee = integrate_piecewise([](double x) { return std::fabs(x); },
                                         {-1.0, 0.0, 1.0});
  CHECK(vee == Catch::Approx(1.0).margin(1e-14));

  const double osc = integrate_piecewise([](double x) { return std::cos(40.0 * x); },
                                         {0.0, 1.0}, 1e-12, 8);
  CHECK(osc == Catch::Approx(std::sin(40.0) / 40.0).margin(1e-11));

  CHECK_THROWS_AS(integrate_piecewise([](double x) { return std::sqrt(std::fabs(x)); },
                                      {0.0, 1.0}, 1e-16, 1, 0),
                  numeric_error);
  CHECK_THROWS_AS(integrate_piecewise([](double) { return 1.0; }, {0.0}),
                  std::invalid_argument);
}

TEST_CASE("densities integrate to one and reproduce their transforms") {
  auto mass_of = [](const auto& law) {
    return integrate_piecewise([&](double z) { return law.pdf(z); },
                               pdf_breakpoints(law), 1e-12, 2);
  };
  CHECK(mass_of(DiagonalLaw(1, 1.0)) == Catch::Approx(1.0).margin(1e-12));
  CHECK(mass_of(DiagonalLaw(2, 0.25)) == Catch::Approx(1.0).margin(1e-12));
  CHECK(mass_of(DiagonalLaw(3, 0.5)) == Catch::Approx(1.0).margin(1e-12));
  CHECK(mass_of(IidUniformLaw(1)) == Catch::Approx(1.0).margin(1e-12));
  CHECK(mass_of(IidUniformLaw(2)) == Catch::Approx(1.0).margin(1e-12));
  CHECK(mass_of(IidUniformLaw(3)) == Catch::Approx(1.0).margin(1e-12));

  {
    const DiagonalLaw law(2, 0.25);
    const auto bp = pdf_breakpoints(law);
    for (double u : {0.0, 1.3, 7.0, 20.0}) {
      const double numeric =
          cf_from_density([&](double z) { return law.pdf(z); }, bp, u);
      CHECK(numeric == Catch::Approx(law.cf(u)).margin(1e-7));
    }
  }
  {
    const IidUniformLaw law(2);
    const auto bp = pdf_breakpoints(law);
    for (double u : {0.0, 1.3, 7.0, 20.0}) {
      const double numeric =
          cf_from_density([&](double z) { return law.pdf(z); }, bp, u);
      CHECK(numeric == Catch::Approx(law.cf(u)).margin(1e-7));
    }
  }
}

TEST_CASE("curve tables") {
  const DiagonalLaw law(2, 0.5);
  const std::vector<double> z = {-2.0, -1.0, 0.0, 1.0, 2.0};
  const CurveTable pdf = make_pdf_table(law, z);
  CHECK(pdf.kind == CurveKind::pdf);
  REQUIRE(pdf.value.size() == 5);
  CHECK(pdf.value[2] == law.pdf(0.0));

  const CurveTable cdf = make_cdf_table(law, z);
  CHECK(cdf.kind == CurveKind::cdf);
  CHECK(cdf.value.front() == 0.0);
  CHECK(cdf.value.back() == 1.0);

  const CurveTable cf = make_cf_table(law, z);
  CHECK(cf.kind == CurveKind::cf);
  CHECK(cf.value[2] == 1.0);

  CurveTable bad;
  bad.arg = {0.0, 0.0};
  bad.value = {1.0, 1.0};
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad.arg = {0.0, 1.0};
  bad.value = {1.0};
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
}
