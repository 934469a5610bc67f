#include <doctest.h>

#include <cmath>
#include <numbers>

#include "kinlab/error.hpp"
#include "kinlab/growth.hpp"
#include "kinlab/mixed_norms.hpp"

using namespace kinlab;
using namespace kinlab::mixed_norms;

namespace {

constexpr double kPi = std::numbers::pi;

double gauss3(double t, std::span<const double> x, std::span<const double> v) {
  return std::exp(-kPi * (t * t + x[0] * x[0] + v[0] * v[0]));
}

GridSpec box(double half, int n) { return GridSpec::uniform(1, -half, half, n, Rule::gauss_legendre); }

}  // namespace

TEST_CASE("nested norms of a product Gaussian") {
  const auto r = mixed_norm(gauss3, 2, 2, 2, box(6, 96), box(6, 96), box(6, 96));
  CHECK(r.value == doctest::Approx(std::pow(2.0, -0.75)).epsilon(1e-10));
  CHECK(r.exponents == std::vector<std::string>{"2", "2", "2"});
  // sup over v on a grid containing v = 0
  const auto s = mixed_norm(gauss3, 2, 2, ExtRational::infinity(), box(6, 96), box(6, 96),
                            GridSpec::uniform(1, -6, 6, 121, Rule::trapezoid));
  CHECK(s.value == doctest::Approx(std::sqrt(0.5)).epsilon(1e-10));
  const auto z = mixed_norm([](double, std::span<const double>, std::span<const double>) { return 0.0; }, 2, 3, 1,
                            box(1, 8), box(1, 8), box(1, 8));
  CHECK(z.value == 0.0);
}

TEST_CASE("homogeneity and peak normalization") {
  auto tiny = [](double t, std::span<const double> x, std::span<const double> v) { return 1e-200 * gauss3(t, x, v); };
  const auto r = mixed_norm(tiny, 3, ExtRational(3, 2), 4, box(6, 48), box(6, 48), box(6, 48));
  const auto one = mixed_norm(gauss3, 3, ExtRational(3, 2), 4, box(6, 48), box(6, 48), box(6, 48));
  CHECK(r.value > 0.0);
  CHECK(r.value / one.value == doctest::Approx(1e-200).epsilon(1e-12));
  CHECK(r.peak_scale == doctest::Approx(1e-200 * one.peak_scale));
}

TEST_CASE("Strichartz ratio of the standard Gaussian") {
  GaussianPhaseSpaceParams p;
  const GaussianPhaseSpace f0(p);
  const auto e = exponents::ExponentTuple::make(3, 3, 1, ExtRational(3, 2));
  const auto a = strichartz_ratio(f0, e);
  const auto b = strichartz_ratio(f0, e);
  CHECK(a.value == b.value);
  // rho(t, x) = (1 + t^2)^{-1/2} exp(-pi x^2 / (1 + t^2)): ||rho||_{3,3}^3 = pi / sqrt 3
  const double expected = std::cbrt(kPi / std::sqrt(3.0)) * std::pow(1.5, 2.0 / 3.0);
  CHECK(a.value == doctest::Approx(expected).epsilon(1e-8));
  CHECK(a.value == doctest::Approx(1.59805).epsilon(1e-5));
}

TEST_CASE("property: admissible ratios are dilation invariant") {
  GaussianPhaseSpaceParams p;
  p.width_v = 0.6;
  const GaussianPhaseSpace f0(p);
  const auto admissible = exponents::ExponentTuple::make(3, 3, 1, ExtRational(3, 2));
  const auto inadmissible = exponents::ExponentTuple::make(2, 3, 1, ExtRational(3, 2));
  const double base = strichartz_ratio(f0, admissible).value;
  const double base_bad = strichartz_ratio(f0, inadmissible).value;
  for (auto [mu, nu] : {std::pair{0.5, 2.0}, std::pair{3.0, 1.0}, std::pair{1.0, 0.3}}) {
    CHECK(strichartz_ratio(f0.dilated(mu, nu), admissible).value == doctest::Approx(base).epsilon(1e-6));
  }
  CHECK(std::abs(strichartz_ratio(f0.dilated(3.0, 1.0), inadmissible).value / base_bad - 1.0) > 0.1);
}

TEST_CASE("truncated adjoint powers match the closed forms") {
  GaussianSpaceTimeParams p;
  const auto g1 = make_gaussian_spacetime(p);
  for (double v : {1.0, 4.0}) {
    const auto r = adjoint_power_integral(*g1, 2.0, v, {});
    CHECK(r.value == doctest::Approx(std::sqrt(2.0) * std::asinh(v)).epsilon(1e-8));
  }
  p.d = 2;
  const auto g2 = make_gaussian_spacetime(p);
  const auto r = adjoint_power_integral(*g2, 3.0, 2.0, {});
  CHECK(r.value == doctest::Approx(kPi / 3.0 * std::log(5.0)).epsilon(1e-7));
}

TEST_CASE("dual ratio away from the endpoint") {
  GaussianSpaceTimeParams p;
  const GaussianSpaceTime g(p);
  DualGrids grids;
  const auto a = dual_ratio_sigma(g, 2, grids);
  grids.v_radius *= 2.0;
  const auto b = dual_ratio_sigma(g, 2, grids);
  CHECK(std::isfinite(a.value));
  CHECK(a.a_dual == ExtRational(4));
  CHECK(a.q_dual == ExtRational(4, 3));
  CHECK(b.value == doctest::Approx(a.value).epsilon(1e-2));
  CHECK_THROWS_AS(dual_ratio(g, exponents::endpoint_l2(1)), EndpointDivergence);
  CHECK_THROWS_AS(dual_ratio_sigma(g, 1), EndpointDivergence);
}

TEST_CASE("growth fits") {
  GrowthTable t;
  for (double v : {2.0, 4.0, 8.0, 16.0}) t.add(v, 0.5 + 1.5 * std::log(v));
  const auto f = t.fit(GrowthModel::logarithmic);
  REQUIRE(f);
  CHECK(f->c1 == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(f->c0 == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(f->r_squared == doctest::Approx(1.0));
  CHECK(f->c1_ci_lo <= 1.5);
  CHECK(f->c1_ci_hi >= 1.5);
  CHECK(t.strictly_increasing());

  GrowthTable pw;
  for (double v : {1.0, 2.0, 3.0, 5.0}) pw.add(v, 3.0 * std::pow(v, 0.7));
  const auto g = pw.fit(GrowthModel::power_law);
  REQUIRE(g);
  CHECK(g->c1 == doctest::Approx(0.7).epsilon(1e-12));

  GrowthTable one;
  one.add(8.0, 1.0);
  CHECK(one.insufficient_data());
  CHECK_FALSE(one.fit(GrowthModel::logarithmic).has_value());

  GrowthTable eps;
  for (double e : {1e-1, 1e-2, 1e-3}) eps.add(e, 2.0 * std::log(1.0 / e));
  CHECK(eps.fit(GrowthModel::logarithmic, true)->c1 == doctest::Approx(2.0));
}
