#include <doctest.h>

#include <cmath>
#include <numbers>

#include "kinlab/error.hpp"
#include "kinlab/mixed_norms.hpp"
#include "kinlab/multilinear_lab.hpp"

using namespace kinlab;
using namespace kinlab::multilinear_lab;

namespace {

constexpr double kPi = std::numbers::pi;

SpaceTimePtr slice_at(int d, double t0, double width_x = 1.0, double amplitude = 1.0, double x0 = 0.0) {
  GaussianSpaceTimeParams p;
  p.d = d;
  p.t0 = t0;
  p.width_x = width_x;
  p.amplitude = amplitude;
  p.x0.assign(d, x0);
  return make_gaussian_spacetime(p);
}

// int_R |u|^{-a} exp(-pi u^2) du
double gaussian_moment(double a) { return std::tgamma((1.0 - a) / 2.0) * std::pow(kPi, -(1.0 - a) / 2.0); }

}  // namespace

TEST_CASE("time tuples") {
  const TimeTuple t({0.0, 2.0, -1.0});
  CHECK(t.min_gap() == 1.0);
  CHECK(t.shifted(0.5)[2] == -0.5);
  CHECK_THROWS_AS(TimeTuple({1.0, 1.0}), DegenerateInput);
  CHECK_THROWS_AS(TimeTuple({1.0}), MalformedInput);
}

TEST_CASE("two-function form is an exact change of variables") {
  const std::vector<SpaceTimePtr> g{slice_at(1, 0.0), slice_at(1, 1.0)};
  CHECK(product_form(g, TimeTuple({0.0, 1.0})).value == doctest::Approx(1.0).epsilon(1e-9));
  const std::vector<SpaceTimePtr> h{slice_at(2, 0.5, 0.7), slice_at(2, -1.0, 1.4, 2.0, 0.3)};
  const double expected = 0.49 * 2.0 * 1.96 / std::pow(1.5, 2);
  CHECK(product_form(h, TimeTuple({0.5, -1.0})).value == doctest::Approx(expected).epsilon(1e-8));
}

TEST_CASE("zero factor gives zero") {
  const std::vector<SpaceTimePtr> g{slice_at(1, 0.0), slice_at(1, 1.0, 1.0, 0.0)};
  CHECK(product_form(g, TimeTuple({0.0, 1.0})).value == 0.0);
}

TEST_CASE("property: a common time shift leaves the form unchanged") {
  for (int d = 1; d <= 2; ++d) {
    const auto conf = random_gaussian_configuration(d, 5, 0);
    const double base = product_form(conf.slices, conf.times).value;
    for (double s : {0.75, -1.5}) {
      std::vector<SpaceTimePtr> moved;
      for (const auto& g : conf.slices) {
        auto p = std::dynamic_pointer_cast<const GaussianSpaceTime>(g)->params();
        p.t0 += s;
        moved.push_back(make_gaussian_spacetime(p));
      }
      CHECK(product_form(moved, conf.times.shifted(s)).value == doctest::Approx(base).epsilon(1e-6));
    }
  }
}

TEST_CASE("Jacobian factor") {
  CHECK(jacobian_factor(0.0, 1.0, 3) == 1.0);
  CHECK(jacobian_factor(1.0, 3.0, 2) == 4.0);
  CHECK(jacobian_factor(0.1, 0.35, 2) == doctest::Approx(0.0625));
  CHECK_THROWS_AS(jacobian_factor(2.0, 2.0, 1), DegenerateInput);
  CHECK(block_determinant(ExtRational(1, 3), ExtRational(5, 6), 3) == ExtRational(1, 8));
  CHECK(block_determinant(ExtRational(2), ExtRational(-1), 1) == ExtRational(-3));
  CHECK(block_determinant(ExtRational(4), ExtRational(4), 2) == ExtRational(0));
}

TEST_CASE("bilinear and interpolated bounds on random configurations") {
  for (int d = 1; d <= 2; ++d) {
    for (std::size_t i = 0; i < 10; ++i) {
      const auto conf = random_gaussian_configuration(d, 3, i);
      CHECK(conf.slices.size() == static_cast<std::size_t>(d + 1));
      const auto reports = bound_checks(conf.slices, conf.times);
      CHECK(reports.size() == static_cast<std::size_t>((d + 1) * d / 2 + 1));
      for (const auto& r : reports) CHECK(r.margin >= -1e-3 * r.bound);
      CHECK(reports.back().kind_label() == "interpolated");
      CHECK(reports.front().kind_label() == "bilinear(1,2)");
    }
  }
  const auto again = random_gaussian_configuration(2, 3, 4);
  const auto first = random_gaussian_configuration(2, 3, 4);
  CHECK(again.times.values() == first.times.values());
  const auto conf = random_gaussian_configuration(1, 1, 0);
  CHECK_THROWS_AS(bilinear_bound_check(conf.slices, conf.times, 1, 1), OutOfRange);
}

TEST_CASE("slice norms") {
  const auto g = slice_at(2, 0.0, 1.3);
  CHECK(slice_lp_norm(*g, 0.0, 1.0) == doctest::Approx(1.69));
  CHECK(slice_lp_norm(*g, 0.0, 3.0) == doctest::Approx(std::pow(1.69 / 3.0, 1.0 / 3.0)));
  CHECK_THROWS_AS(slice_lp_norm(*g, 0.0, 0.5), OutOfRange);
}

TEST_CASE("HLS exponents are homogeneous") {
  for (int d = 1; d <= 3; ++d) {
    for (const auto& s : {ExtRational(5, 4), ExtRational(3, 2), ExtRational(2), ExtRational(7)}) {
      const auto e = hls_exponents(d, s);
      CHECK(e.homogeneous());
      CHECK(e.beta == ExtRational(2) / (ExtRational(d + 1) * s));
    }
  }
  CHECK(hls_exponents(2, ExtRational(3, 2)).beta == ExtRational(4, 9));
  CHECK(hls_exponents(1, ExtRational(2)).q == ExtRational(4, 3));
}

TEST_CASE("HLS form for a Gaussian profile in d = 1") {
  const auto r = mhls_check(1, 2, gaussian_profile());
  const double exact = std::pow(2.0, -0.25) * gaussian_moment(0.5);
  CHECK(r.form == doctest::Approx(exact).epsilon(5e-4));
  CHECK(std::abs(r.form - exact) <= 2.0 * r.form_error + 1e-6);
  CHECK(r.bound == doctest::Approx(std::pow(4.0 / 3.0, -0.75)).epsilon(1e-12));
  CHECK(r.kind_label() == "mhls");
  const auto wider = mhls_check(1, 2, gaussian_profile(), HlsQuadrature{8.0, 800, 1});
  CHECK(wider.form == doctest::Approx(r.form).epsilon(5e-4));
  CHECK_THROWS_AS(mhls_check(1, 1, gaussian_profile()), EndpointDivergence);
  CHECK_THROWS_AS(mhls_check(1, 2, gaussian_profile(), HlsQuadrature{4.0, 30, 1}), MalformedInput);
}

TEST_CASE("HLS form of the zero profile") {
  TimeProfile zero{[](double) { return 0.0; }, [](double) { return 0.0; }};
  const auto r = mhls_check(1, ExtRational(3, 2), zero);
  CHECK(r.form == 0.0);
  CHECK(r.bound == 0.0);
  CHECK(r.margin == 0.0);
}

TEST_CASE("Minkowski step in d = 1") {
  GaussianSpaceTimeParams p;
  const GaussianSpaceTime g(p);
  const double v = 16.0;
  {
    const auto r = minkowski_check(g, 2);
    CHECK(r.form == doctest::Approx(std::sqrt(v / std::sqrt(1 + v * v))).epsilon(1e-6));
    CHECK(r.bound == doctest::Approx(std::sqrt(0.5) * std::pow(2.0, -0.25) * gaussian_moment(0.5)).epsilon(5e-4));
    CHECK(r.margin > 0.0);
  }
  {
    const auto r = minkowski_check(g, ExtRational(3, 2));
    CHECK(r.form == doctest::Approx(std::pow(2.0 * std::atan(v) / std::sqrt(3.0), 2.0 / 3.0)).epsilon(1e-6));
    const double bound = std::pow(1.5, -2.0 / 3.0) * std::pow(2.0, -1.0 / 3.0) * gaussian_moment(2.0 / 3.0);
    CHECK(r.bound == doctest::Approx(bound).epsilon(2e-3));
    CHECK(r.margin > 0.0);
  }
  GaussianSpaceTimeParams q;
  q.d = 2;
  CHECK_THROWS_AS(minkowski_check(GaussianSpaceTime(q), 2), MalformedInput);
}

TEST_CASE("non-endpoint sweep") {
  const auto family = gaussian_dilate_family(1);
  CHECK(family.size() == 9);
  const std::vector<ExtRational> one{2};
  const std::vector<SpaceTimePtr> single{family[4]};
  const auto t = nonendpoint_sweep(single, one);
  REQUIRE(t.rows().size() == 1);
  CHECK(t.rows()[0].value == mixed_norms::dual_ratio_sigma(*family[4], 2).value);
  const std::vector<ExtRational> up{ExtRational(3, 2), 2};
  CHECK_THROWS_AS(nonendpoint_sweep(single, up), MalformedInput);
  const std::vector<ExtRational> endpoint{2, 1};
  CHECK_THROWS_AS(nonendpoint_sweep(single, endpoint), EndpointDivergence);
  const std::vector<ExtRational> sigmas{2, ExtRational(3, 2), ExtRational(5, 4)};
  const auto a = nonendpoint_sweep(family, sigmas, {}, 1);
  const auto b = nonendpoint_sweep(family, sigmas, {}, 3);
  CHECK(a.nondecreasing());
  for (std::size_t i = 0; i < a.rows().size(); ++i) CHECK(a.rows()[i].value == b.rows()[i].value);
}
