#include <doctest.h>

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "kinlab/error.hpp"
#include "kinlab/functions.hpp"
#include "kinlab/quadrature.hpp"

using namespace kinlab;
using boost::math::quadrature::gauss_kronrod;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("Gauss-Legendre is exact on polynomials of degree 2n-1") {
  for (int n : {2, 5, 16}) {
    const auto& gl = gauss_legendre(n);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += gl.w[i] * std::pow(gl.x[i], 2 * n - 2);
    CHECK(s == doctest::Approx(2.0 / (2 * n - 1)).epsilon(1e-13));
  }
  const auto grid = GridSpec::uniform(2, 0.0, 2.0, 6, Rule::gauss_legendre);
  CHECK(integrate(grid, [](std::span<const double> p) { return p[0] * p[0] * p[1]; }) ==
        doctest::Approx(16.0 / 3.0).epsilon(1e-13));
  CHECK(grid.volume() == doctest::Approx(4.0));
}

TEST_CASE("trapezoid grids and coarsening") {
  AxisGrid a{0.0, 1.0, 9, Rule::trapezoid};
  CHECK(a.coarsened().count == 5);
  const auto n = axis_nodes(a);
  double s = 0.0;
  for (std::size_t i = 0; i < n.x.size(); ++i) s += n.w[i];
  CHECK(s == doctest::Approx(1.0));
  CHECK_THROWS_AS(AxisGrid({1.0, 0.0, 4, Rule::trapezoid}).validate(), MalformedInput);
}

TEST_CASE("pairwise sum is order-fixed and accurate") {
  std::vector<double> v(1000, 0.1);
  CHECK(pairwise_sum(v) == doctest::Approx(100.0).epsilon(1e-14));
  CHECK(pairwise_sum({}) == 0.0);
}

TEST_CASE("ball rule weights sum to the ball volume") {
  const BallRule rule;
  for (int d = 1; d <= 3; ++d) {
    const double radius = 5.0;
    const auto b = shell_boundaries(radius, rule);
    CHECK(b.front() == 0.0);
    CHECK(b.back() == radius);
    double w = 0.0;
    for (const auto& shell : ball_shells(d, b, rule)) {
      for (const auto& node : shell.nodes) w += node.weight;
    }
    const double volume = d == 1 ? 2 * radius : d == 2 ? kPi * radius * radius : 4.0 / 3.0 * kPi * std::pow(radius, 3);
    CHECK(w == doctest::Approx(volume).epsilon(1e-12));
  }
  CHECK(sphere_area(2) == doctest::Approx(2 * kPi));
  CHECK(sphere_area(3) == doctest::Approx(4 * kPi));
  const std::vector<double> extra{3.0};
  const auto b = shell_boundaries(8.0, rule, extra);
  CHECK(std::find(b.begin(), b.end(), 3.0) != b.end());
}

TEST_CASE("standard Gaussians") {
  GaussianPhaseSpaceParams pp;
  const GaussianPhaseSpace f0(pp);
  const std::vector<double> zero{0.0};
  CHECK(f0(zero, zero) == doctest::Approx(1.0));
  GaussianSpaceTimeParams gp;
  const GaussianSpaceTime g(gp);
  CHECK(std::abs(g.fourier(0.0, zero) - std::complex<double>(1.0, 0.0)) < 1e-14);
  CHECK(gaussian_lp_norm(2.0, 1) == doctest::Approx(0.840896).epsilon(1e-6));
  CHECK(gaussian_lp_norm(INFINITY, 3) == 1.0);
  for (double p : {1.0, 1.5, 2.0, 3.0, 4.5}) {
    const double q = gauss_kronrod<double, 61>::integrate([p](double x) { return std::exp(-kPi * p * x * x); },
                                                           -std::numeric_limits<double>::infinity(),
                                                           std::numeric_limits<double>::infinity(), 10, 1e-14);
    CHECK(gaussian_lp_norm(p, 1) == doctest::Approx(std::pow(q, 1.0 / p)).epsilon(1e-11));
    CHECK(gaussian_lp_norm(p, 2) == doctest::Approx(std::pow(q, 2.0 / p)).epsilon(1e-11));
  }
  pp.width_x = 0.0;
  CHECK_THROWS_AS(GaussianPhaseSpace{pp}, MalformedInput);
  gp.width_t = -1.0;
  CHECK_THROWS_AS(GaussianSpaceTime{gp}, MalformedInput);
}

TEST_CASE("Gaussian Fourier transform against quadrature") {
  GaussianSpaceTimeParams gp;
  gp.width_t = 0.7;
  gp.width_x = 1.3;
  gp.t0 = 0.4;
  gp.x0 = {-0.2};
  const GaussianSpaceTime g(gp);
  const double tau = 1.1, xi = -0.6;
  auto axis = [](double w, double c, double k) {
    auto re = gauss_kronrod<double, 61>::integrate(
        [&](double s) { return std::exp(-kPi * (s - c) * (s - c) / (w * w)) * std::cos(s * k); }, -20, 20, 10, 1e-14);
    auto im = gauss_kronrod<double, 61>::integrate(
        [&](double s) { return -std::exp(-kPi * (s - c) * (s - c) / (w * w)) * std::sin(s * k); }, -20, 20, 10, 1e-14);
    return std::complex<double>(re, im);
  };
  const auto expected = axis(0.7, 0.4, tau) * axis(1.3, -0.2, xi);
  const std::vector<double> x{xi};
  CHECK(std::abs(g.fourier(tau, x) - expected) < 1e-12);
}

TEST_CASE("Gaussian dilation and closed-form norms") {
  GaussianSpaceTimeParams gp;
  gp.d = 2;
  const GaussianSpaceTime g(gp);
  const auto h = g.dilated(2.0, 0.5);
  const std::vector<double> x{0.3, -0.1};
  CHECK(h(1.0, x) == doctest::Approx(g(0.5, std::vector<double>{0.6, -0.2})));
  // ||g||_{L^q_t L^p_x} = q^{-1/(2q)} p^{-d/(2p)}
  CHECK(*g.mixed_norm(3.0, 1.5) == doctest::Approx(std::pow(3.0, -1.0 / 6) * std::pow(1.5, -2.0 / 3)));
  CHECK(*g.slice_norm(0.0, 1.0) == doctest::Approx(1.0));
}

TEST_CASE("smoothstep bump") {
  const SmoothstepBump b(1.5, 3);
  CHECK(b(0.0) == doctest::Approx(1.0));
  CHECK(b(1.5) == 0.0);
  CHECK(b(2.0) == 0.0);
  CHECK(b(-0.7) == b(0.7));
  const double integral = gauss_kronrod<double, 61>::integrate([&](double s) { return b(s); }, -1.5, 1.5, 10, 1e-14);
  CHECK(b.integral() == doctest::Approx(integral).epsilon(1e-12));
  const double sq = gauss_kronrod<double, 61>::integrate([&](double s) { return b(s) * b(s); }, -1.5, 1.5, 10, 1e-14);
  CHECK(b.square_integral() == doctest::Approx(sq).epsilon(1e-12));
  for (double y : {0.0, 0.4, 1.5, 2.2, 2.9}) {
    const double conv = gauss_kronrod<double, 61>::integrate([&](double s) { return b(s) * b(y - s); },
                                                              std::max(-1.5, y - 1.5), std::min(1.5, y + 1.5), 15,
                                                              1e-14);
    CHECK(b.self_convolution(y) == doctest::Approx(conv).epsilon(1e-10));
  }
  CHECK(b.self_convolution(3.1) == 0.0);
  CHECK_THROWS_AS(SmoothstepBump(0.0, 3), MalformedInput);
}

TEST_CASE("counterexample g: nonnegative transform, compact support, Plancherel") {
  BumpParams p;
  p.d = 1;
  const auto g = make_counterexample_g(p);
  const std::vector<double> out{2.5};
  CHECK(g->fourier_real(0.0, out) == 0.0);
  for (double tau : {-1.9, -0.5, 0.0, 1.2}) {
    for (double xi : {-1.7, 0.0, 0.3, 1.9}) {
      const std::vector<double> x{xi};
      CHECK(g->fourier_real(tau, x) >= 0.0);
    }
  }
  for (int axis = 0; axis <= 1; ++axis) {
    for (double z : {0.0, 0.8, 3.3, 11.0}) {
      CHECK(g->inverse_transform(axis, z) ==
            doctest::Approx(g->inverse_transform_direct(axis, z)).epsilon(1e-8).scale(g->inverse_transform_direct(axis, 0.0)));
    }
  }
  // int g dt dx = ghat(0, 0) = int phi^2
  const auto ts = g->support_t();
  const auto xs = g->support_x()[0];
  const double total = gauss_kronrod<double, 31>::integrate(
      [&](double t) {
        return gauss_kronrod<double, 31>::integrate(
            [&](double x) { return (*g)(t, std::vector<double>{x}); }, xs.lo, xs.hi, 12, 1e-12);
      },
      ts.lo, ts.hi, 12, 1e-12);
  const std::vector<double> zero{0.0};
  const double phi_sq = g->bump_tau().square_integral() * g->bump_xi().square_integral();
  CHECK(g->fourier_real(0.0, zero) == doctest::Approx(phi_sq).epsilon(1e-12));
  CHECK(total == doctest::Approx(phi_sq).epsilon(1e-6));
  CHECK((*g)(3.0, std::vector<double>{-2.0}) >= 0.0);
}
