#include <doctest.h>

#include <cmath>
#include <numbers>

#include "kinlab/error.hpp"
#include "kinlab/mixed_norms.hpp"
#include "kinlab/transport.hpp"

using namespace kinlab;
using namespace kinlab::transport;

namespace {

constexpr double kPi = std::numbers::pi;

std::shared_ptr<GaussianPhaseSpace> standard_f0(int d) {
  GaussianPhaseSpaceParams p;
  p.d = d;
  return make_gaussian_phase_space(p);
}

std::shared_ptr<GaussianSpaceTime> standard_g(int d) {
  GaussianSpaceTimeParams p;
  p.d = d;
  return make_gaussian_spacetime(p);
}

}  // namespace

TEST_CASE("free transport") {
  const auto f0 = standard_f0(1);
  const std::vector<double> x{0.3}, v{-0.8};
  CHECK(propagate(f0, 0.0)(x, v) == (*f0)(x, v));
  const std::vector<double> one{1.0};
  CHECK(propagate(f0, 1.0)(one, one) == doctest::Approx(std::exp(-kPi)).epsilon(1e-14));
}

TEST_CASE("transport preserves every L^a norm") {
  GaussianPhaseSpaceParams p;
  p.width_v = 0.7;
  p.v0 = {0.4};
  const auto f0 = make_gaussian_phase_space(p);
  for (const char* a : {"1", "3/2", "2", "4"}) {
    const auto e = ExtRational::parse(a);
    std::vector<double> norms;
    for (double t : {0.0, 1.0, 2.0}) {
      // x-box follows the sheared support
      const double shift = t * 0.4;
      const double half = 6.0 + 6.0 * t * 0.7;
      const auto xg = GridSpec::uniform(1, shift - half, shift + half, 160, Rule::gauss_legendre);
      const auto vg = mixed_norms::support_grid(f0->support_v(), 96);
      norms.push_back(mixed_norms::phase_space_norm(propagate(f0, t), e, xg, vg).value);
    }
    CHECK(norms[1] == doctest::Approx(norms[0]).epsilon(1e-6));
    CHECK(norms[2] == doctest::Approx(norms[0]).epsilon(1e-6));
    CHECK(norms[0] == doctest::Approx(*f0->lebesgue_norm(e.to_double())).epsilon(1e-8));
  }
}

TEST_CASE("density of the standard Gaussian") {
  const std::vector<double> x1{0.0}, x2{0.0, 0.0};
  CHECK(density(standard_f0(1))(0.0, x1) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(density(standard_f0(1))(1.0, x1) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-10));
  CHECK(density(standard_f0(2))(2.0, x2) == doctest::Approx(0.2).epsilon(1e-10));
  const auto closed = density_closed_form(standard_f0(2));
  CHECK(closed.provenance() == Provenance::closed_form);
  CHECK(closed(2.0, x2) == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(closed.evaluate(2.0, x2).error == 0.0);
  const auto quad = density(standard_f0(2));
  CHECK(quad.provenance() == Provenance::quadrature);
  const auto est = quad.evaluate(2.0, x2);
  CHECK(est.value == doctest::Approx(0.2).epsilon(1e-10));
  CHECK(est.error >= std::abs(est.value - 0.2));
}

TEST_CASE("adjoint density of the standard Gaussian") {
  const std::vector<double> x{0.0}, v0{0.0}, v1{1.0};
  CHECK(adjoint_density(standard_g(1))(x, v0) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(adjoint_density(standard_g(1))(x, v1) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-10));
  const auto g = standard_g(2);
  const std::vector<double> y{0.4, -0.3}, w{1.5, 0.2};
  CHECK(adjoint_density(g)(y, w) == doctest::Approx(g->adjoint_closed_form(y, w)).epsilon(1e-10));
}

TEST_CASE("adjoint time window") {
  const auto g = standard_g(1);
  const std::vector<double> x{0.0}, v{2.0};
  const auto w = adjoint_time_window(*g, x, v);
  CHECK(w.lo < 0.0);
  CHECK(w.hi > 0.0);
  const std::vector<double> far{100.0}, zero{0.0};
  const auto miss = adjoint_time_window(*g, far, zero);
  CHECK(miss.lo >= miss.hi);
}

TEST_CASE("support escape raises a truncation error") {
  PointQuadrature q;
  q.fixed = GridSpec::uniform(1, -0.3, 0.3, 24, Rule::gauss_legendre);
  const auto rho = density(standard_f0(1), q);
  const std::vector<double> x{0.0};
  CHECK_THROWS_AS(rho(0.0, x), TruncationError);
}

TEST_CASE("duality pairing") {
  GaussianPhaseSpaceParams fp;
  fp.width_v = 0.8;
  fp.x0 = {0.3};
  GaussianSpaceTimeParams gp;
  gp.t0 = 0.5;
  gp.width_x = 1.2;
  const auto f0 = make_gaussian_phase_space(fp);
  const auto g = make_gaussian_spacetime(gp);
  const auto coarse = duality_pairing(f0, g);
  CHECK(std::abs(coarse.density_side.value - coarse.adjoint_side.value) <=
        coarse.density_side.error + coarse.adjoint_side.error);
  const auto fine = duality_pairing(f0, g, {48, 48, 2});
  CHECK(fine.density_side.value == doctest::Approx(fine.adjoint_side.value).epsilon(1e-10));
  CHECK(std::abs(coarse.density_side.value - fine.density_side.value) <= coarse.density_side.error);
}

TEST_CASE("sampling is worker-count invariant") {
  const auto rho = density(standard_f0(1));
  GridSpec grid;
  grid.axes = {{0.0, 2.0, 5, Rule::trapezoid}, {-1.0, 1.0, 7, Rule::trapezoid}};
  const auto a = sample_density(rho, grid, 1);
  const auto b = sample_density(rho, grid, 3);
  REQUIRE(a.size() == 35);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].coords == b[i].coords);
    CHECK(a[i].value == b[i].value);
  }
}
