#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "kinlab/commands.hpp"
#include "kinlab/endpoint_lab.hpp"
#include "kinlab/error.hpp"

using namespace kinlab;
using namespace kinlab::endpoint_lab;

namespace {

constexpr double kPi = std::numbers::pi;

SpaceTimePtr gaussian(int d) { return commands::make_family("gaussian", d); }

// 2 pi * int_{|sin phi| > eps} |sin phi|^{-1} dphi over one period
double angular_d2_oracle(double eps) {
  boost::math::quadrature::tanh_sinh<double> ts;
  const double inner = ts.integrate([](double phi) { return 1.0 / std::sin(phi); }, std::asin(eps), kPi / 2);
  return 2.0 * kPi * 4.0 * inner;
}

}  // namespace

TEST_CASE("truncated lhs in d = 1") {
  const auto g = gaussian(1);
  CHECK(vtrunc_lhs(*g, 1.0, {}).value == doctest::Approx(1.24646).epsilon(1e-5));
  CHECK(vtrunc_lhs(*g, 1.0, {}).value == doctest::Approx(std::sqrt(2.0) * std::asinh(1.0)).epsilon(1e-9));
  CHECK(vtrunc_lhs(*g, 1e-6, {}).value == doctest::Approx(0.0).epsilon(1e-5));
  CHECK_THROWS_AS(vtrunc_lhs(*g, 0.0, {}), MalformedInput);
}

TEST_CASE("Fourier side in d = 1") {
  const auto g = gaussian(1);
  FourierSideConfig fc;
  for (double v : {0.5, 2.0}) {
    const auto r = vtrunc_rhs(*g, v, fc);
    CHECK(r.value == doctest::Approx(std::sqrt(2.0) * std::asinh(v)).epsilon(1e-4));
  }
  fc.xi_nodes = 4;
  CHECK_THROWS_AS(vtrunc_rhs(*g, 2.0, fc), ResolutionError);
  FourierSideConfig wrong;
  wrong.d = 2;
  CHECK_THROWS_AS(vtrunc_rhs(*g, 2.0, wrong), MalformedInput);
}

TEST_CASE("truncated identity shares shells across the schedule") {
  const auto g = gaussian(1);
  const std::vector<double> schedule{1.0, 3.0};
  FourierSideConfig fc;
  const auto rows = truncated_identity(*g, schedule, {}, fc);
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) {
    CHECK(std::abs(r.lhs.value - r.rhs.value) <= r.lhs.error + r.rhs.error);
    CHECK(r.rhs.value == doctest::Approx(vtrunc_rhs(*g, r.v_radius, fc).value).epsilon(1e-12));
  }
}

TEST_CASE("divergence study") {
  const auto g = gaussian(1);
  const auto schedule = geometric_schedule(8.0, 512.0, 2.0);
  CHECK(schedule.size() == 7);
  CHECK(schedule.back() == 512.0);
  const auto table = divergence_study(*g, schedule, {});
  CHECK(table.strictly_increasing());
  const auto fit = table.fit(GrowthModel::logarithmic);
  REQUIRE(fit);
  CHECK(fit->c1 == doctest::Approx(std::sqrt(2.0)).epsilon(0.05));
  const std::vector<double> one{8.0};
  const auto single = divergence_study(*g, one, {});
  CHECK(single.rows().size() == 1);
  CHECK(single.insufficient_data());
  CHECK_FALSE(single.fit(GrowthModel::logarithmic));
  const std::vector<double> bad{4.0, 2.0};
  CHECK_THROWS_AS(divergence_study(*g, bad, {}), MalformedInput);
  CHECK_THROWS_AS(geometric_schedule(8.0, 4.0, 2.0), MalformedInput);
}

TEST_CASE("polar factorization") {
  const auto diag = polar_factorize({{2.0, 0.0}, {0.0, 3.0}});
  CHECK(diag.det_k == doctest::Approx(6.0));
  CHECK(diag.det_theta == doctest::Approx(1.0));
  CHECK(diag.radii == std::vector<double>{2.0, 3.0});
  const auto collinear = polar_factorize({{1.0, 2.0}, {-2.0, -4.0}});
  CHECK(collinear.det_k == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(collinear.det_theta == doctest::Approx(0.0).epsilon(1e-15));
  // |det K| = prod r_j |det Theta|
  const auto gen = polar_factorize({{1.0, 2.0, 0.5}, {-1.0, 0.3, 2.0}, {0.7, -0.4, 1.1}});
  CHECK(gen.det_k == doctest::Approx(gen.radii[0] * gen.radii[1] * gen.radii[2] * gen.det_theta));
  CHECK_THROWS_AS(polar_factorize({{0.0, 0.0}, {1.0, 0.0}}), DegenerateInput);
}

TEST_CASE("angular integral in d = 2 against quadrature") {
  for (double eps : {0.5, 1e-1, 1e-2, 1e-3, 1e-4}) {
    CHECK(angular_integral(2, eps).value == doctest::Approx(angular_d2_oracle(eps)).epsilon(1e-10));
  }
  CHECK(angular_integral(2, 1.0).value == 0.0);
  CHECK_THROWS_AS(angular_integral(2, 0.0), OutOfRange);
  const std::vector<double> eps{1e-1, 1e-2, 1e-3, 1e-4};
  const auto fit = angular_growth(angular_schedule(2, eps)).fit(GrowthModel::logarithmic, true);
  REQUIRE(fit);
  CHECK(fit->c1 == doctest::Approx(8.0 * kPi).epsilon(0.05));
}

TEST_CASE("angular Monte Carlo in d = 3") {
  AngularConfig cfg;
  cfg.samples = 200000;
  cfg.batch = 4096;
  const std::vector<double> eps{0.2, 0.1, 0.05};
  const auto a = angular_schedule(3, eps, cfg);
  cfg.workers = 3;
  const auto b = angular_schedule(3, eps, cfg);
  REQUIRE(a.size() == 3);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].value == b[i].value);
  CHECK(a[0].value < a[1].value);
  CHECK(a[1].value < a[2].value);

  // independent sampler: three uniform unit vectors from normalized Gaussians
  std::mt19937_64 gen(12345);
  std::normal_distribution<double> normal;
  const int n = 200000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    double m[3][3];
    for (auto& row : m) {
      double r = 0.0;
      for (double& c : row) {
        c = normal(gen);
        r += c * c;
      }
      for (double& c : row) c /= std::sqrt(r);
    }
    const double det = std::abs(m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                                m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                                m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]));
    const double f = det > 0.1 ? 1.0 / det : 0.0;
    sum += f;
    sum_sq += f * f;
  }
  const double scale = std::pow(4.0 * kPi, 3);
  const double mean = sum / n;
  const double se = std::sqrt((sum_sq / n - mean * mean) / (n - 1));
  CHECK(std::abs(a[1].value - scale * mean) < 5.0 * std::hypot(a[1].std_error, scale * se));

  cfg.samples = 1000;
  CHECK_THROWS_AS(angular_integral(3, 0.01, cfg), InsufficientSamples);
}

TEST_CASE("radial integrals") {
  CHECK(radial_integral(1, std::exp(-1.0)) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(radial_integral(2, 0.1) == doctest::Approx(0.81).epsilon(1e-12));
  CHECK(radial_integral(3, 1e-8) == doctest::Approx(0.125).epsilon(1e-12));
  CHECK_THROWS_AS(radial_integral(1, 0.0), OutOfRange);
}
