#include "kinlab/endpoint_lab.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>

#include <Eigen/Dense>

#include "kinlab/detail/box_quadrature.hpp"
#include "kinlab/detail/frame.hpp"
#include "kinlab/error.hpp"
#include "kinlab/parallel.hpp"
#include "kinlab/rng.hpp"

namespace kinlab::endpoint_lab {

namespace {

const char* kModule = "endpoint_lab";
constexpr double kPi = std::numbers::pi;

void require_radius(double v_radius) {
  if (!(v_radius > 0.0) || !std::isfinite(v_radius)) {
    throw MalformedInput(kModule, "truncation V must be positive and finite");
  }
}

std::size_t boundary_index(std::span<const double> boundaries, double v) {
  std::size_t best = 0;
  for (std::size_t i = 0; i < boundaries.size(); ++i) {
    if (std::abs(boundaries[i] - v) < std::abs(boundaries[best] - v)) best = i;
  }
  return best;
}

}  // namespace

double FourierSideConfig::normalization() const {
  return c != 0.0 ? c : std::pow(2.0 * kPi, -static_cast<double>(d * d));
}

FourierSideConfig FourierSideConfig::coarsened() const {
  FourierSideConfig out = *this;
  out.ball = ball.coarsened();
  out.xi_nodes = std::max(2, 3 * xi_nodes / 4);
  return out;
}

Estimate vtrunc_lhs(const SpaceTimeFunction& g, double v_radius, const AdjointGrid& grid) {
  require_radius(v_radius);
  return mixed_norms::adjoint_power_integral(g, g.dimension() + 1, v_radius, grid);
}

// ---------------------------------------------------------------------------
// Fourier side

namespace {

/// Fine and coarse xi-rules that disagree by more than this relative amount
/// mean ghat is undersampled.
constexpr double kResolvedFraction = 0.1;

Estimate resolved(double fine, double coarse) {
  const double gap = std::abs(fine - coarse);
  if (gap > kResolvedFraction * std::abs(fine)) {
    throw ResolutionError(kModule, "Fourier-side quadrature undersamples ghat: fine " + std::to_string(fine) +
                                       ", coarse " + std::to_string(coarse) + "; raise xi_nodes");
  }
  return {fine, gap};
}

struct FourierGeometry {
  double xi_radius = 0.0;   // |xi| <= xi_radius on supp ghat
  double tau_radius = 0.0;  // |tau| <= tau_radius on supp ghat
};

FourierGeometry geometry(const SpaceTimeFunction& g) {
  if (!g.has_fourier()) throw MalformedInput(kModule, "the Fourier side needs ghat");
  const Interval t = g.fourier_support_tau();
  return {g.frequency_radius(), std::max(std::abs(t.lo), std::abs(t.hi))};
}

/// prod_j ghat(-v.xi_j, xi_j) * ghat(v.sum xi, -sum xi), real part.
double fourier_product(const SpaceTimeFunction& g, std::span<const double> v,
                       const std::array<std::array<double, 3>, 3>& xi) {
  const int d = g.dimension();
  std::complex<double> prod = 1.0;
  std::array<double, 3> sum{};
  double vsum = 0.0;
  for (int j = 0; j < d; ++j) {
    double vx = 0.0;
    for (int k = 0; k < d; ++k) {
      vx += v[k] * xi[j][k];
      sum[k] += xi[j][k];
    }
    vsum += vx;
    prod *= g.fourier(-vx, std::span<const double>(xi[j].data(), d));
    if (prod == 0.0) return 0.0;
  }
  std::array<double, 3> neg{};
  for (int k = 0; k < d; ++k) neg[k] = -sum[k];
  prod *= g.fourier(vsum, std::span<const double>(neg.data(), d));
  return prod.real();
}

/// Coordinates of xi_j in a frame aligned with v: a_j along v, b_j across.
/// Returns the integration box (a_1, b_1..., a_2, b_2..., ...).
Box frame_box(int d, double speed, const FourierGeometry& geo) {
  const double a = speed > 0.0 ? std::min(geo.xi_radius, geo.tau_radius / speed) : geo.xi_radius;
  Box box;
  for (int j = 0; j < d; ++j) {
    box.push_back({-a, a});
    for (int m = 1; m < d; ++m) box.push_back({-geo.xi_radius, geo.xi_radius});
  }
  return box;
}

double rhs_node(const SpaceTimeFunction& g, std::span<const double> v, const FourierGeometry& geo, int nodes) {
  const int d = g.dimension();
  double speed = 0.0;
  for (int k = 0; k < d; ++k) speed += v[k] * v[k];
  speed = std::sqrt(speed);
  const auto e = detail::frame_along(v, d);
  const Box box = frame_box(d, speed, geo);
  return detail::box_integrate(box, nodes, Rule::gauss_legendre, [&](const double* u) {
    std::array<std::array<double, 3>, 3> xi{};
    for (int j = 0; j < d; ++j) {
      for (int m = 0; m < d; ++m) {
        const double c = u[j * d + m];
        for (int k = 0; k < d; ++k) xi[j][k] += c * e[m][k];
      }
    }
    return fourier_product(g, v, xi);
  });
}

std::vector<double> rhs_shell_sums(const SpaceTimeFunction& g, std::span<const double> boundaries,
                                   const FourierSideConfig& cfg) {
  const int d = g.dimension();
  const FourierGeometry geo = geometry(g);
  const auto shells = ball_shells(d, boundaries, cfg.ball);
  std::vector<std::pair<std::size_t, const BallNode*>> tasks;
  for (std::size_t i = 0; i < shells.size(); ++i) {
    for (const auto& n : shells[i].nodes) tasks.emplace_back(i, &n);
  }
  const auto values = parallel_map<double>(tasks.size(), cfg.workers, [&](std::size_t i) {
    const BallNode& n = *tasks[i].second;
    return n.weight * rhs_node(g, std::span<const double>(n.v, d), geo, cfg.xi_nodes);
  });
  std::vector<double> out(shells.size(), 0.0);
  std::size_t pos = 0;
  for (std::size_t i = 0; i < shells.size(); ++i) {
    const std::size_t n = shells[i].nodes.size();
    out[i] = cfg.normalization() * pairwise_sum(std::span<const double>(values).subspan(pos, n));
    pos += n;
  }
  return out;
}

struct Moments {
  double sum = 0.0;
  double sum_sq = 0.0;
};

Estimate rhs_monte_carlo(const SpaceTimeFunction& g, double v_radius, const FourierSideConfig& cfg) {
  const int d = g.dimension();
  if (cfg.mc_samples < 2 || cfg.mc_batch < 1) throw InsufficientSamples(kModule, "Monte Carlo needs samples");
  const FourierGeometry geo = geometry(g);
  const std::size_t batches = (cfg.mc_samples + cfg.mc_batch - 1) / cfg.mc_batch;
  const double ball_volume = std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d + 1.0) * std::pow(v_radius, d);
  const auto parts = parallel_map<Moments>(batches, cfg.workers, [&](std::size_t b) {
    CounterRng rng(CounterRng::batch_key(cfg.seed, b));
    const std::size_t count = std::min(cfg.mc_batch, cfg.mc_samples - b * cfg.mc_batch);
    Moments m;
    for (std::size_t i = 0; i < count; ++i) {
      std::array<double, 3> v{};
      double n2 = 0.0;
      for (int k = 0; k < d; ++k) {
        v[k] = rng.next_normal();
        n2 += v[k] * v[k];
      }
      const double r = v_radius * std::pow(rng.next_uniform(), 1.0 / d) / std::sqrt(n2);
      for (int k = 0; k < d; ++k) v[k] *= r;
      const std::span<const double> vs(v.data(), d);
      double speed = 0.0;
      for (int k = 0; k < d; ++k) speed += v[k] * v[k];
      speed = std::sqrt(speed);
      const Box box = frame_box(d, speed, geo);
      const auto e = detail::frame_along(vs, d);
      std::array<std::array<double, 3>, 3> xi{};
      double volume = ball_volume;
      for (int j = 0; j < d; ++j) {
        for (int m = 0; m < d; ++m) {
          const Interval& iv = box[j * d + m];
          const double c = iv.lo + (iv.hi - iv.lo) * rng.next_uniform();
          volume *= iv.width();
          for (int k = 0; k < d; ++k) xi[j][k] += c * e[m][k];
        }
      }
      const double y = volume * fourier_product(g, vs, xi);
      m.sum += y;
      m.sum_sq += y * y;
    }
    return m;
  });
  Moments total;
  for (const auto& p : parts) {
    total.sum += p.sum;
    total.sum_sq += p.sum_sq;
  }
  const double n = static_cast<double>(cfg.mc_samples);
  const double mean = total.sum / n;
  const double var = std::max(0.0, total.sum_sq / n - mean * mean);
  const double c = cfg.normalization();
  return {c * mean, c * std::sqrt(var / (n - 1.0))};
}

}  // namespace

Estimate vtrunc_rhs(const SpaceTimeFunction& g, double v_radius, const FourierSideConfig& cfg) {
  require_radius(v_radius);
  if (cfg.d != g.dimension()) throw MalformedInput(kModule, "config dimension does not match g");
  if (g.dimension() == 3) return rhs_monte_carlo(g, v_radius, cfg);
  if (g.dimension() > 3) throw MalformedInput(kModule, "d must be 1, 2 or 3");
  const auto b = shell_boundaries(v_radius, cfg.ball);
  const auto fine = rhs_shell_sums(g, b, cfg);
  const auto coarse = rhs_shell_sums(g, b, cfg.coarsened());
  double f = 0.0, c = 0.0;
  for (std::size_t i = 0; i < fine.size(); ++i) {
    f += fine[i];
    c += coarse[i];
  }
  return resolved(f, c);
}

std::vector<IdentityRow> truncated_identity(const SpaceTimeFunction& g, std::span<const double> schedule,
                                            const AdjointGrid& grid, const FourierSideConfig& cfg) {
  if (schedule.empty()) return {};
  for (double v : schedule) require_radius(v);
  const int d = g.dimension();
  const double vmax = *std::max_element(schedule.begin(), schedule.end());
  const auto b = shell_boundaries(vmax, grid.ball, schedule);
  const auto lhs = mixed_norms::adjoint_power_shells(g, d + 1, b, grid);
  std::vector<double> rhs_fine, rhs_coarse;
  if (d <= 2) {
    // Both sides share the shell boundaries so the schedule costs one pass.
    rhs_fine = rhs_shell_sums(g, b, cfg);
    rhs_coarse = rhs_shell_sums(g, b, cfg.coarsened());
  }
  std::vector<IdentityRow> rows;
  for (double v : schedule) {
    IdentityRow row;
    row.v_radius = v;
    const std::size_t k = boundary_index(b, v);
    row.lhs = lhs.cumulative(k);
    if (d <= 2) {
      double f = 0.0, c = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        f += rhs_fine[i];
        c += rhs_coarse[i];
      }
      row.rhs = resolved(f, c);
    } else {
      row.rhs = vtrunc_rhs(g, v, cfg);
    }
    rows.push_back(row);
  }
  return rows;
}

GrowthTable divergence_study(const SpaceTimeFunction& g, std::span<const double> schedule, const AdjointGrid& grid) {
  GrowthTable table;
  if (schedule.empty()) return table;
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    require_radius(schedule[i]);
    if (i > 0 && !(schedule[i] > schedule[i - 1])) throw MalformedInput(kModule, "V-schedule must increase");
  }
  const auto b = shell_boundaries(schedule.back(), grid.ball, schedule);
  const auto series = mixed_norms::adjoint_power_shells(g, g.dimension() + 1, b, grid);
  for (double v : schedule) {
    const Estimate e = series.cumulative(boundary_index(b, v));
    table.add(v, e.value, e.error);
  }
  return table;
}

std::vector<double> geometric_schedule(double lo, double hi, double ratio) {
  if (!(lo > 0.0) || !(hi >= lo) || !(ratio > 1.0)) throw MalformedInput(kModule, "bad geometric schedule");
  std::vector<double> out;
  for (double v = lo; v <= hi * (1.0 + 1e-12); v *= ratio) out.push_back(v);
  return out;
}

// ---------------------------------------------------------------------------
// Polar factorization and the angular / radial integrals

PolarFactorization polar_factorize(const std::vector<std::vector<double>>& xi) {
  const int d = static_cast<int>(xi.size());
  if (d < 1) throw MalformedInput(kModule, "need at least one xi");
  Eigen::MatrixXd k(d, d), theta(d, d);
  PolarFactorization out;
  for (int j = 0; j < d; ++j) {
    if (static_cast<int>(xi[j].size()) != d) throw MalformedInput(kModule, "each xi_j must have d components");
    double r = 0.0;
    for (double c : xi[j]) r += c * c;
    r = std::sqrt(r);
    if (r == 0.0) throw DegenerateInput(kModule, "xi_" + std::to_string(j + 1) + " = 0 has no direction");
    out.radii.push_back(r);
    std::vector<double> dir;
    for (int m = 0; m < d; ++m) {
      k(j, m) = -xi[j][m];
      theta(m, j) = xi[j][m] / r;
      dir.push_back(xi[j][m] / r);
    }
    out.directions.push_back(std::move(dir));
  }
  out.det_k = std::abs(k.fullPivLu().determinant());
  out.det_theta = std::abs(theta.fullPivLu().determinant());
  return out;
}

namespace {

void check_epsilon(double eps) {
  if (!(eps > 0.0) || !(eps <= 1.0)) throw OutOfRange(kModule, "eps must lie in (0, 1]");
}

/// 2 pi int_{|sin phi| > eps} dphi / |sin phi| over [0, 2 pi), using the
/// antiderivative ln tan(phi / 2).
double angular_d2(double eps) {
  if (eps >= 1.0) return 0.0;
  const double alpha = std::asin(eps);
  return 2.0 * kPi * (-4.0 * std::log(std::tan(0.5 * alpha)));
}

double unit_det3(CounterRng& rng) {
  Eigen::Matrix3d m;
  for (int j = 0; j < 3; ++j) {
    Eigen::Vector3d v(rng.next_normal(), rng.next_normal(), rng.next_normal());
    m.col(j) = v / v.norm();
  }
  return std::abs(m.determinant());
}

}  // namespace

std::vector<AngularResult> angular_schedule(int d, std::span<const double> epsilons, const AngularConfig& cfg) {
  for (double e : epsilons) check_epsilon(e);
  std::vector<AngularResult> out;
  if (d == 2) {
    for (double e : epsilons) out.push_back({e, angular_d2(e), 0.0});
    return out;
  }
  if (d != 3) throw MalformedInput(kModule, "angular integral implemented for d = 2 (exact) and d = 3 (Monte Carlo)");
  if (epsilons.empty()) return out;
  const double eps_min = *std::min_element(epsilons.begin(), epsilons.end());
  if (static_cast<double>(cfg.samples) < 100.0 / eps_min) {
    throw InsufficientSamples(kModule, "need at least 100/eps samples: " + std::to_string(cfg.samples) +
                                           " < " + std::to_string(100.0 / eps_min));
  }
  const std::size_t batch = std::max<std::size_t>(1, cfg.batch);
  const std::size_t batches = (cfg.samples + batch - 1) / batch;
  const std::size_t m = epsilons.size();
  const auto parts = parallel_map<std::vector<Moments>>(batches, cfg.workers, [&](std::size_t b) {
    CounterRng rng(CounterRng::batch_key(cfg.seed, b));
    const std::size_t count = std::min(batch, cfg.samples - b * batch);
    std::vector<Moments> acc(m);
    for (std::size_t i = 0; i < count; ++i) {
      const double det = unit_det3(rng);
      for (std::size_t k = 0; k < m; ++k) {
        if (det > epsilons[k]) {
          const double y = 1.0 / det;
          acc[k].sum += y;
          acc[k].sum_sq += y * y;
        }
      }
    }
    return acc;
  });
  const double volume = std::pow(4.0 * kPi, 3);
  const double n = static_cast<double>(cfg.samples);
  for (std::size_t k = 0; k < m; ++k) {
    double s = 0.0, s2 = 0.0;
    for (const auto& p : parts) {
      s += p[k].sum;
      s2 += p[k].sum_sq;
    }
    const double mean = s / n;
    const double var = std::max(0.0, s2 / n - mean * mean);
    out.push_back({epsilons[k], volume * mean, volume * std::sqrt(var / (n - 1.0))});
  }
  return out;
}

AngularResult angular_integral(int d, double epsilon, const AngularConfig& cfg) {
  const double e[1] = {epsilon};
  return angular_schedule(d, e, cfg).at(0);
}

GrowthTable angular_growth(const std::vector<AngularResult>& results) {
  std::vector<AngularResult> sorted = results;
  // Rows ordered by decreasing eps, i.e. increasing ln(1/eps).
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.epsilon > b.epsilon; });
  GrowthTable t;
  for (const auto& r : sorted) t.add(r.epsilon, r.value, r.std_error);
  return t;
}

double radial_integral(int d, double delta) {
  if (d < 1) throw MalformedInput(kModule, "d must be >= 1");
  if (!(delta > 0.0) || !(delta < 1.0)) throw OutOfRange(kModule, "delta must lie in (0, 1)");
  // int_delta^1 r^{d-2} dr with r = e^s.
  const Nodes n = interval_nodes(std::log(delta), 0.0, 32, Rule::gauss_legendre);
  double one = 0.0;
  for (std::size_t i = 0; i < n.x.size(); ++i) one += n.w[i] * std::exp((d - 1) * n.x[i]);
  if (d == 1) return 2.0 * one;
  return std::pow(one, d);
}

}  // namespace kinlab::endpoint_lab
