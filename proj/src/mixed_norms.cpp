#include "kinlab/mixed_norms.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "kinlab/detail/box_quadrature.hpp"
#include "kinlab/detail/frame.hpp"
#include "kinlab/error.hpp"
#include "kinlab/parallel.hpp"

namespace kinlab::mixed_norms {

namespace {

const char* kModule = "mixed_norms";

struct Level {
  std::vector<double> weights;
  bool infinite = false;
  double exponent = 1.0;
};

Level make_level(const GridSpec& grid, const ExtRational& e) {
  if (!(e >= ExtRational(1))) throw MalformedInput(kModule, "norm exponents must be >= 1, got " + e.str());
  Level lv;
  for_each_node(grid, [&](std::span<const double>, double w) { lv.weights.push_back(w); });
  lv.infinite = e.is_infinite();
  if (!lv.infinite) lv.exponent = e.to_double();
  return lv;
}

double reduce(std::span<const double> block, const Level& lv) {
  if (lv.infinite) {
    double m = 0.0;
    for (double x : block) m = std::max(m, std::abs(x));
    return m;
  }
  std::vector<double> terms(block.size());
  for (std::size_t i = 0; i < block.size(); ++i) terms[i] = lv.weights[i] * std::pow(std::abs(block[i]), lv.exponent);
  return std::pow(pairwise_sum(terms), 1.0 / lv.exponent);
}

/// Nested norm of peak-normalized values; levels outermost first, values laid
/// out with the innermost level fastest.
double nested(std::vector<double> values, const std::vector<Level>& levels) {
  for (std::size_t l = levels.size(); l-- > 0;) {
    const std::size_t n = levels[l].weights.size();
    std::vector<double> next(values.size() / n);
    for (std::size_t b = 0; b < next.size(); ++b) {
      next[b] = reduce(std::span<const double>(values).subspan(b * n, n), levels[l]);
    }
    values = std::move(next);
  }
  return values.at(0);
}

std::vector<std::vector<double>> points_of(const GridSpec& g) {
  std::vector<std::vector<double>> pts;
  for_each_node(g, [&](std::span<const double> p, double) { pts.emplace_back(p.begin(), p.end()); });
  return pts;
}

struct Sampled {
  std::vector<double> values;
  double peak = 0.0;
};

/// Samples F over the product of the given grids (first grid outermost).
template <class F>
Sampled sample(const std::vector<GridSpec>& grids, F&& f) {
  std::vector<std::vector<std::vector<double>>> pts;
  for (const auto& g : grids) pts.push_back(points_of(g));
  std::size_t total = 1;
  for (const auto& p : pts) total *= p.size();
  Sampled s;
  s.values.resize(total);
  std::vector<std::size_t> idx(grids.size(), 0);
  for (std::size_t i = 0; i < total; ++i) {
    std::size_t rem = i;
    for (std::size_t l = grids.size(); l-- > 0;) {
      idx[l] = rem % pts[l].size();
      rem /= pts[l].size();
    }
    std::vector<std::span<const double>> args;
    for (std::size_t l = 0; l < grids.size(); ++l) args.emplace_back(pts[l][idx[l]]);
    s.values[i] = f(args);
    s.peak = std::max(s.peak, std::abs(s.values[i]));
  }
  return s;
}

double normalized_nested(Sampled s, const std::vector<Level>& levels) {
  if (s.peak == 0.0) return 0.0;
  if (!std::isfinite(s.peak)) throw MalformedInput(kModule, "non-finite sample");
  for (double& v : s.values) v /= s.peak;
  return s.peak * nested(std::move(s.values), levels);
}

template <class F>
MixedNormResult nested_norm(const std::vector<GridSpec>& grids, const std::vector<ExtRational>& exps, F&& f) {
  MixedNormResult r;
  auto run = [&](const std::vector<GridSpec>& gs, double* peak) {
    std::vector<Level> levels;
    for (std::size_t l = 0; l < gs.size(); ++l) levels.push_back(make_level(gs[l], exps[l]));
    Sampled s = sample(gs, f);
    if (peak) *peak = s.peak;
    return normalized_nested(std::move(s), levels);
  };
  for (const auto& g : grids) g.validate();
  r.value = run(grids, &r.peak_scale);
  std::vector<GridSpec> coarse;
  for (const auto& g : grids) coarse.push_back(g.coarsened());
  r.error = std::abs(r.value - run(coarse, nullptr));
  for (const auto& e : exps) r.exponents.push_back(e.str());
  r.grids = grids;
  return r;
}

}  // namespace

MixedNormResult mixed_norm(const SpaceTimePhaseEvaluator& f, const ExtRational& q, const ExtRational& p,
                           const ExtRational& r, const GridSpec& t_grid, const GridSpec& x_grid,
                           const GridSpec& v_grid) {
  if (t_grid.dimension() != 1) throw MalformedInput(kModule, "t-grid must have one axis");
  if (x_grid.dimension() != v_grid.dimension()) throw MalformedInput(kModule, "x- and v-grids differ in dimension");
  return nested_norm({t_grid, x_grid, v_grid}, {q, p, r}, [&](const std::vector<std::span<const double>>& a) {
    return f(a[0][0], a[1], a[2]);
  });
}

MixedNormResult spacetime_norm(const SpaceTimeEvaluator& g, const ExtRational& q, const ExtRational& p,
                               const GridSpec& t_grid, const GridSpec& x_grid) {
  if (t_grid.dimension() != 1) throw MalformedInput(kModule, "t-grid must have one axis");
  return nested_norm({t_grid, x_grid}, {q, p},
                     [&](const std::vector<std::span<const double>>& a) { return g(a[0][0], a[1]); });
}

MixedNormResult phase_space_norm(const transport::PhaseSpaceEvaluator& f, const ExtRational& a,
                                 const GridSpec& x_grid, const GridSpec& v_grid) {
  GridSpec joint = x_grid;
  const int d = x_grid.dimension();
  for (const auto& ax : v_grid.axes) joint.axes.push_back(ax);
  MixedNormResult r = nested_norm({joint}, {a}, [&](const std::vector<std::span<const double>>& s) {
    return f(s[0].first(d), s[0].subspan(d));
  });
  r.grids = {x_grid, v_grid};
  return r;
}

MixedNormResult lebesgue_norm(const SpaceTimePhaseEvaluator& f, const ExtRational& a, const GridSpec& t_grid,
                              const GridSpec& x_grid, const GridSpec& v_grid) {
  GridSpec joint = t_grid;
  const int d = x_grid.dimension();
  for (const auto& ax : x_grid.axes) joint.axes.push_back(ax);
  for (const auto& ax : v_grid.axes) joint.axes.push_back(ax);
  MixedNormResult r = nested_norm({joint}, {a}, [&](const std::vector<std::span<const double>>& s) {
    return f(s[0][0], s[0].subspan(1, d), s[0].subspan(1 + d));
  });
  r.grids = {t_grid, x_grid, v_grid};
  return r;
}

GridSpec support_grid(const Box& box, int count, Rule rule) {
  GridSpec g;
  for (const auto& iv : box) g.axes.push_back({iv.lo, iv.hi, count, rule});
  return g;
}

// ---------------------------------------------------------------------------

namespace {

double lp_sum(std::span<const double> values, std::span<const double> weights, const ExtRational& e) {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  if (e.is_infinite() || m == 0.0) return m;
  const double ex = e.to_double();
  std::vector<double> terms(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) terms[i] = weights[i] * std::pow(std::abs(values[i]) / m, ex);
  return m * std::pow(pairwise_sum(terms), 1.0 / ex);
}

double ratio_numerator(const PhaseSpaceFunction& f0, const PhaseSpacePtr& shared, const exponents::ExponentTuple& e,
                       int theta_nodes, int x_nodes, int v_nodes, int workers) {
  const int d = f0.dimension();
  transport::PointQuadrature pq;
  pq.count = v_nodes;
  const transport::DensityField rho = transport::density(shared, pq);
  const double scale = f0.time_scale();
  const Nodes theta = interval_nodes(-0.5 * std::numbers::pi, 0.5 * std::numbers::pi, theta_nodes,
                                     Rule::gauss_legendre);
  const Box sx = f0.support_x(), sv = f0.support_v();
  const auto slices = parallel_map<double>(theta.x.size(), workers, [&](std::size_t i) {
    const double t = scale * std::tan(theta.x[i]);
    Box box;
    for (int k = 0; k < d; ++k) {
      box.push_back({sx[k].lo + std::min(t * sv[k].lo, t * sv[k].hi), sx[k].hi + std::max(t * sv[k].lo, t * sv[k].hi)});
    }
    std::vector<double> vals, ws;
    const GridSpec g = support_grid(box, x_nodes);
    for_each_node(g, [&](std::span<const double> x, double w) {
      vals.push_back(rho(t, x));
      ws.push_back(w);
    });
    return lp_sum(vals, ws, e.p);
  });
  std::vector<double> ws(theta.x.size());
  for (std::size_t i = 0; i < ws.size(); ++i) {
    const double c = std::cos(theta.x[i]);
    ws[i] = theta.w[i] * scale / (c * c);
  }
  return lp_sum(slices, ws, e.q);
}

}  // namespace

RatioResult strichartz_ratio(const PhaseSpaceFunction& f0, const exponents::ExponentTuple& e, const RatioGrids& grids) {
  if (e.r != ExtRational(1)) throw MalformedInput(kModule, "strichartz_ratio needs r = 1");
  if (!e.is_lebesgue()) throw MalformedInput(kModule, "exponents must be >= 1");
  // Non-owning handle for the density evaluator.
  const PhaseSpacePtr shared(&f0, [](const PhaseSpaceFunction*) {});
  auto evaluate = [&](int nt, int nx, int nv, int nn) {
    RatioResult r;
    r.numerator = ratio_numerator(f0, shared, e, nt, nx, nv, grids.workers);
    const MixedNormResult den =
        phase_space_norm([&](std::span<const double> x, std::span<const double> v) { return f0(x, v); }, e.a,
                         support_grid(f0.support_x(), nn), support_grid(f0.support_v(), nn));
    r.denominator = den.value;
    if (!(r.denominator > 0.0)) throw DegenerateInput(kModule, "||f0||_a vanishes");
    r.value = r.numerator / r.denominator;
    return r;
  };
  RatioResult r = evaluate(grids.theta_nodes, grids.x_nodes, grids.v_nodes, grids.norm_nodes);
  const RatioResult c = evaluate(std::max(2, grids.theta_nodes / 2), std::max(2, grids.x_nodes / 2),
                                 std::max(2, grids.v_nodes / 2), std::max(2, grids.norm_nodes / 2));
  r.error = std::abs(r.value - c.value);
  return r;
}

// ---------------------------------------------------------------------------

AdjointGrid AdjointGrid::coarsened() const {
  AdjointGrid c = *this;
  c.ball = ball.coarsened();
  c.x_nodes = std::max(2, x_nodes / 2);
  c.t_nodes = std::max(2, t_nodes / 2);
  return c;
}

Estimate ShellSeries::cumulative(std::size_t k) const {
  double f = 0.0, c = 0.0;
  for (std::size_t i = 0; i < k && i < fine.size(); ++i) {
    f += fine[i];
    c += coarse[i];
  }
  return {f, std::abs(f - c)};
}

namespace {

double shell_node_integral(const SpaceTimeFunction& g, const transport::AdjointField& adj, double s,
                           std::span<const double> v, const AdjointGrid& grid) {
  const int d = g.dimension();
  const double fraction = grid.domain_fraction > 0.0 ? grid.domain_fraction : std::pow(kTailFraction, 1.0 / s);
  const double rx = g.spatial_radius(fraction), rt = g.temporal_radius(fraction);
  const Box sx = g.support_x();
  const double tc = g.support_t().center();
  double speed = 0.0;
  for (int k = 0; k < d; ++k) speed += v[k] * v[k];
  speed = std::sqrt(speed);
  const auto e = detail::frame_along(v, d);
  std::array<double, 3> center{};
  for (int k = 0; k < d; ++k) center[k] = sx[k].center() - tc * v[k];
  Box box;
  box.push_back({-(rx + rt * speed), rx + rt * speed});
  for (int k = 1; k < d; ++k) box.push_back({-rx, rx});

  auto to_x = [&](const double* u) {
    std::array<double, 3> x = center;
    for (int j = 0; j < d; ++j) {
      for (int k = 0; k < d; ++k) x[k] += u[j] * e[j][k];
    }
    return x;
  };
  double peak = 0.0;
  const double value = detail::box_integrate(box, grid.x_nodes, Rule::gauss_legendre, [&](const double* u) {
    const auto x = to_x(u);
    const double a = std::abs(adj(std::span<const double>(x.data(), d), v));
    const double w = std::pow(a, s);
    peak = std::max(peak, w);
    return w;
  });
  // Face centres of the frame box.
  for (int j = 0; j < d; ++j) {
    for (double side : {-1.0, 1.0}) {
      std::array<double, 3> u{};
      u[j] = side * box[j].hi;
      const auto x = to_x(u.data());
      const double w = std::pow(std::abs(adj(std::span<const double>(x.data(), d), v)), s);
      if (w > grid.escape_fraction * peak && w > 0.0) {
        throw TruncationError(kModule, "x-domain does not cover rho* g at |v| = " + std::to_string(speed));
      }
    }
  }
  return value;
}

std::vector<double> shell_sums(const SpaceTimeFunction& g, double s, std::span<const double> boundaries,
                               const AdjointGrid& grid) {
  const int d = g.dimension();
  const SpaceTimePtr shared(&g, [](const SpaceTimeFunction*) {});
  transport::PointQuadrature pq;
  pq.count = grid.t_nodes;
  pq.escape_fraction = grid.escape_fraction;
  const transport::AdjointField adj = transport::adjoint_density(shared, pq);
  const auto shells = ball_shells(d, boundaries, grid.ball);
  struct Task {
    std::size_t shell;
    const BallNode* node;
  };
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < shells.size(); ++i) {
    for (const auto& n : shells[i].nodes) tasks.push_back({i, &n});
  }
  const auto values = parallel_map<double>(tasks.size(), grid.workers, [&](std::size_t i) {
    const BallNode& n = *tasks[i].node;
    return n.weight * shell_node_integral(g, adj, s, std::span<const double>(n.v, d), grid);
  });
  std::vector<double> out(shells.size(), 0.0);
  std::size_t pos = 0;
  for (std::size_t i = 0; i < shells.size(); ++i) {
    const std::size_t n = shells[i].nodes.size();
    out[i] = pairwise_sum(std::span<const double>(values).subspan(pos, n));
    pos += n;
  }
  return out;
}

}  // namespace

ShellSeries adjoint_power_shells(const SpaceTimeFunction& g, double s, std::span<const double> boundaries,
                                 const AdjointGrid& grid) {
  if (!(s >= 1.0)) throw MalformedInput(kModule, "power must be >= 1");
  if (boundaries.size() < 2 || boundaries.front() != 0.0) {
    throw MalformedInput(kModule, "shell boundaries must start at 0");
  }
  ShellSeries out;
  out.boundaries.assign(boundaries.begin(), boundaries.end());
  out.fine = shell_sums(g, s, boundaries, grid);
  out.coarse = shell_sums(g, s, boundaries, grid.coarsened());
  return out;
}

Estimate adjoint_power_integral(const SpaceTimeFunction& g, double s, double v_radius, const AdjointGrid& grid) {
  if (!(v_radius > 0.0)) throw MalformedInput(kModule, "v-radius must be positive");
  const auto b = shell_boundaries(v_radius, grid.ball);
  const ShellSeries series = adjoint_power_shells(g, s, b, grid);
  return series.cumulative(series.fine.size());
}

// ---------------------------------------------------------------------------

DualRatioResult dual_ratio_sigma(const SpaceTimeFunction& g, const ExtRational& sigma, const DualGrids& grids) {
  const int d = g.dimension();
  if (!(sigma > ExtRational(1))) {
    throw EndpointDivergence(kModule, "a' = sigma (d+1) must exceed d+1; the endpoint is handled by endpoint_lab");
  }
  DualRatioResult r;
  r.sigma = sigma;
  r.a_dual = sigma * ExtRational(d + 1);
  r.q_dual = exponents::q_of_sigma(sigma, d);
  if (r.a_dual.is_infinite()) throw MalformedInput(kModule, "sigma must be finite");
  const double a = r.a_dual.to_double();
  const Estimate lhs = adjoint_power_integral(g, a, grids.v_radius, grids.adjoint);
  r.numerator = std::pow(lhs.value, 1.0 / a);
  const MixedNormResult den =
      spacetime_norm([&](double t, std::span<const double> x) { return g(t, x); }, r.q_dual,
                     r.a_dual / ExtRational(2), support_grid({g.support_t()}, grids.t_nodes),
                     support_grid(g.support_x(), grids.x_nodes));
  r.denominator = den.value;
  if (!(r.denominator > 0.0)) throw DegenerateInput(kModule, "||g|| vanishes");
  r.value = r.numerator / r.denominator;
  const double num_err = lhs.value > 0.0 ? r.numerator * lhs.error / (a * lhs.value) : 0.0;
  r.error = r.value * (num_err / std::max(r.numerator, 1e-300) + den.error / r.denominator);
  return r;
}

DualRatioResult dual_ratio(const SpaceTimeFunction& g, const exponents::ExponentTuple& e, const DualGrids& grids) {
  const int d = g.dimension();
  const exponents::DualTriple dual = exponents::dualize_reduced(e, d);
  if (dual.a <= ExtRational(d + 1)) {
    throw EndpointDivergence(kModule, "a' = " + dual.a.str() + " <= d+1: endpoint, see endpoint_lab");
  }
  return dual_ratio_sigma(g, dual.a / ExtRational(d + 1), grids);
}

}  // namespace kinlab::mixed_norms
