#include "kinlab/transport.hpp"

#include <array>
#include <cmath>

#include "kinlab/detail/box_quadrature.hpp"
#include "kinlab/error.hpp"
#include "kinlab/parallel.hpp"

namespace kinlab::transport {

namespace {

const char* kModule = "transport";

Box fixed_box(const GridSpec& g) {
  Box b;
  for (const auto& a : g.axes) b.push_back({a.lo, a.hi});
  return b;
}

void check_fixed(const PointQuadrature& q, int dim) {
  if (!q.fixed) return;
  q.fixed->validate();
  if (q.fixed->dimension() != dim) throw MalformedInput(kModule, "quadrature grid has the wrong dimension");
  for (const auto& a : q.fixed->axes) {
    if (a.rule != q.fixed->axes[0].rule || a.count != q.fixed->axes[0].count) {
      throw MalformedInput(kModule, "per-point grids must use one rule and count on every axis");
    }
  }
}

PointQuadrature from_grid(const GridSpec& grid) {
  PointQuadrature q;
  q.fixed = grid;
  if (!grid.axes.empty()) {
    q.count = grid.axes[0].count;
    q.rule = grid.axes[0].rule;
  }
  return q;
}

}  // namespace

const char* provenance_name(Provenance p) { return p == Provenance::quadrature ? "quadrature" : "closed-form"; }

PhaseSpaceEvaluator propagate(PhaseSpacePtr f0, double t) {
  return [f0 = std::move(f0), t](std::span<const double> x, std::span<const double> v) {
    std::array<double, 3> y{};
    const int d = f0->dimension();
    for (int k = 0; k < d; ++k) y[k] = x[k] - t * v[k];
    return (*f0)(std::span<const double>(y.data(), d), v);
  };
}

// ---------------------------------------------------------------------------

DensityField::DensityField(PhaseSpacePtr f0, PointQuadrature quad, Provenance provenance)
    : f0_(std::move(f0)), quad_(std::move(quad)), provenance_(provenance) {
  if (!f0_) throw MalformedInput(kModule, "null input");
  if (f0_->dimension() > 3) throw MalformedInput(kModule, "dimension must be <= 3");
  check_fixed(quad_, f0_->dimension());
  if (quad_.count < 2) throw MalformedInput(kModule, "quadrature count must be >= 2");
  if (provenance_ == Provenance::closed_form && !dynamic_cast<const GaussianPhaseSpace*>(f0_.get())) {
    throw MalformedInput(kModule, "closed-form density needs a Gaussian input");
  }
}

std::optional<double> DensityField::closed_form(double t, std::span<const double> x) const {
  if (const auto* g = dynamic_cast<const GaussianPhaseSpace*>(f0_.get())) return g->density_closed_form(t, x);
  return std::nullopt;
}

double DensityField::integrate(double t, std::span<const double> x, int count, bool check) const {
  const int d = f0_->dimension();
  Box box;
  if (quad_.fixed) {
    box = fixed_box(*quad_.fixed);
  } else {
    const Box sx = f0_->support_x(), sv = f0_->support_v();
    for (int k = 0; k < d; ++k) {
      Interval iv = sv[k];
      if (t != 0.0) {
        double lo = (x[k] - sx[k].hi) / t, hi = (x[k] - sx[k].lo) / t;
        if (t < 0.0) std::swap(lo, hi);
        iv = {std::max(iv.lo, lo), std::min(iv.hi, hi)};
      } else if (x[k] < sx[k].lo || x[k] > sx[k].hi) {
        return 0.0;
      }
      box.push_back(iv);
    }
  }
  auto integrand = [&](const double* v) {
    std::array<double, 3> y{};
    for (int k = 0; k < d; ++k) y[k] = x[k] - t * v[k];
    return (*f0_)(std::span<const double>(y.data(), d), std::span<const double>(v, d));
  };
  if (check) {
    const double edge = detail::box_boundary_max(box, count, quad_.rule, integrand);
    if (edge > quad_.escape_fraction * f0_->peak()) {
      throw TruncationError(kModule, "v-grid does not cover the integrand at t = " + std::to_string(t) +
                                         " (boundary value " + std::to_string(edge) + ")");
    }
  }
  return detail::box_integrate(box, count, quad_.rule, integrand);
}

double DensityField::operator()(double t, std::span<const double> x) const {
  if (provenance_ == Provenance::closed_form) return *closed_form(t, x);
  return integrate(t, x, quad_.count, true);
}

Estimate DensityField::evaluate(double t, std::span<const double> x) const {
  if (provenance_ == Provenance::closed_form) return {*closed_form(t, x), 0.0};
  const double fine = integrate(t, x, quad_.count, true);
  const double coarse = integrate(t, x, std::max(2, quad_.count / 2), false);
  return {fine, std::abs(fine - coarse)};
}

DensityField density(PhaseSpacePtr f0, PointQuadrature quad) {
  return DensityField(std::move(f0), std::move(quad), Provenance::quadrature);
}

DensityField density(PhaseSpacePtr f0, const GridSpec& v_grid) {
  return DensityField(std::move(f0), from_grid(v_grid), Provenance::quadrature);
}

DensityField density_closed_form(PhaseSpacePtr f0) {
  return DensityField(std::move(f0), PointQuadrature{}, Provenance::closed_form);
}

// ---------------------------------------------------------------------------

Interval adjoint_time_window(const SpaceTimeFunction& g, std::span<const double> x, std::span<const double> v,
                             double fraction) {
  const int d = g.dimension();
  const Box sx = g.support_x();
  const Interval st = g.support_t();
  const double radius = g.spatial_radius(fraction);
  const double tc = st.center(), rt = g.temporal_radius(fraction);
  Interval window{tc - rt, tc + rt};
  // |x - c + t v|^2 <= radius^2
  double a = 0.0, b = 0.0, c = -radius * radius;
  for (int k = 0; k < d; ++k) {
    const double y = x[k] - sx[k].center();
    a += v[k] * v[k];
    b += 2.0 * y * v[k];
    c += y * y;
  }
  if (a == 0.0) {
    if (c > 0.0) return {0.0, 0.0};
    return window;
  }
  const double disc = b * b - 4.0 * a * c;
  if (disc <= 0.0) return {0.0, 0.0};
  const double root = std::sqrt(disc);
  // Stable roots of a t^2 + b t + c.
  const double qq = -0.5 * (b + std::copysign(root, b));
  double t1 = qq / a, t2 = qq != 0.0 ? c / qq : -t1;
  if (t1 > t2) std::swap(t1, t2);
  return {std::max(window.lo, t1), std::min(window.hi, t2)};
}

AdjointField::AdjointField(SpaceTimePtr g, PointQuadrature quad, Provenance provenance)
    : g_(std::move(g)), quad_(std::move(quad)), provenance_(provenance) {
  if (!g_) throw MalformedInput(kModule, "null input");
  if (g_->dimension() > 3) throw MalformedInput(kModule, "dimension must be <= 3");
  check_fixed(quad_, 1);
  if (quad_.count < 2) throw MalformedInput(kModule, "quadrature count must be >= 2");
  if (provenance_ == Provenance::closed_form && !dynamic_cast<const GaussianSpaceTime*>(g_.get())) {
    throw MalformedInput(kModule, "closed-form adjoint needs a Gaussian input");
  }
}

std::optional<double> AdjointField::closed_form(std::span<const double> x, std::span<const double> v) const {
  if (const auto* g = dynamic_cast<const GaussianSpaceTime*>(g_.get())) return g->adjoint_closed_form(x, v);
  return std::nullopt;
}

double AdjointField::integrate(std::span<const double> x, std::span<const double> v, int count, bool check) const {
  const int d = g_->dimension();
  const Interval w = quad_.fixed ? Interval{quad_.fixed->axes[0].lo, quad_.fixed->axes[0].hi}
                                 : adjoint_time_window(*g_, x, v);
  if (!(w.hi > w.lo)) return 0.0;
  auto integrand = [&](const double* t) {
    std::array<double, 3> y{};
    for (int k = 0; k < d; ++k) y[k] = x[k] + *t * v[k];
    return (*g_)(*t, std::span<const double>(y.data(), d));
  };
  const Box box{w};
  if (check) {
    const double edge = detail::box_boundary_max(box, count, quad_.rule, integrand);
    if (edge > quad_.escape_fraction * g_->peak()) {
      throw TruncationError(kModule, "t-grid does not cover the integrand (boundary value " +
                                         std::to_string(edge) + ")");
    }
  }
  return detail::box_integrate(box, count, quad_.rule, integrand);
}

double AdjointField::operator()(std::span<const double> x, std::span<const double> v) const {
  if (provenance_ == Provenance::closed_form) return *closed_form(x, v);
  return integrate(x, v, quad_.count, true);
}

Estimate AdjointField::evaluate(std::span<const double> x, std::span<const double> v) const {
  if (provenance_ == Provenance::closed_form) return {*closed_form(x, v), 0.0};
  const double fine = integrate(x, v, quad_.count, true);
  const double coarse = integrate(x, v, std::max(2, quad_.count / 2), false);
  return {fine, std::abs(fine - coarse)};
}

AdjointField adjoint_density(SpaceTimePtr g, PointQuadrature quad) {
  return AdjointField(std::move(g), std::move(quad), Provenance::quadrature);
}

AdjointField adjoint_density(SpaceTimePtr g, const GridSpec& t_grid) {
  return AdjointField(std::move(g), from_grid(t_grid), Provenance::quadrature);
}

AdjointField adjoint_closed_form(SpaceTimePtr g) {
  return AdjointField(std::move(g), PointQuadrature{}, Provenance::closed_form);
}

// ---------------------------------------------------------------------------

namespace {

// Outer tensor quadrature split along the first axis; one task per node of
// that axis, reduced in index order.
template <class F>
double outer_integral(const Box& box, int count, int workers, F&& f) {
  const Nodes first = interval_nodes(box[0].lo, box[0].hi, count, Rule::gauss_legendre);
  const Box rest(box.begin() + 1, box.end());
  const auto parts = parallel_map<double>(first.x.size(), workers, [&](std::size_t i) {
    const double x0 = first.x[i];
    return first.w[i] * detail::box_integrate(rest, count, Rule::gauss_legendre, [&](const double* p) {
             std::array<double, detail::kMaxBoxDim> full{};
             full[0] = x0;
             for (std::size_t k = 0; k < rest.size(); ++k) full[k + 1] = p[k];
             return f(full.data());
           });
  });
  return pairwise_sum(parts);
}

}  // namespace

DualityPairing duality_pairing(PhaseSpacePtr f0, SpaceTimePtr g, const PairingQuadrature& quad) {
  const int d = f0->dimension();
  if (g->dimension() != d) throw MalformedInput(kModule, "dimension mismatch");

  auto density_side = [&](int outer, int inner) {
    PointQuadrature pq;
    pq.count = inner;
    const DensityField rho = density(f0, pq);
    Box box{g->support_t()};
    for (const auto& iv : g->support_x()) box.push_back(iv);
    return outer_integral(box, outer, quad.workers, [&](const double* p) {
      const std::span<const double> x(p + 1, d);
      const double gv = (*g)(p[0], x);
      return gv == 0.0 ? 0.0 : gv * rho(p[0], x);
    });
  };
  auto adjoint_side = [&](int outer, int inner) {
    PointQuadrature pq;
    pq.count = inner;
    const AdjointField adj = adjoint_density(g, pq);
    Box box = f0->support_x();
    for (const auto& iv : f0->support_v()) box.push_back(iv);
    return outer_integral(box, outer, quad.workers, [&](const double* p) {
      const std::span<const double> x(p, d), v(p + d, d);
      const double fv = (*f0)(x, v);
      return fv == 0.0 ? 0.0 : fv * adj(x, v);
    });
  };

  DualityPairing out;
  const double ds = density_side(quad.outer, quad.inner);
  const double as = adjoint_side(quad.outer, quad.inner);
  out.density_side = {ds, std::abs(ds - density_side(std::max(2, quad.outer / 2), std::max(2, quad.inner / 2)))};
  out.adjoint_side = {as, std::abs(as - adjoint_side(std::max(2, quad.outer / 2), std::max(2, quad.inner / 2)))};
  return out;
}

namespace {

std::vector<std::vector<double>> grid_points(const GridSpec& grid) {
  std::vector<std::vector<double>> pts;
  pts.reserve(grid.size());
  for_each_node(grid, [&](std::span<const double> p, double) { pts.emplace_back(p.begin(), p.end()); });
  return pts;
}

}  // namespace

std::vector<Sample> sample_density(const DensityField& rho, const GridSpec& grid, int workers) {
  if (grid.dimension() != 1 + rho.dimension()) throw MalformedInput(kModule, "sampling grid must have 1 + d axes");
  const auto pts = grid_points(grid);
  return parallel_map<Sample>(pts.size(), workers, [&](std::size_t i) {
    const auto& p = pts[i];
    return Sample{p, rho(p[0], std::span<const double>(p).subspan(1))};
  });
}

std::vector<Sample> sample_adjoint(const AdjointField& field, const GridSpec& grid, int workers) {
  const int d = field.dimension();
  if (grid.dimension() != 2 * d) throw MalformedInput(kModule, "sampling grid must have 2d axes");
  const auto pts = grid_points(grid);
  return parallel_map<Sample>(pts.size(), workers, [&](std::size_t i) {
    const auto& p = pts[i];
    const std::span<const double> s(p);
    return Sample{p, field(s.first(d), s.subspan(d))};
  });
}

}  // namespace kinlab::transport
