#include "kinlab/functions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "kinlab/error.hpp"

namespace kinlab {

namespace {

const char* kModule = "testfunctions";
constexpr double kPi = std::numbers::pi;

std::vector<double> center_or_origin(const std::vector<double>& c, int d, const char* what) {
  if (c.empty()) return std::vector<double>(d, 0.0);
  if (static_cast<int>(c.size()) != d) {
    throw MalformedInput(kModule, std::string(what) + " has wrong dimension");
  }
  return c;
}

void require_width(double w, const char* what) {
  if (!(w > 0.0) || !std::isfinite(w)) {
    throw MalformedInput(kModule, std::string(what) + " must be positive, got " + std::to_string(w));
  }
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Fraction of the peak |B(z)| may keep beyond the support radius of Phi, so
// that g = c Phi^2 stays below 1e-9 of its peak there.
constexpr double kInverseTailFraction = 3.1622776601683795e-5;

}  // namespace

double gaussian_tail_radius(double width) {
  return width * std::sqrt(-std::log(kTailFraction) / kPi);
}

// ---------------------------------------------------------------------------

PhaseSpaceFunction::PhaseSpaceFunction(int d) : d_(d) {
  if (d < 1) throw MalformedInput(kModule, "dimension must be >= 1");
}

std::optional<double> PhaseSpaceFunction::lebesgue_norm(double) const { return std::nullopt; }

double PhaseSpaceFunction::time_scale() const {
  const Box bx = support_x(), bv = support_v();
  double s = 0.0;
  for (int k = 0; k < d_; ++k) s += bx[k].width() / bv[k].width();
  return s / d_;
}

SpaceTimeFunction::SpaceTimeFunction(int d) : d_(d) {
  if (d < 1) throw MalformedInput(kModule, "dimension must be >= 1");
}

std::complex<double> SpaceTimeFunction::fourier(double, std::span<const double>) const {
  throw MalformedInput(kModule, "function has no closed-form Fourier transform");
}

Interval SpaceTimeFunction::fourier_support_tau() const {
  throw MalformedInput(kModule, "function has no closed-form Fourier transform");
}

Box SpaceTimeFunction::fourier_support_xi() const {
  throw MalformedInput(kModule, "function has no closed-form Fourier transform");
}

double SpaceTimeFunction::spatial_radius(double) const {
  double r2 = 0.0;
  for (const auto& iv : support_x()) r2 += 0.25 * iv.width() * iv.width();
  return std::sqrt(r2);
}

double SpaceTimeFunction::temporal_radius(double) const { return 0.5 * support_t().width(); }

double SpaceTimeFunction::frequency_radius() const {
  double r2 = 0.0;
  for (const auto& iv : fourier_support_xi()) {
    const double m = std::max(std::abs(iv.lo), std::abs(iv.hi));
    r2 += m * m;
  }
  return std::sqrt(r2);
}

std::optional<double> SpaceTimeFunction::slice_norm(double, double) const { return std::nullopt; }
std::optional<double> SpaceTimeFunction::mixed_norm(double, double) const { return std::nullopt; }

double gaussian_lp_norm(double p, int d) {
  if (std::isinf(p)) return 1.0;
  return std::pow(p, -0.5 * d / p);
}

// ---------------------------------------------------------------------------
// GaussianPhaseSpace

GaussianPhaseSpace::GaussianPhaseSpace(GaussianPhaseSpaceParams params)
    : PhaseSpaceFunction(params.d), p_(std::move(params)) {
  require_width(p_.width_x, "width_x");
  require_width(p_.width_v, "width_v");
  p_.x0 = center_or_origin(p_.x0, p_.d, "x0");
  p_.v0 = center_or_origin(p_.v0, p_.d, "v0");
}

double GaussianPhaseSpace::operator()(std::span<const double> x, std::span<const double> v) const {
  double e = 0.0;
  const double ix = 1.0 / (p_.width_x * p_.width_x), iv = 1.0 / (p_.width_v * p_.width_v);
  for (int k = 0; k < p_.d; ++k) {
    const double dx = x[k] - p_.x0[k], dv = v[k] - p_.v0[k];
    e += dx * dx * ix + dv * dv * iv;
  }
  return p_.amplitude * std::exp(-kPi * e);
}

Box GaussianPhaseSpace::support_x() const {
  const double r = gaussian_tail_radius(p_.width_x);
  Box b;
  for (double c : p_.x0) b.push_back({c - r, c + r});
  return b;
}

Box GaussianPhaseSpace::support_v() const {
  const double r = gaussian_tail_radius(p_.width_v);
  Box b;
  for (double c : p_.v0) b.push_back({c - r, c + r});
  return b;
}

std::optional<double> GaussianPhaseSpace::lebesgue_norm(double p) const {
  if (std::isinf(p)) return std::abs(p_.amplitude);
  const double d = p_.d;
  return std::abs(p_.amplitude) * std::pow(p_.width_x * p_.width_v, d / p) * std::pow(p, -d / p);
}

double GaussianPhaseSpace::density_closed_form(double t, std::span<const double> x) const {
  const double sx2 = p_.width_x * p_.width_x, sv2 = p_.width_v * p_.width_v;
  const double alpha = t * t / sx2 + 1.0 / sv2;
  const double spread = sx2 + t * t * sv2;
  double e = 0.0;
  for (int k = 0; k < p_.d; ++k) {
    const double y = x[k] - p_.x0[k] - t * p_.v0[k];
    e += y * y;
  }
  return p_.amplitude * std::pow(alpha, -0.5 * p_.d) * std::exp(-kPi * e / spread);
}

GaussianPhaseSpace GaussianPhaseSpace::dilated(double mu, double nu) const {
  require_width(mu, "mu");
  require_width(nu, "nu");
  GaussianPhaseSpaceParams q = p_;
  q.width_x *= mu;
  q.width_v *= nu;
  for (auto& c : q.x0) c *= mu;
  for (auto& c : q.v0) c *= nu;
  return GaussianPhaseSpace(q);
}

// ---------------------------------------------------------------------------
// GaussianSpaceTime

GaussianSpaceTime::GaussianSpaceTime(GaussianSpaceTimeParams params)
    : SpaceTimeFunction(params.d), p_(std::move(params)) {
  require_width(p_.width_t, "width_t");
  require_width(p_.width_x, "width_x");
  p_.x0 = center_or_origin(p_.x0, p_.d, "x0");
}

double GaussianSpaceTime::operator()(double t, std::span<const double> x) const {
  const double dt = (t - p_.t0) / p_.width_t;
  double e = dt * dt;
  const double ix = 1.0 / (p_.width_x * p_.width_x);
  for (int k = 0; k < p_.d; ++k) {
    const double dx = x[k] - p_.x0[k];
    e += dx * dx * ix;
  }
  return p_.amplitude * std::exp(-kPi * e);
}

Interval GaussianSpaceTime::support_t() const {
  const double r = gaussian_tail_radius(p_.width_t);
  return {p_.t0 - r, p_.t0 + r};
}

Box GaussianSpaceTime::support_x() const {
  const double r = gaussian_tail_radius(p_.width_x);
  Box b;
  for (double c : p_.x0) b.push_back({c - r, c + r});
  return b;
}

double GaussianSpaceTime::spatial_radius(double fraction) const {
  return p_.width_x * std::sqrt(-std::log(std::min(fraction, 0.5)) / kPi);
}

double GaussianSpaceTime::temporal_radius(double fraction) const {
  return p_.width_t * std::sqrt(-std::log(std::min(fraction, 0.5)) / kPi);
}

double GaussianSpaceTime::frequency_radius() const {
  return std::sqrt(-4.0 * kPi * std::log(kTailFraction)) / p_.width_x;
}

std::complex<double> GaussianSpaceTime::fourier(double tau, std::span<const double> xi) const {
  const double st = p_.width_t, sx = p_.width_x;
  double xi2 = 0.0, phase = p_.t0 * tau;
  for (int k = 0; k < p_.d; ++k) {
    xi2 += xi[k] * xi[k];
    phase += p_.x0[k] * xi[k];
  }
  const double mag = p_.amplitude * st * std::pow(sx, p_.d) *
                     std::exp(-(st * st * tau * tau + sx * sx * xi2) / (4.0 * kPi));
  if (phase == 0.0) return {mag, 0.0};
  return std::polar(mag, -phase);
}

Interval GaussianSpaceTime::fourier_support_tau() const {
  const double r = std::sqrt(-4.0 * kPi * std::log(kTailFraction)) / p_.width_t;
  return {-r, r};
}

Box GaussianSpaceTime::fourier_support_xi() const {
  const double r = std::sqrt(-4.0 * kPi * std::log(kTailFraction)) / p_.width_x;
  return Box(p_.d, Interval{-r, r});
}

std::optional<double> GaussianSpaceTime::slice_norm(double t, double p) const {
  const double dt = (t - p_.t0) / p_.width_t;
  const double time_factor = std::abs(p_.amplitude) * std::exp(-kPi * dt * dt);
  if (std::isinf(p)) return time_factor;
  return time_factor * std::pow(p_.width_x, p_.d / p) * gaussian_lp_norm(p, p_.d);
}

std::optional<double> GaussianSpaceTime::mixed_norm(double q, double p) const {
  double v = std::abs(p_.amplitude);
  if (!std::isinf(p)) v *= std::pow(p_.width_x, p_.d / p) * gaussian_lp_norm(p, p_.d);
  if (!std::isinf(q)) v *= std::pow(p_.width_t, 1.0 / q) * gaussian_lp_norm(q, 1);
  return v;
}

double GaussianSpaceTime::adjoint_closed_form(std::span<const double> x, std::span<const double> v) const {
  const double sx2 = p_.width_x * p_.width_x;
  double v2 = 0.0, y2 = 0.0, yv = 0.0;
  for (int k = 0; k < p_.d; ++k) {
    const double y = x[k] - p_.x0[k] + p_.t0 * v[k];
    v2 += v[k] * v[k];
    y2 += y * y;
    yv += y * v[k];
  }
  const double alpha = 1.0 / (p_.width_t * p_.width_t) + v2 / sx2;
  return p_.amplitude / std::sqrt(alpha) * std::exp(-kPi * (y2 / sx2 - yv * yv / (sx2 * sx2 * alpha)));
}

GaussianSpaceTime GaussianSpaceTime::dilated(double mu, double nu) const {
  require_width(mu, "mu");
  require_width(nu, "nu");
  GaussianSpaceTimeParams q = p_;
  q.width_t *= mu;
  q.t0 *= mu;
  q.width_x *= nu;
  for (auto& c : q.x0) c *= nu;
  return GaussianSpaceTime(q);
}

GaussianSpaceTime GaussianSpaceTime::scaled(double factor) const {
  GaussianSpaceTimeParams q = p_;
  q.amplitude *= factor;
  return GaussianSpaceTime(q);
}

std::shared_ptr<GaussianPhaseSpace> make_gaussian_phase_space(GaussianPhaseSpaceParams params) {
  return std::make_shared<GaussianPhaseSpace>(std::move(params));
}

std::shared_ptr<GaussianSpaceTime> make_gaussian_spacetime(GaussianSpaceTimeParams params) {
  return std::make_shared<GaussianSpaceTime>(std::move(params));
}

// ---------------------------------------------------------------------------
// Combinators

namespace {

Box hull(const Box& a, const Box& b) {
  Box out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    out[k] = {std::min(a[k].lo, b[k].lo), std::max(a[k].hi, b[k].hi)};
  }
  return out;
}

}  // namespace

LinearCombination::LinearCombination(double alpha, PhaseSpacePtr f, double beta, PhaseSpacePtr h)
    : PhaseSpaceFunction(f->dimension()), alpha_(alpha), beta_(beta), f_(std::move(f)), h_(std::move(h)) {
  if (h_->dimension() != f_->dimension()) throw MalformedInput(kModule, "dimension mismatch");
}

double LinearCombination::operator()(std::span<const double> x, std::span<const double> v) const {
  return alpha_ * (*f_)(x, v) + beta_ * (*h_)(x, v);
}

Box LinearCombination::support_x() const { return hull(f_->support_x(), h_->support_x()); }
Box LinearCombination::support_v() const { return hull(f_->support_v(), h_->support_v()); }
double LinearCombination::peak() const {
  return std::abs(alpha_) * f_->peak() + std::abs(beta_) * h_->peak();
}

PoweredPhaseSpace::PoweredPhaseSpace(PhaseSpacePtr f, double lambda)
    : PhaseSpaceFunction(f->dimension()), f_(std::move(f)), lambda_(lambda) {
  require_width(lambda, "lambda");
}

double PoweredPhaseSpace::operator()(std::span<const double> x, std::span<const double> v) const {
  return std::pow(std::abs((*f_)(x, v)), lambda_);
}

double PoweredPhaseSpace::peak() const { return std::pow(f_->peak(), lambda_); }

// ---------------------------------------------------------------------------
// SmoothstepBump

SmoothstepBump::SmoothstepBump(double radius, int order) : radius_(radius), order_(order) {
  require_width(radius, "bump radius");
  if (order < 1 || order > 8) throw MalformedInput(kModule, "smoothstep order must be in [1, 8]");
  const int n = order;
  coeffs_.assign(2 * n + 2, 0.0);
  for (int k = 0; k <= n; ++k) {
    coeffs_[n + 1 + k] = (k % 2 == 0 ? 1.0 : -1.0) * binomial(n + k, k) * binomial(2 * n + 1, n - k);
  }
}

double SmoothstepBump::operator()(double s) const {
  const double u = 1.0 - std::abs(s) / radius_;
  if (u <= 0.0) return 0.0;
  double acc = 0.0;
  for (std::size_t k = coeffs_.size(); k-- > 0;) acc = acc * u + coeffs_[k];
  return acc;
}

double SmoothstepBump::square_integral() const {
  const Nodes n = interval_nodes(0.0, radius_, 32, Rule::gauss_legendre);
  double s = 0.0;
  for (std::size_t i = 0; i < n.x.size(); ++i) {
    const double b = (*this)(n.x[i]);
    s += n.w[i] * b * b;
  }
  return 2.0 * s;
}

double SmoothstepBump::self_convolution(double y) const {
  y = std::abs(y);
  const double R = radius_;
  if (y >= 2.0 * R) return 0.0;
  // s ranges over [y - R, R]; b(s) kinks at 0, b(y - s) kinks at y.
  std::vector<double> cuts{y - R, R};
  for (double c : {0.0, y}) {
    if (c > y - R && c < R) cuts.push_back(c);
  }
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] <= cuts[i]) continue;
    const Nodes n = interval_nodes(cuts[i], cuts[i + 1], 24, Rule::gauss_legendre);
    for (std::size_t j = 0; j < n.x.size(); ++j) total += n.w[j] * (*this)(n.x[j]) * (*this)(y - n.x[j]);
  }
  return total;
}

// ---------------------------------------------------------------------------
// BumpPairFunction

double BumpPairFunction::ConvTable::operator()(double y) const {
  y = std::abs(y);
  if (y >= 2.0 * radius) return 0.0;
  return y <= radius ? inner(y) : outer(y);
}

GridSpec default_inverse_grid(const BumpParams& params) {
  GridSpec g;
  g.axes.push_back({-params.radius_tau, params.radius_tau, 129, Rule::trapezoid});
  for (int k = 0; k < params.d; ++k) g.axes.push_back({-params.radius_xi, params.radius_xi, 129, Rule::trapezoid});
  return g;
}

double BumpPairFunction::direct(const SmoothstepBump& b, const Nodes& nodes, double z) const {
  double s = 0.0;
  for (std::size_t i = 0; i < nodes.x.size(); ++i) s += nodes.w[i] * b(nodes.x[i]) * std::cos(z * nodes.x[i]);
  return s;
}

double BumpPairFunction::cached(const AxisTable& table, const SmoothstepBump& b, const Nodes& nodes,
                                double z) const {
  z = std::abs(z);
  if (z >= table.extent) return direct(b, nodes, z);
  const auto i = static_cast<std::size_t>(z / table.panel);
  return table.panels[std::min(i, table.panels.size() - 1)](z);
}

BumpPairFunction::BumpPairFunction(BumpParams params, GridSpec inverse_grid)
    : SpaceTimeFunction(params.d),
      p_(params),
      grid_(std::move(inverse_grid)),
      b_tau_(params.radius_tau, params.order),
      b_xi_(params.radius_xi, params.order) {
  if (!(p_.amplitude > 0.0)) throw MalformedInput(kModule, "bump amplitude must be positive");
  grid_.validate();
  if (grid_.dimension() != 1 + p_.d) {
    throw MalformedInput(kModule, "inverse-transform grid must have 1 + d axes");
  }
  for (int k = 0; k <= p_.d; ++k) {
    const double R = k == 0 ? p_.radius_tau : p_.radius_xi;
    if (grid_.axes[k].lo > -R || grid_.axes[k].hi < R) {
      throw ResolutionError(kModule, "inverse-transform grid does not cover supp phi");
    }
    if (k >= 1 && (grid_.axes[k].lo != grid_.axes[1].lo || grid_.axes[k].hi != grid_.axes[1].hi ||
                   grid_.axes[k].count != grid_.axes[1].count || grid_.axes[k].rule != grid_.axes[1].rule)) {
      throw MalformedInput(kModule, "inverse-transform grid must use the same axis for every x_k");
    }
  }
  nodes_tau_ = axis_nodes(grid_.axes[0]);
  nodes_xi_ = axis_nodes(grid_.axes[1]);

  // Scan |B| up to the Nyquist limit pi/h. The support radius of Phi is the
  // last z where |B(z)| exceeds the tail fraction of B(0).
  struct Scan {
    double radius = 0.0;
    std::vector<double> z, envelope;
  };
  auto scan = [&](const SmoothstepBump& b, const Nodes& nodes, const AxisGrid& axis) {
    const double h = (axis.hi - axis.lo) / (axis.count - 1);
    const double nyquist = kPi / h;
    const double b0 = direct(b, nodes, 0.0);
    const double step = 0.05 / b.radius();
    const double scan_end = std::min(nyquist, 400.0 / b.radius());
    Scan out;
    for (double z = 0.0; z <= scan_end; z += step) {
      out.z.push_back(z);
      out.envelope.push_back(std::abs(direct(b, nodes, z)) / b0);
    }
    for (std::size_t i = out.envelope.size() - 1; i-- > 0;) {
      out.envelope[i] = std::max(out.envelope[i], out.envelope[i + 1]);
    }
    double last = 0.0;
    for (std::size_t i = 0; i < out.z.size(); ++i) {
      if (out.envelope[i] > kInverseTailFraction) last = out.z[i];
    }
    out.radius = last + step;
    if (out.radius >= 0.5 * scan_end) {
      throw ResolutionError(kModule, "inverse-transform grid too coarse: support radius " +
                                         std::to_string(out.radius) + " vs Nyquist limit " +
                                         std::to_string(nyquist));
    }
    return out;
  };
  Scan scan_tau = scan(b_tau_, nodes_tau_, grid_.axes[0]);
  Scan scan_xi = scan(b_xi_, nodes_xi_, grid_.axes[1]);
  z_tau_ = scan_tau.radius;
  z_xi_ = scan_xi.radius;

  auto build = [&](const SmoothstepBump& b, const Nodes& nodes, Scan& sc) {
    AxisTable t;
    t.panel = 0.5 / b.radius();
    const int count = static_cast<int>(std::ceil(1.5 * sc.radius / t.panel));
    t.extent = count * t.panel;
    for (int i = 0; i < count; ++i) {
      t.panels.emplace_back(i * t.panel, (i + 1) * t.panel, 16,
                            [&](double z) { return direct(b, nodes, z); });
    }
    t.scan_z = std::move(sc.z);
    t.scan_envelope = std::move(sc.envelope);
    return t;
  };
  table_tau_ = build(b_tau_, nodes_tau_, scan_tau);
  table_xi_ = build(b_xi_, nodes_xi_, scan_xi);

  auto conv = [&](const SmoothstepBump& b) {
    ConvTable c;
    c.radius = b.radius();
    const int n = 4 * b.order() + 4;
    c.inner = ChebyshevPanel(0.0, b.radius(), n, [&](double y) { return b.self_convolution(y); });
    c.outer = ChebyshevPanel(b.radius(), 2.0 * b.radius(), n, [&](double y) { return b.self_convolution(y); });
    return c;
  };
  conv_tau_ = conv(b_tau_);
  conv_xi_ = conv(b_xi_);

  norm_ = p_.amplitude * std::pow(2.0 * kPi, -(1.0 + p_.d));
  const std::vector<double> origin(p_.d, 0.0);
  peak_ = (*this)(0.0, origin);
}

double BumpPairFunction::inverse_transform_direct(int axis, double z) const {
  return axis == 0 ? direct(b_tau_, nodes_tau_, z) : direct(b_xi_, nodes_xi_, z);
}

double BumpPairFunction::inverse_transform(int axis, double z) const {
  return axis == 0 ? cached(table_tau_, b_tau_, nodes_tau_, z) : cached(table_xi_, b_xi_, nodes_xi_, z);
}

double BumpPairFunction::operator()(double t, std::span<const double> x) const {
  double phi = cached(table_tau_, b_tau_, nodes_tau_, t);
  for (int k = 0; k < p_.d; ++k) phi *= cached(table_xi_, b_xi_, nodes_xi_, x[k]);
  return norm_ * phi * phi;
}

double BumpPairFunction::halfwidth(int axis, double fraction) const {
  if (fraction <= kTailFraction) return axis == 0 ? z_tau_ : z_xi_;
  const AxisTable& t = axis == 0 ? table_tau_ : table_xi_;
  const double threshold = std::sqrt(fraction);
  for (std::size_t i = 0; i < t.scan_z.size(); ++i) {
    if (t.scan_envelope[i] <= threshold) return std::max(t.scan_z[i], t.panel);
  }
  return axis == 0 ? z_tau_ : z_xi_;
}

double BumpPairFunction::spatial_radius(double fraction) const {
  return std::sqrt(static_cast<double>(p_.d)) * halfwidth(1, fraction);
}

double BumpPairFunction::temporal_radius(double fraction) const { return halfwidth(0, fraction); }

double BumpPairFunction::frequency_radius() const {
  return 2.0 * p_.radius_xi * std::sqrt(static_cast<double>(p_.d));
}

Interval BumpPairFunction::support_t() const { return {-z_tau_, z_tau_}; }

Box BumpPairFunction::support_x() const { return Box(p_.d, Interval{-z_xi_, z_xi_}); }

double BumpPairFunction::fourier_real(double tau, std::span<const double> xi) const {
  double v = p_.amplitude * conv_tau_(tau);
  for (int k = 0; k < p_.d && v != 0.0; ++k) v *= conv_xi_(xi[k]);
  return v;
}

std::complex<double> BumpPairFunction::fourier(double tau, std::span<const double> xi) const {
  return {fourier_real(tau, xi), 0.0};
}

Interval BumpPairFunction::fourier_support_tau() const {
  return {-2.0 * p_.radius_tau, 2.0 * p_.radius_tau};
}

Box BumpPairFunction::fourier_support_xi() const {
  return Box(p_.d, Interval{-2.0 * p_.radius_xi, 2.0 * p_.radius_xi});
}

std::shared_ptr<BumpPairFunction> make_counterexample_g(BumpParams params, GridSpec inverse_grid) {
  return std::make_shared<BumpPairFunction>(params, std::move(inverse_grid));
}

std::shared_ptr<BumpPairFunction> make_counterexample_g(BumpParams params) {
  return make_counterexample_g(params, default_inverse_grid(params));
}

std::vector<Sample> sample_spacetime(const SpaceTimeFunction& g, const GridSpec& grid) {
  if (grid.dimension() != 1 + g.dimension()) throw MalformedInput(kModule, "sampling grid must have 1 + d axes");
  std::vector<Sample> out;
  out.reserve(grid.size());
  for_each_node(grid, [&](std::span<const double> p, double) {
    out.push_back(Sample{std::vector<double>(p.begin(), p.end()), g(p[0], p.subspan(1))});
  });
  return out;
}

}  // namespace kinlab
