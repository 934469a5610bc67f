#include "kinlab/multilinear_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "kinlab/detail/box_quadrature.hpp"
#include "kinlab/error.hpp"
#include "kinlab/exponents.hpp"
#include "kinlab/parallel.hpp"
#include "kinlab/rng.hpp"

namespace kinlab::multilinear_lab {

namespace {

const char* kModule = "multilinear_lab";

int check_slices(Slices g, const TimeTuple& t) {
  if (g.size() < 2) throw MalformedInput(kModule, "the form needs at least two functions");
  if (g.size() != t.size()) throw MalformedInput(kModule, "one time per function");
  const int d = g[0]->dimension();
  for (const auto& f : g) {
    if (!f) throw MalformedInput(kModule, "null function");
    if (f->dimension() != d) throw MalformedInput(kModule, "functions must share the dimension d");
  }
  if (d > 3) throw MalformedInput(kModule, "d must be 1, 2 or 3");
  return d;
}

}  // namespace

TimeTuple::TimeTuple(std::vector<double> times) : t_(std::move(times)) {
  if (t_.size() < 2) throw MalformedInput(kModule, "a time tuple needs at least two times");
  min_gap_ = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < t_.size(); ++i) {
    if (!std::isfinite(t_[i])) throw MalformedInput(kModule, "times must be finite");
    for (std::size_t j = 0; j < i; ++j) min_gap_ = std::min(min_gap_, std::abs(t_[i] - t_[j]));
  }
  if (!(min_gap_ > 0.0)) throw DegenerateInput(kModule, "times must be pairwise distinct");
}

TimeTuple TimeTuple::shifted(double s) const {
  std::vector<double> out = t_;
  for (double& v : out) v += s;
  return TimeTuple(std::move(out));
}

std::string BoundReport::kind_label() const {
  switch (kind) {
    case BoundKind::bilinear:
      return "bilinear(" + std::to_string(pair_i) + "," + std::to_string(pair_j) + ")";
    case BoundKind::interpolated:
      return "interpolated";
    case BoundKind::mhls:
      return "mhls";
    case BoundKind::minkowski:
      return "minkowski";
  }
  return "?";
}

namespace {
constexpr int kDefaultNodes[4] = {0, 64, 40, 16};
}

int FormGrid::resolved_v(int d) const { return v_nodes > 0 ? v_nodes : kDefaultNodes[d]; }
int FormGrid::resolved_x(int d) const { return x_nodes > 0 ? x_nodes : kDefaultNodes[d]; }

FormGrid FormGrid::coarsened(int d) const {
  FormGrid c = *this;
  c.v_nodes = std::max(2, 3 * resolved_v(d) / 4);
  c.x_nodes = std::max(2, 3 * resolved_x(d) / 4);
  return c;
}

// ---------------------------------------------------------------------------
// The form

namespace {

struct FormSetup {
  int d = 0;
  std::vector<Box> boxes;
  Box v_box;
  double peak = 1.0;
};

FormSetup form_setup(Slices g, const TimeTuple& t) {
  FormSetup s;
  s.d = check_slices(g, t);
  for (const auto& f : g) {
    s.boxes.push_back(f->support_x());
    s.peak *= f->peak();
  }
  // v is confined by the pair with the widest time gap.
  std::size_t a = 0, b = 1;
  for (std::size_t i = 0; i < t.size(); ++i) {
    for (std::size_t j = i + 1; j < t.size(); ++j) {
      if (std::abs(t[j] - t[i]) > std::abs(t[b] - t[a])) a = i, b = j;
    }
  }
  if (t[b] < t[a]) std::swap(a, b);
  const double gap = t[b] - t[a];
  for (int k = 0; k < s.d; ++k) {
    s.v_box.push_back({(s.boxes[b][k].lo - s.boxes[a][k].hi) / gap, (s.boxes[b][k].hi - s.boxes[a][k].lo) / gap});
  }
  return s;
}

Box intersection_box(const FormSetup& s, const TimeTuple& t, const double* v) {
  Box box(s.d, Interval{-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()});
  for (std::size_t j = 0; j < s.boxes.size(); ++j) {
    for (int k = 0; k < s.d; ++k) {
      box[k].lo = std::max(box[k].lo, s.boxes[j][k].lo - t[j] * v[k]);
      box[k].hi = std::min(box[k].hi, s.boxes[j][k].hi - t[j] * v[k]);
    }
  }
  return box;
}

double x_integral(Slices g, const TimeTuple& t, const FormSetup& s, const double* v, int nodes) {
  const Box box = intersection_box(s, t, v);
  return detail::box_integrate(box, nodes, Rule::gauss_legendre, [&](const double* x) {
    double prod = 1.0;
    double y[3];
    for (std::size_t j = 0; j < g.size() && prod != 0.0; ++j) {
      for (int k = 0; k < s.d; ++k) y[k] = x[k] + t[j] * v[k];
      prod *= (*g[j])(t[j], std::span<const double>(y, s.d));
    }
    return prod;
  });
}

double form_value(Slices g, const TimeTuple& t, const FormSetup& s, const FormGrid& grid) {
  const int nx = grid.resolved_x(s.d);
  return detail::box_integrate(s.v_box, grid.resolved_v(s.d), Rule::gauss_legendre,
                               [&](const double* v) { return x_integral(g, t, s, v, nx); });
}

}  // namespace

Estimate product_form(Slices g, const TimeTuple& t, const FormGrid& grid) {
  const FormSetup s = form_setup(g, t);
  if (s.peak == 0.0) return {0.0, 0.0};
  const double fine = form_value(g, t, s, grid);
  const double coarse = form_value(g, t, s, grid.coarsened(s.d));
  const int nx = grid.resolved_x(s.d);
  const double edge = detail::box_boundary_max(s.v_box, grid.resolved_v(s.d), Rule::gauss_legendre,
                                               [&](const double* v) { return x_integral(g, t, s, v, nx); });
  if (edge > grid.escape_fraction * std::max(std::abs(fine), s.peak)) {
    throw TruncationError(kModule, "form integrand does not decay at the edge of the v-box");
  }
  return {fine, std::abs(fine - coarse)};
}

// ---------------------------------------------------------------------------
// Jacobian

ExtRational block_determinant(const ExtRational& t_i, const ExtRational& t_j, int d) {
  if (d < 1) throw MalformedInput(kModule, "d must be >= 1");
  if (t_i.is_infinite() || t_j.is_infinite()) throw MalformedInput(kModule, "times must be finite");
  const int n = 2 * d;
  std::vector<std::vector<Rational>> m(n, std::vector<Rational>(n, Rational(0)));
  for (int k = 0; k < d; ++k) {
    m[k][k] = 1;
    m[k][d + k] = t_i.value();
    m[d + k][k] = 1;
    m[d + k][d + k] = t_j.value();
  }
  Rational det = 1;
  for (int c = 0; c < n; ++c) {
    int pivot = c;
    while (pivot < n && m[pivot][c] == 0) ++pivot;
    if (pivot == n) return ExtRational(0);
    if (pivot != c) {
      std::swap(m[pivot], m[c]);
      det = -det;
    }
    det *= m[c][c];
    for (int r = c + 1; r < n; ++r) {
      if (m[r][c] == 0) continue;
      const Rational f = m[r][c] / m[c][c];
      for (int k = c; k < n; ++k) m[r][k] -= f * m[c][k];
    }
  }
  return ExtRational(det);
}

double jacobian_factor(double t_i, double t_j, int d) {
  if (d < 1) throw MalformedInput(kModule, "d must be >= 1");
  if (!std::isfinite(t_i) || !std::isfinite(t_j)) throw MalformedInput(kModule, "times must be finite");
  if (t_i == t_j) throw DegenerateInput(kModule, "t_i = t_j: the change of variables is singular");
  // Doubles are dyadic rationals, so the block determinant is checked exactly.
  const ExtRational a{Rational(t_i)}, b{Rational(t_j)};
  ExtRational expected(1);
  for (int k = 0; k < d; ++k) expected = expected * (b - a);
  if (!(block_determinant(a, b, d) == expected)) {
    throw DegenerateInput(kModule, "block determinant disagrees with (t_j - t_i)^d");
  }
  return std::pow(std::abs(t_i - t_j), d);
}

// ---------------------------------------------------------------------------
// Bounds

double slice_lp_norm(const SpaceTimeFunction& g, double t, double p, int nodes) {
  if (!(p >= 1.0)) throw OutOfRange(kModule, "slice norm needs p >= 1");
  if (auto closed = g.slice_norm(t, p)) return *closed;
  const Box box = g.support_x();
  const int d = g.dimension();
  if (std::isinf(p)) {
    double m = 0.0;
    detail::box_integrate(box, nodes, Rule::gauss_legendre, [&](const double* x) {
      m = std::max(m, std::abs(g(t, std::span<const double>(x, d))));
      return 0.0;
    });
    return m;
  }
  const double s = detail::box_integrate(box, nodes, Rule::gauss_legendre, [&](const double* x) {
    return std::pow(std::abs(g(t, std::span<const double>(x, d))), p);
  });
  return std::pow(s, 1.0 / p);
}

namespace {

BoundReport bilinear_from(Slices g, const TimeTuple& t, int d, const Estimate& form, int i, int j) {
  const int m = static_cast<int>(g.size());
  if (i < 1 || j < 1 || i > m || j > m || i == j) throw OutOfRange(kModule, "pair indices must be distinct in 1..m");
  if (i > j) std::swap(i, j);
  double bound = 1.0 / jacobian_factor(t[i - 1], t[j - 1], d);
  for (int k = 1; k <= m; ++k) {
    const double p = (k == i || k == j) ? 1.0 : std::numeric_limits<double>::infinity();
    bound *= slice_lp_norm(*g[k - 1], t[k - 1], p);
  }
  BoundReport r;
  r.kind = BoundKind::bilinear;
  r.pair_i = i;
  r.pair_j = j;
  r.form = form.value;
  r.form_error = form.error;
  r.bound = bound;
  r.margin = bound - form.value;
  return r;
}

BoundReport interpolated_from(Slices g, const TimeTuple& t, int d, const Estimate& form) {
  if (static_cast<int>(g.size()) != d + 1) throw MalformedInput(kModule, "the interpolated bound needs d+1 functions");
  const double kernel = 2.0 / (d + 1);
  const double p = 0.5 * (d + 1);
  double bound = 1.0;
  for (int i = 0; i <= d; ++i) {
    for (int j = i + 1; j <= d; ++j) bound *= std::pow(std::abs(t[i] - t[j]), -kernel);
  }
  for (int k = 0; k <= d; ++k) bound *= slice_lp_norm(*g[k], t[k], p);
  BoundReport r;
  r.kind = BoundKind::interpolated;
  r.form = form.value;
  r.form_error = form.error;
  r.bound = bound;
  r.margin = bound - form.value;
  return r;
}

}  // namespace

BoundReport bilinear_bound_check(Slices g, const TimeTuple& t, int i, int j, const FormGrid& grid) {
  const int d = check_slices(g, t);
  return bilinear_from(g, t, d, product_form(g, t, grid), i, j);
}

BoundReport interpolated_bound_check(Slices g, const TimeTuple& t, const FormGrid& grid) {
  const int d = check_slices(g, t);
  return interpolated_from(g, t, d, product_form(g, t, grid));
}

std::vector<BoundReport> bound_checks(Slices g, const TimeTuple& t, const FormGrid& grid) {
  const int d = check_slices(g, t);
  const Estimate form = product_form(g, t, grid);
  std::vector<BoundReport> out;
  const int m = static_cast<int>(g.size());
  for (int i = 1; i <= m; ++i) {
    for (int j = i + 1; j <= m; ++j) out.push_back(bilinear_from(g, t, d, form, i, j));
  }
  if (m == d + 1) out.push_back(interpolated_from(g, t, d, form));
  return out;
}

GaussianConfiguration random_gaussian_configuration(int d, std::uint64_t seed, std::size_t index) {
  if (d < 1 || d > 3) throw MalformedInput(kModule, "d must be 1, 2 or 3");
  CounterRng rng(CounterRng::batch_key(seed, index));
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * rng.next_uniform(); };
  GaussianConfiguration c;
  for (int k = 0; k <= d; ++k) {
    GaussianSpaceTimeParams p;
    p.d = d;
    p.amplitude = uniform(0.5, 2.0);
    p.width_t = uniform(0.5, 2.0);
    p.width_x = uniform(0.5, 2.0);
    p.t0 = uniform(-1.0, 1.0);
    for (int m = 0; m < d; ++m) p.x0.push_back(uniform(-1.0, 1.0));
    c.slices.push_back(make_gaussian_spacetime(p));
  }
  // Redraw until the times are separated by at least 0.25.
  while (true) {
    std::vector<double> t;
    for (int k = 0; k <= d; ++k) t.push_back(uniform(-2.0, 2.0));
    bool ok = true;
    for (int i = 0; i <= d; ++i) {
      for (int j = 0; j < i; ++j) ok = ok && std::abs(t[i] - t[j]) >= 0.25;
    }
    if (ok) {
      c.times = TimeTuple(std::move(t));
      return c;
    }
  }
}

// ---------------------------------------------------------------------------
// Multilinear HLS

HlsExponents hls_exponents(int d, const ExtRational& sigma) {
  if (d < 1) throw MalformedInput(kModule, "d must be >= 1");
  if (sigma.is_infinite() || !(sigma > ExtRational(1))) {
    throw EndpointDivergence(kModule, "sigma must be finite and > 1");
  }
  HlsExponents h;
  h.beta = ExtRational(2) / (ExtRational(d + 1) * sigma);
  h.q = exponents::q_of_sigma(sigma, d);
  h.kernel_degree = ExtRational(d * (d + 1), 2) * h.beta;
  h.scaling = ExtRational(d) / sigma;
  h.norm_degree = ExtRational(d + 1) * (ExtRational(1) - h.q.reciprocal());
  return h;
}

TimeProfile gaussian_profile(double amplitude, double width) {
  if (!(width > 0.0)) throw MalformedInput(kModule, "profile width must be positive");
  TimeProfile h;
  h.value = [=](double t) { return amplitude * std::exp(-std::numbers::pi * t * t / (width * width)); };
  h.norm = [=](double q) {
    if (std::isinf(q)) return std::abs(amplitude);
    return std::abs(amplitude) * std::pow(width, 1.0 / q) * gaussian_lp_norm(q, 1);
  };
  return h;
}

namespace {

/// Offset trapezoid for int_{[c-T,c+T]^m} prod_{i<j} |t_i - t_j|^{-beta} prod_k h(t_k).
double kernel_sum(int m, double beta, const std::function<double(double)>& h, double center, double half_width,
                  int n, int workers) {
  const double step = 2.0 * half_width / n;
  std::vector<std::vector<double>> pos(m, std::vector<double>(n)), val(m, std::vector<double>(n));
  for (int k = 0; k < m; ++k) {
    const double offset = (k + 0.5) / m;
    for (int i = 0; i < n; ++i) {
      pos[k][i] = center - half_width + (i + offset) * step;
      val[k][i] = h(pos[k][i]);
    }
  }
  const double cell = std::pow(step, m);
  const auto slabs = parallel_map<double>(n, workers, [&](std::size_t i0) {
    std::vector<double> acc;
    std::vector<int> idx(m, 0);
    idx[0] = static_cast<int>(i0);
    double t[4];
    while (true) {
      double w = 1.0;
      for (int k = 0; k < m; ++k) {
        t[k] = pos[k][idx[k]];
        w *= val[k][idx[k]];
      }
      if (w != 0.0) {
        double kernel = 1.0;
        for (int a = 0; a < m; ++a) {
          for (int b = a + 1; b < m; ++b) kernel *= std::abs(t[a] - t[b]);
        }
        acc.push_back(w * std::pow(kernel, -beta));
      }
      int k = m - 1;
      while (k >= 1 && ++idx[k] == n) idx[k--] = 0;
      if (k < 1) break;
    }
    return pairwise_sum(acc);
  });
  return cell * pairwise_sum(slabs);
}

/// One Richardson step in h^{1-beta} on levels n and n/2; the same step on
/// levels n/2 and n/4 gives the error estimate.
Estimate richardson_kernel(int m, double beta, const std::function<double(double)>& h, double center,
                           double half_width, int n, int workers) {
  if (n < 8 || n % 4 != 0) throw MalformedInput(kModule, "kernel quadrature needs a multiple of 4 nodes, at least 8");
  const double q1 = kernel_sum(m, beta, h, center, half_width, n, workers);
  const double q2 = kernel_sum(m, beta, h, center, half_width, n / 2, workers);
  const double q3 = kernel_sum(m, beta, h, center, half_width, n / 4, workers);
  const double f = std::pow(2.0, 1.0 - beta);
  const double r1 = (f * q1 - q2) / (f - 1.0);
  const double r2 = (f * q2 - q3) / (f - 1.0);
  return {r1, std::abs(r1 - r2)};
}

constexpr int kHlsNodes[4] = {0, 400, 160, 48};

}  // namespace

BoundReport mhls_check(int d, const ExtRational& sigma, const TimeProfile& h, const HlsQuadrature& quad) {
  if (d < 1 || d > 3) throw MalformedInput(kModule, "d must be 1, 2 or 3");
  const HlsExponents e = hls_exponents(d, sigma);
  if (!e.homogeneous()) throw DegenerateInput(kModule, "kernel and norm homogeneities disagree");
  if (!(quad.half_width > 0.0)) throw MalformedInput(kModule, "T must be positive");
  const int n = quad.nodes > 0 ? quad.nodes : kHlsNodes[d];
  const Estimate form = richardson_kernel(d + 1, e.beta.to_double(), h.value, 0.0, quad.half_width, n, quad.workers);
  BoundReport r;
  r.kind = BoundKind::mhls;
  r.form = form.value;
  r.form_error = form.error;
  r.bound = std::pow(h.norm(e.q.to_double()), d + 1);
  r.margin = r.bound - r.form;
  return r;
}

BoundReport minkowski_check(const SpaceTimeFunction& g, const ExtRational& sigma, const MinkowskiGrid& grid) {
  if (g.dimension() != 1) throw MalformedInput(kModule, "the Minkowski check is implemented for d = 1");
  if (sigma.is_infinite() || !(sigma > ExtRational(1))) throw EndpointDivergence(kModule, "sigma must be > 1");
  const double s = sigma.to_double();
  const Estimate lhs = mixed_norms::adjoint_power_integral(g, 2.0 * s, grid.v_radius, grid.adjoint);
  const Interval support = g.support_t();
  const int n = grid.time.nodes > 0 ? grid.time.nodes : kHlsNodes[1];
  auto slice = [&](double t) { return slice_lp_norm(g, t, s); };
  const Estimate rhs =
      richardson_kernel(2, 1.0 / s, slice, support.center(), 0.5 * support.width(), n, grid.time.workers);
  BoundReport r;
  r.kind = BoundKind::minkowski;
  r.form = std::pow(lhs.value, 1.0 / s);
  r.form_error = r.form * lhs.error / (s * std::max(lhs.value, std::numeric_limits<double>::min()));
  r.bound = rhs.value;
  r.bound_error = rhs.error;
  r.margin = r.bound - r.form;
  return r;
}

// ---------------------------------------------------------------------------
// Sweep

GrowthTable nonendpoint_sweep(Slices family, std::span<const ExtRational> sigmas,
                              const mixed_norms::DualGrids& grids, int workers) {
  if (family.empty()) throw MalformedInput(kModule, "empty family");
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    if (sigmas[i].is_infinite() || !(sigmas[i] > ExtRational(1))) {
      throw EndpointDivergence(kModule, "every sigma must be finite and > 1");
    }
    if (i > 0 && !(sigmas[i] < sigmas[i - 1])) throw MalformedInput(kModule, "sigma-schedule must decrease");
  }
  const std::size_t m = family.size();
  const auto ratios = parallel_map<double>(sigmas.size() * m, workers, [&](std::size_t k) {
    return mixed_norms::dual_ratio_sigma(*family[k % m], sigmas[k / m], grids).value;
  });
  GrowthTable table;
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    double worst = 0.0;
    for (std::size_t k = 0; k < m; ++k) worst = std::max(worst, ratios[i * m + k]);
    table.add(sigmas[i].to_double(), worst);
  }
  return table;
}

std::vector<SpaceTimePtr> gaussian_dilate_family(int d) {
  GaussianSpaceTimeParams p;
  p.d = d;
  const GaussianSpaceTime base(p);
  std::vector<SpaceTimePtr> out;
  for (double mu : {0.5, 1.0, 2.0}) {
    for (double nu : {0.5, 1.0, 2.0}) out.push_back(std::make_shared<GaussianSpaceTime>(base.dilated(mu, nu)));
  }
  return out;
}

}  // namespace kinlab::multilinear_lab
