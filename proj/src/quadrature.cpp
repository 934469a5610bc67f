#include "kinlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "kinlab/error.hpp"

namespace kinlab {

namespace {

const char* kModule = "testfunctions";

Nodes compute_gauss_legendre(int n) {
  Nodes out;
  out.x.resize(n);
  out.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // Recompute the derivative at the converged root.
    double p0 = 1.0, p1 = 0.0;
    for (int k = 1; k <= n; ++k) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
    }
    dp = n * (z * p0 - p1) / (z * z - 1.0);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    out.x[i] = -z;
    out.x[n - 1 - i] = z;
    out.w[i] = w;
    out.w[n - 1 - i] = w;
  }
  if (n % 2 == 1) out.x[n / 2] = 0.0;
  return out;
}

}  // namespace

const char* rule_name(Rule r) { return r == Rule::trapezoid ? "trapezoid" : "gauss-legendre"; }

Rule parse_rule(const std::string& name) {
  if (name == "trapezoid") return Rule::trapezoid;
  if (name == "gauss-legendre" || name == "gl") return Rule::gauss_legendre;
  throw MalformedInput(kModule, "unknown quadrature rule '" + name + "'");
}

void AxisGrid::validate() const {
  if (!(lo < hi)) throw MalformedInput(kModule, "grid axis needs lo < hi");
  if (count < 2) throw MalformedInput(kModule, "grid axis needs at least 2 points");
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw MalformedInput(kModule, "grid bounds must be finite");
}

AxisGrid AxisGrid::coarsened() const {
  AxisGrid c = *this;
  c.count = std::max(2, rule == Rule::trapezoid && count % 2 == 1 ? (count + 1) / 2 : count / 2);
  return c;
}

GridSpec GridSpec::uniform(int dim, double lo, double hi, int count, Rule rule) {
  GridSpec g;
  g.axes.assign(dim, AxisGrid{lo, hi, count, rule});
  return g;
}

void GridSpec::validate() const {
  if (axes.empty()) throw MalformedInput(kModule, "grid has no axes");
  for (const auto& a : axes) a.validate();
}

GridSpec GridSpec::coarsened() const {
  GridSpec c;
  for (const auto& a : axes) c.axes.push_back(a.coarsened());
  return c;
}

double GridSpec::total_weight() const {
  double total = 1.0;
  for (const auto& a : axes) {
    const Nodes n = axis_nodes(a);
    double s = 0.0;
    for (double w : n.w) s += w;
    total *= s;
  }
  return total;
}

double GridSpec::volume() const {
  double v = 1.0;
  for (const auto& a : axes) v *= a.hi - a.lo;
  return v;
}

std::size_t GridSpec::size() const {
  std::size_t n = 1;
  for (const auto& a : axes) n *= static_cast<std::size_t>(a.count);
  return n;
}

const Nodes& gauss_legendre(int count) {
  static std::mutex mutex;
  static std::map<int, Nodes> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(count);
  if (it == cache.end()) it = cache.emplace(count, compute_gauss_legendre(count)).first;
  return it->second;
}

Nodes interval_nodes(double lo, double hi, int count, Rule rule) {
  Nodes out;
  out.x.resize(count);
  out.w.resize(count);
  if (rule == Rule::trapezoid) {
    const double h = (hi - lo) / (count - 1);
    for (int i = 0; i < count; ++i) {
      out.x[i] = i == count - 1 ? hi : lo + i * h;
      out.w[i] = (i == 0 || i == count - 1) ? 0.5 * h : h;
    }
  } else {
    const Nodes& ref = gauss_legendre(count);
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    for (int i = 0; i < count; ++i) {
      out.x[i] = mid + half * ref.x[i];
      out.w[i] = half * ref.w[i];
    }
  }
  return out;
}

Nodes axis_nodes(const AxisGrid& axis) {
  axis.validate();
  return interval_nodes(axis.lo, axis.hi, axis.count, axis.rule);
}

void for_each_node(const GridSpec& grid,
                   const std::function<void(std::span<const double>, double)>& f) {
  grid.validate();
  const int dim = grid.dimension();
  std::vector<Nodes> nodes;
  for (const auto& a : grid.axes) nodes.push_back(axis_nodes(a));
  std::vector<int> idx(dim, 0);
  std::vector<double> point(dim);
  while (true) {
    double w = 1.0;
    for (int k = 0; k < dim; ++k) {
      point[k] = nodes[k].x[idx[k]];
      w *= nodes[k].w[idx[k]];
    }
    f(point, w);
    int k = dim - 1;
    while (k >= 0 && ++idx[k] == grid.axes[k].count) idx[k--] = 0;
    if (k < 0) break;
  }
}

double integrate(const GridSpec& grid, const std::function<double(std::span<const double>)>& f) {
  double sum = 0.0;
  for_each_node(grid, [&](std::span<const double> p, double w) { sum += w * f(p); });
  return sum;
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

BallRule BallRule::coarsened() const {
  BallRule c = *this;
  c.radial_per_shell = std::max(2, radial_per_shell / 2);
  c.angular = std::max(4, angular / 2);
  c.polar = std::max(2, polar / 2);
  return c;
}

std::vector<double> shell_boundaries(double radius, const BallRule& rule,
                                     std::span<const double> extra_breaks) {
  if (!(radius > 0.0)) throw MalformedInput("endpoint_lab", "ball radius must be positive");
  std::vector<double> b{0.0};
  for (double r = rule.unit; r < radius; r *= 2.0) b.push_back(r);
  for (double e : extra_breaks) {
    if (e > 0.0 && e < radius) b.push_back(e);
  }
  b.push_back(radius);
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end(),
                      [](double x, double y) { return std::abs(x - y) <= 1e-12 * std::max(1.0, y); }),
          b.end());
  return b;
}

double sphere_area(int d) {
  // 2 pi^{d/2} / Gamma(d/2)
  return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

std::vector<BallShell> ball_shells(int d, std::span<const double> boundaries, const BallRule& rule) {
  if (d < 1 || d > 3) throw MalformedInput("endpoint_lab", "ball quadrature supports d in {1,2,3}");
  std::vector<BallShell> shells;
  const double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t s = 0; s + 1 < boundaries.size(); ++s) {
    BallShell shell{boundaries[s], boundaries[s + 1], {}};
    const Nodes radial = interval_nodes(shell.r_lo, shell.r_hi, rule.radial_per_shell, Rule::gauss_legendre);
    for (int i = 0; i < rule.radial_per_shell; ++i) {
      const double r = radial.x[i], wr = radial.w[i];
      if (d == 1) {
        shell.nodes.push_back(BallNode{{-r, 0, 0}, wr});
        shell.nodes.push_back(BallNode{{r, 0, 0}, wr});
      } else if (d == 2) {
        for (int j = 0; j < rule.angular; ++j) {
          const double phi = two_pi * (j + 0.5) / rule.angular;
          shell.nodes.push_back(
              BallNode{{r * std::cos(phi), r * std::sin(phi), 0}, wr * r * two_pi / rule.angular});
        }
      } else {
        const Nodes& ct = gauss_legendre(rule.polar);
        for (int k = 0; k < rule.polar; ++k) {
          const double c = ct.x[k], sn = std::sqrt(1.0 - c * c);
          for (int j = 0; j < rule.angular; ++j) {
            const double phi = two_pi * (j + 0.5) / rule.angular;
            shell.nodes.push_back(BallNode{{r * sn * std::cos(phi), r * sn * std::sin(phi), r * c},
                                           wr * r * r * ct.w[k] * two_pi / rule.angular});
          }
        }
      }
    }
    shells.push_back(std::move(shell));
  }
  return shells;
}

}  // namespace kinlab
