#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "kinlab/ext_rational.hpp"
#include "kinlab/functions.hpp"
#include "kinlab/growth.hpp"
#include "kinlab/mixed_norms.hpp"

namespace kinlab::multilinear_lab {

using transport::Estimate;

/// Pairwise distinct times t_1 ... t_{d+1}.
class TimeTuple {
 public:
  explicit TimeTuple(std::vector<double> times);
  const std::vector<double>& values() const { return t_; }
  std::size_t size() const { return t_.size(); }
  double operator[](std::size_t i) const { return t_[i]; }
  double min_gap() const { return min_gap_; }
  /// Every t_j + s.
  TimeTuple shifted(double s) const;

 private:
  std::vector<double> t_;
  double min_gap_ = 0.0;
};

enum class BoundKind { bilinear, interpolated, mhls, minkowski };

struct BoundReport {
  double form = 0.0;
  double bound = 0.0;
  double margin = 0.0;  // bound - form
  double form_error = 0.0;
  double bound_error = 0.0;
  BoundKind kind = BoundKind::bilinear;
  int pair_i = 0;  // 1-based, bilinear only
  int pair_j = 0;

  /// "bilinear(i,j)", "interpolated", "mhls" or "minkowski".
  std::string kind_label() const;
  /// form / bound.
  double ratio() const { return bound != 0.0 ? form / bound : 0.0; }
};

/// Quadrature for the form over (x, v) in R^{2d}.
struct FormGrid {
  int v_nodes = 0;  // GL per v axis; 0 picks 64 (d = 1), 40 (d = 2), 16 (d = 3)
  int x_nodes = 0;  // GL per x axis of the intersection box; same defaults
  double escape_fraction = 1e-8;

  int resolved_v(int d) const;
  int resolved_x(int d) const;
  FormGrid coarsened(int d) const;
};

using Slices = std::span<const SpaceTimePtr>;

/// int int prod_j g_j(t_j, x + t_j v) dx dv for nonnegative g_j.
Estimate product_form(Slices g, const TimeTuple& t, const FormGrid& grid = {});

/// |t_i - t_j|^d, cross-checked against the exact determinant of the block
/// map (x, v) -> (x + t_i v, x + t_j v) when both times are rational.
double jacobian_factor(double t_i, double t_j, int d);
/// det [[I, t_i I], [I, t_j I]] in exact arithmetic by row reduction.
ExtRational block_determinant(const ExtRational& t_i, const ExtRational& t_j, int d);

/// ||g(t, .)||_{L^p_x}; closed form when available, else GL on the support box.
double slice_lp_norm(const SpaceTimeFunction& g, double t, double p, int nodes = 64);

/// form <= |t_i - t_j|^{-d} ||g_i||_1 ||g_j||_1 prod_{k != i,j} ||g_k||_inf
/// with 1-based pair indices.
BoundReport bilinear_bound_check(Slices g, const TimeTuple& t, int i, int j, const FormGrid& grid = {});
/// form <= prod_{1 <= i < j <= d+1} |t_i - t_j|^{-2/(d+1)} prod_k ||g_k||_{(d+1)/2}.
BoundReport interpolated_bound_check(Slices g, const TimeTuple& t, const FormGrid& grid = {});

/// Every bilinear pair, then the interpolated bound.
std::vector<BoundReport> bound_checks(Slices g, const TimeTuple& t, const FormGrid& grid = {});

/// Standard Gaussian slices centred at random points with random widths and
/// amplitudes, at random distinct times; reproducible from (seed, index).
struct GaussianConfiguration {
  std::vector<SpaceTimePtr> slices;
  TimeTuple times{std::vector<double>{0.0, 1.0}};
};
GaussianConfiguration random_gaussian_configuration(int d, std::uint64_t seed, std::size_t index);

// ---------------------------------------------------------------------------

/// beta = 2 / ((d+1) sigma) and q(sigma), exact.
struct HlsExponents {
  ExtRational beta, q;
  /// d(d+1)/2 * beta, d / sigma and sum_k (1 - 1/q): all equal.
  ExtRational kernel_degree, scaling, norm_degree;
  bool homogeneous() const { return kernel_degree == scaling && scaling == norm_degree; }
};
HlsExponents hls_exponents(int d, const ExtRational& sigma);

/// Time profile h with its closed-form L^q norm.
struct TimeProfile {
  std::function<double(double)> value;
  std::function<double(double)> norm;  // q -> ||h||_q
};
/// h(t) = A exp(-pi t^2 / s^2).
TimeProfile gaussian_profile(double amplitude = 1.0, double width = 1.0);

struct HlsQuadrature {
  double half_width = 4.0;  // T-box [-T, T]^{d+1}
  int nodes = 0;            // per axis at the finer level; 0 picks 400, 160, 48 for d = 1, 2, 3
  int workers = 1;
};

/// int_{[-T,T]^{d+1}} prod_{i<j} |t_i - t_j|^{-beta} prod_k h(t_k) dt against
/// ||h||_q^{d+1}. Offset trapezoid (axis k shifted by (k + 1/2)/(d+1) of a
/// step), Richardson-extrapolated in h^{1-beta}; nodes must be a multiple of 4.
BoundReport mhls_check(int d, const ExtRational& sigma, const TimeProfile& h, const HlsQuadrature& quad = {});

/// d = 1: ||rho* g||^2_{L^{2 sigma}} over |v| <= V against
/// int int ||g(t_1)||_sigma ||g(t_2)||_sigma |t_1 - t_2|^{-1/sigma} dt.
struct MinkowskiGrid {
  mixed_norms::AdjointGrid adjoint;
  double v_radius = 16.0;
  HlsQuadrature time;
};
BoundReport minkowski_check(const SpaceTimeFunction& g, const ExtRational& sigma, const MinkowskiGrid& grid = {});

/// Worst dual ratio over a family at each sigma of a strictly decreasing
/// schedule (all > 1). Rows are (sigma, constant).
GrowthTable nonendpoint_sweep(Slices family, std::span<const ExtRational> sigmas,
                              const mixed_norms::DualGrids& grids = {}, int workers = 1);

/// g(t / mu, x / nu) for mu, nu in {1/2, 1, 2}.
std::vector<SpaceTimePtr> gaussian_dilate_family(int d);

}  // namespace kinlab::multilinear_lab
