#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "kinlab/functions.hpp"
#include "kinlab/growth.hpp"
#include "kinlab/mixed_norms.hpp"

namespace kinlab::endpoint_lab {

using mixed_norms::AdjointGrid;
using transport::Estimate;

/// Fourier-side quadrature for
///   c int_{|v|<=V} int prod_j ghat(-v.xi_j, xi_j) ghat(v.sum xi, -sum xi) dxi dv.
/// The tau_j variables are eliminated by tau_j = -v.xi_j.
struct FourierSideConfig {
  int d = 1;
  BallRule ball{4, 16, 8};  // v; shell boundaries follow the lhs grid
  int xi_nodes = 32;        // GL per xi coordinate, in a frame aligned with v
  double c = 0.0;           // 0 means (2 pi)^{-d^2}
  std::uint64_t seed = 1;   // d = 3 Monte Carlo
  std::size_t mc_samples = 400000;
  std::size_t mc_batch = 4096;
  int workers = 1;

  double normalization() const;
  FourierSideConfig coarsened() const;
};

/// int_{|v|<=V} int_x |rho* g|^{d+1} dx dv.
Estimate vtrunc_lhs(const SpaceTimeFunction& g, double v_radius, const AdjointGrid& grid);
/// Fourier-side value; tensor quadrature for d <= 2, seeded Monte Carlo for d = 3
/// (error is then the standard error).
Estimate vtrunc_rhs(const SpaceTimeFunction& g, double v_radius, const FourierSideConfig& cfg);

/// Both sides over a schedule of radii sharing one set of v-shells.
struct IdentityRow {
  double v_radius = 0.0;
  Estimate lhs, rhs;
};
std::vector<IdentityRow> truncated_identity(const SpaceTimeFunction& g, std::span<const double> schedule,
                                            const AdjointGrid& grid, const FourierSideConfig& cfg);

/// Lhs over a V-schedule, fitted c0 + c1 ln V.
GrowthTable divergence_study(const SpaceTimeFunction& g, std::span<const double> schedule, const AdjointGrid& grid);

/// Geometric schedule lo, lo*ratio, ... up to hi.
std::vector<double> geometric_schedule(double lo, double hi, double ratio);

// ---------------------------------------------------------------------------

struct PolarFactorization {
  std::vector<double> radii;
  std::vector<std::vector<double>> directions;
  double det_k = 0.0;      // |det K|, K with rows -xi_j
  double det_theta = 0.0;  // |det(theta_1 ... theta_d)|
};

PolarFactorization polar_factorize(const std::vector<std::vector<double>>& xi);

struct AngularConfig {
  std::uint64_t seed = 1;
  std::size_t samples = 1000000;
  std::size_t batch = 8192;
  int workers = 1;
};

struct AngularResult {
  double epsilon = 0.0;
  double value = 0.0;
  double std_error = 0.0;
};

/// I(eps) = int_{|det Theta| > eps} |det Theta|^{-1} dTheta over (S^{d-1})^d.
/// d = 2 uses the closed-form reduction; d = 3 uses Monte Carlo.
AngularResult angular_integral(int d, double epsilon, const AngularConfig& cfg = {});

/// I over an eps-schedule; Monte Carlo runs share one sample set.
std::vector<AngularResult> angular_schedule(int d, std::span<const double> epsilons, const AngularConfig& cfg = {});

/// Growth table in eps (fit against ln(1/eps)).
GrowthTable angular_growth(const std::vector<AngularResult>& results);

/// prod_j int_{delta <= |r_j| <= 1} r_j^{d-2} dr_j; for d = 1 both signs of r
/// count, for d >= 2 only r > 0.
double radial_integral(int d, double delta);

}  // namespace kinlab::endpoint_lab
