#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "kinlab/exponents.hpp"
#include "kinlab/functions.hpp"
#include "kinlab/transport.hpp"

namespace kinlab::mixed_norms {

using transport::Estimate;

/// Result of a nested Lebesgue norm on tensor grids.
struct MixedNormResult {
  double value = 0.0;
  double error = 0.0;                // |Q(grid) - Q(coarsened grid)|
  std::vector<std::string> exponents;  // outermost first, as exact fractions
  std::vector<GridSpec> grids;         // outermost first
  double peak_scale = 0.0;             // max |F| over the samples; values were divided by it
};

using SpaceTimePhaseEvaluator =
    std::function<double(double, std::span<const double>, std::span<const double>)>;
using SpaceTimeEvaluator = std::function<double(double, std::span<const double>)>;

/// ||F||_{L^q_t L^p_x L^r_v}, nested v -> x -> t. Infinite exponents take the
/// grid maximum (a lower bound of the true supremum).
MixedNormResult mixed_norm(const SpaceTimePhaseEvaluator& f, const ExtRational& q, const ExtRational& p,
                           const ExtRational& r, const GridSpec& t_grid, const GridSpec& x_grid,
                           const GridSpec& v_grid);

/// ||G||_{L^q_t L^p_x}.
MixedNormResult spacetime_norm(const SpaceTimeEvaluator& g, const ExtRational& q, const ExtRational& p,
                               const GridSpec& t_grid, const GridSpec& x_grid);

/// ||f||_{L^a_{x,v}}.
MixedNormResult phase_space_norm(const transport::PhaseSpaceEvaluator& f, const ExtRational& a,
                                 const GridSpec& x_grid, const GridSpec& v_grid);

/// Plain ||F||_{L^a} over the product grid t x x x v.
MixedNormResult lebesgue_norm(const SpaceTimePhaseEvaluator& f, const ExtRational& a, const GridSpec& t_grid,
                              const GridSpec& x_grid, const GridSpec& v_grid);

/// Support box of a phase-space function as a Gauss-Legendre grid.
GridSpec support_grid(const Box& box, int count, Rule rule = Rule::gauss_legendre);

// ---------------------------------------------------------------------------
// Strichartz ratio

struct RatioGrids {
  int theta_nodes = 64;  // t = T tan(theta), GL in theta over (-pi/2, pi/2)
  int x_nodes = 48;      // GL per axis over supp_x + t supp_v
  int v_nodes = 32;      // GL per axis for rho at each point
  int norm_nodes = 48;   // GL per axis for ||f0||_{L^a_{x,v}}
  int workers = 1;
};

struct RatioResult {
  double value = 0.0;
  double numerator = 0.0;
  double denominator = 0.0;
  double error = 0.0;
};

/// ||rho(f0)||_{L^q_t L^p_x} / ||f0||_{L^a_{x,v}} for E with r = 1 and f0 >= 0.
RatioResult strichartz_ratio(const PhaseSpaceFunction& f0, const exponents::ExponentTuple& e,
                             const RatioGrids& grids = {});

// ---------------------------------------------------------------------------
// Adjoint norms over a v-ball

struct AdjointGrid {
  BallRule ball;
  int x_nodes = 48;  // GL per axis of the x frame aligned with v
  int t_nodes = 64;  // GL for the t-integral defining rho* g
  /// x-domain cut where the integrand |rho* g|^s drops below this fraction of
  /// its peak; 0 means the tail fraction.
  double domain_fraction = 0.0;
  double escape_fraction = 1e-8;
  int workers = 1;

  AdjointGrid coarsened() const;
};

/// Per-shell contributions to int_{|v| <= V} int_x |rho* g|^s dx dv.
struct ShellSeries {
  std::vector<double> boundaries;  // shell k is [boundaries[k], boundaries[k+1]]
  std::vector<double> fine;
  std::vector<double> coarse;      // same with AdjointGrid::coarsened()

  /// Integral over |v| <= boundaries[k] as an estimate.
  Estimate cumulative(std::size_t k) const;
};

ShellSeries adjoint_power_shells(const SpaceTimeFunction& g, double s, std::span<const double> boundaries,
                                 const AdjointGrid& grid);

/// int_{|v| <= V} int_x |rho* g|^s dx dv.
Estimate adjoint_power_integral(const SpaceTimeFunction& g, double s, double v_radius, const AdjointGrid& grid);

// ---------------------------------------------------------------------------
// Dual ratio

struct DualGrids {
  AdjointGrid adjoint;
  double v_radius = 16.0;  // truncation |v| <= V
  int t_nodes = 64;        // GL for ||g||_{L^{q'}_t L^{a'/2}_x}
  int x_nodes = 48;
};

struct DualRatioResult {
  double value = 0.0;
  double numerator = 0.0;    // ||rho* g||_{L^{a'}_{x,v}} over |v| <= V
  double denominator = 0.0;  // ||g||_{L^{q'}_t L^{a'/2}_x}
  double error = 0.0;
  ExtRational sigma, a_dual, q_dual;
};

/// Dual ratio at sigma = a'/(d+1) > 1, q' = q(sigma).
DualRatioResult dual_ratio_sigma(const SpaceTimeFunction& g, const ExtRational& sigma, const DualGrids& grids = {});

/// Dual ratio for a tuple of the r = 1 family; a' <= d+1 raises EndpointDivergence.
DualRatioResult dual_ratio(const SpaceTimeFunction& g, const exponents::ExponentTuple& e,
                           const DualGrids& grids = {});

}  // namespace kinlab::mixed_norms
