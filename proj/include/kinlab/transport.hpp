#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "kinlab/functions.hpp"

namespace kinlab::transport {

/// Value with an error estimate from a coarser rule.
struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

using PhaseSpaceEvaluator = std::function<double(std::span<const double>, std::span<const double>)>;

/// (x, v) -> f0(x - t v, v).
PhaseSpaceEvaluator propagate(PhaseSpacePtr f0, double t);

enum class Provenance { quadrature, closed_form };

const char* provenance_name(Provenance p);

/// Per-point quadrature settings. With `fixed` set, the supplied grid is used
/// as is; otherwise the integration box is rebuilt at each evaluation point
/// from the supports of the input and `count`/`rule` per axis.
struct PointQuadrature {
  int count = 48;
  Rule rule = Rule::gauss_legendre;
  std::optional<GridSpec> fixed;
  /// Integrand on the domain boundary above this fraction of the input's
  /// peak raises TruncationError.
  double escape_fraction = 1e-8;
};

/// rho(f0)(t, x) = int f0(x - t v, v) dv.
class DensityField {
 public:
  DensityField(PhaseSpacePtr f0, PointQuadrature quad, Provenance provenance);

  /// Single evaluation at the configured resolution.
  double operator()(double t, std::span<const double> x) const;
  /// Value and |Q_n - Q_{n/2}|; zero error for closed-form fields.
  Estimate evaluate(double t, std::span<const double> x) const;

  Provenance provenance() const { return provenance_; }
  int dimension() const { return f0_->dimension(); }
  const PhaseSpaceFunction& input() const { return *f0_; }

  /// Closed form when the input is a Gaussian.
  std::optional<double> closed_form(double t, std::span<const double> x) const;

 private:
  double integrate(double t, std::span<const double> x, int count, bool check) const;

  PhaseSpacePtr f0_;
  PointQuadrature quad_;
  Provenance provenance_;
};

DensityField density(PhaseSpacePtr f0, PointQuadrature quad = {});
DensityField density(PhaseSpacePtr f0, const GridSpec& v_grid);
/// Closed-form field; the input must be a GaussianPhaseSpace.
DensityField density_closed_form(PhaseSpacePtr f0);

/// rho* g(x, v) = int g(t, x + t v) dt.
class AdjointField {
 public:
  AdjointField(SpaceTimePtr g, PointQuadrature quad, Provenance provenance);

  double operator()(std::span<const double> x, std::span<const double> v) const;
  Estimate evaluate(std::span<const double> x, std::span<const double> v) const;

  Provenance provenance() const { return provenance_; }
  int dimension() const { return g_->dimension(); }
  const SpaceTimeFunction& input() const { return *g_; }

  std::optional<double> closed_form(std::span<const double> x, std::span<const double> v) const;

 private:
  double integrate(std::span<const double> x, std::span<const double> v, int count, bool check) const;

  SpaceTimePtr g_;
  PointQuadrature quad_;
  Provenance provenance_;
};

AdjointField adjoint_density(SpaceTimePtr g, PointQuadrature quad = {});
AdjointField adjoint_density(SpaceTimePtr g, const GridSpec& t_grid);
AdjointField adjoint_closed_form(SpaceTimePtr g);

/// t-interval where the line s -> (s, x + s v) meets the effective support of
/// g; empty (lo >= hi) when it misses.
Interval adjoint_time_window(const SpaceTimeFunction& g, std::span<const double> x,
                             std::span<const double> v, double fraction = kTailFraction);

/// Both sides of <rho f0, g> = <f0, rho* g>, each by nested quadrature.
struct DualityPairing {
  Estimate density_side;  // int rho(f0) g dt dx over the support of g
  Estimate adjoint_side;  // int f0 rho* g dx dv over the support of f0
};

struct PairingQuadrature {
  int outer = 24;  // GL nodes per outer axis
  int inner = 24;  // GL nodes per inner axis
  int workers = 1;
};

DualityPairing duality_pairing(PhaseSpacePtr f0, SpaceTimePtr g, const PairingQuadrature& quad = {});

/// Samples on a (1+d)-axis grid (t, x...) / 2d-axis grid (x..., v...).
std::vector<Sample> sample_density(const DensityField& rho, const GridSpec& grid, int workers = 1);
std::vector<Sample> sample_adjoint(const AdjointField& field, const GridSpec& grid, int workers = 1);

}  // namespace kinlab::transport
