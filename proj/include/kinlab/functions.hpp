#pragma once

#include <complex>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "kinlab/quadrature.hpp"

namespace kinlab {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
  double center() const { return 0.5 * (lo + hi); }
};

using Box = std::vector<Interval>;

/// Gaussian tails are cut where exp(-pi r^2 / s^2) drops below this fraction
/// of the peak: r = s * sqrt(-ln(eps) / pi).
inline constexpr double kTailFraction = 1e-10;
double gaussian_tail_radius(double width);

/// Initial datum f0(x, v) on R^d x R^d.
class PhaseSpaceFunction {
 public:
  explicit PhaseSpaceFunction(int d);
  virtual ~PhaseSpaceFunction() = default;

  int dimension() const { return d_; }

  virtual double operator()(std::span<const double> x, std::span<const double> v) const = 0;

  /// Boxes outside of which |f0| < kTailFraction * peak().
  virtual Box support_x() const = 0;
  virtual Box support_v() const = 0;
  virtual double peak() const = 0;

  /// Closed-form ||f0||_{L^p_{x,v}} (p may be +inf), when known.
  virtual std::optional<double> lebesgue_norm(double p) const;

  /// Natural time scale (x-width over v-width) used to map t in R onto a
  /// bounded interval.
  double time_scale() const;

 private:
  int d_;
};

/// Space-time function g(t, x) on R x R^d.
class SpaceTimeFunction {
 public:
  explicit SpaceTimeFunction(int d);
  virtual ~SpaceTimeFunction() = default;

  int dimension() const { return d_; }

  virtual double operator()(double t, std::span<const double> x) const = 0;

  virtual Interval support_t() const = 0;
  virtual Box support_x() const = 0;
  virtual double peak() const = 0;

  /// Radius about the center of support_x() outside which
  /// |g(t, .)| < fraction * peak() for every t. Defaults to the corner
  /// distance of support_x(), valid for fraction >= kTailFraction only.
  virtual double spatial_radius(double fraction = kTailFraction) const;
  /// Half-width about the center of support_t() with the same meaning.
  virtual double temporal_radius(double fraction = kTailFraction) const;
  /// Radius of a ball in xi containing the effective support of ghat.
  virtual double frequency_radius() const;

  /// ghat(tau, xi) = int g(t, x) exp(-i (t tau + x.xi)) dt dx.
  virtual bool has_fourier() const { return false; }
  virtual std::complex<double> fourier(double tau, std::span<const double> xi) const;
  /// Boxes outside of which |ghat| is negligible (exactly zero for compact support).
  virtual Interval fourier_support_tau() const;
  virtual Box fourier_support_xi() const;

  /// Closed-form ||g(t, .)||_{L^p_x} (p may be +inf), when known.
  virtual std::optional<double> slice_norm(double t, double p) const;
  /// Closed-form ||g||_{L^q_t L^p_x}, when known.
  virtual std::optional<double> mixed_norm(double q, double p) const;

 private:
  int d_;
};

using PhaseSpacePtr = std::shared_ptr<const PhaseSpaceFunction>;
using SpaceTimePtr = std::shared_ptr<const SpaceTimeFunction>;

// ---------------------------------------------------------------------------
// Gaussians

struct GaussianPhaseSpaceParams {
  int d = 1;
  double amplitude = 1.0;
  std::vector<double> x0;  // empty = origin
  std::vector<double> v0;
  double width_x = 1.0;
  double width_v = 1.0;
};

/// f0(x, v) = A exp(-pi (|x - x0|^2 / sx^2 + |v - v0|^2 / sv^2)).
class GaussianPhaseSpace final : public PhaseSpaceFunction {
 public:
  explicit GaussianPhaseSpace(GaussianPhaseSpaceParams params);

  double operator()(std::span<const double> x, std::span<const double> v) const override;
  Box support_x() const override;
  Box support_v() const override;
  double peak() const override { return std::abs(p_.amplitude); }
  std::optional<double> lebesgue_norm(double p) const override;

  /// rho(f0)(t, x) in closed form.
  double density_closed_form(double t, std::span<const double> x) const;

  /// f0(x / mu, v / nu).
  GaussianPhaseSpace dilated(double mu, double nu) const;

  const GaussianPhaseSpaceParams& params() const { return p_; }

 private:
  GaussianPhaseSpaceParams p_;
};

struct GaussianSpaceTimeParams {
  int d = 1;
  double amplitude = 1.0;
  double t0 = 0.0;
  std::vector<double> x0;
  double width_t = 1.0;
  double width_x = 1.0;
};

/// g(t, x) = A exp(-pi ((t - t0)^2 / st^2 + |x - x0|^2 / sx^2)).
class GaussianSpaceTime final : public SpaceTimeFunction {
 public:
  explicit GaussianSpaceTime(GaussianSpaceTimeParams params);

  double operator()(double t, std::span<const double> x) const override;
  Interval support_t() const override;
  Box support_x() const override;
  double peak() const override { return std::abs(p_.amplitude); }

  double spatial_radius(double fraction) const override;
  double temporal_radius(double fraction) const override;
  double frequency_radius() const override;

  bool has_fourier() const override { return true; }
  std::complex<double> fourier(double tau, std::span<const double> xi) const override;
  Interval fourier_support_tau() const override;
  Box fourier_support_xi() const override;

  std::optional<double> slice_norm(double t, double p) const override;
  std::optional<double> mixed_norm(double q, double p) const override;

  /// rho* g(x, v) in closed form.
  double adjoint_closed_form(std::span<const double> x, std::span<const double> v) const;

  /// g(t / mu, x / nu).
  GaussianSpaceTime dilated(double mu, double nu) const;
  /// A * g.
  GaussianSpaceTime scaled(double factor) const;

  const GaussianSpaceTimeParams& params() const { return p_; }

 private:
  GaussianSpaceTimeParams p_;
};

std::shared_ptr<GaussianPhaseSpace> make_gaussian_phase_space(GaussianPhaseSpaceParams params);
std::shared_ptr<GaussianSpaceTime> make_gaussian_spacetime(GaussianSpaceTimeParams params);

/// ||exp(-pi |x|^2)||_{L^p(R^d)} = p^{-d/(2p)}; 1 for p = inf.
double gaussian_lp_norm(double p, int d);

// ---------------------------------------------------------------------------
// Combinators (used by linearity and power-substitution checks)

/// alpha f + beta h.
class LinearCombination final : public PhaseSpaceFunction {
 public:
  LinearCombination(double alpha, PhaseSpacePtr f, double beta, PhaseSpacePtr h);
  double operator()(std::span<const double> x, std::span<const double> v) const override;
  Box support_x() const override;
  Box support_v() const override;
  double peak() const override;

 private:
  double alpha_, beta_;
  PhaseSpacePtr f_, h_;
};

/// |f0|^lambda.
class PoweredPhaseSpace final : public PhaseSpaceFunction {
 public:
  PoweredPhaseSpace(PhaseSpacePtr f, double lambda);
  double operator()(std::span<const double> x, std::span<const double> v) const override;
  Box support_x() const override { return f_->support_x(); }
  Box support_v() const override { return f_->support_v(); }
  double peak() const override;

 private:
  PhaseSpacePtr f_;
  double lambda_;
};

// ---------------------------------------------------------------------------
// Counterexample class: ghat = phi * phi

/// Even C^N piecewise-polynomial bump b(s) = S_N(1 - |s| / R) on [-R, R],
/// where S_N is the order-N smoothstep (S_N(0) = 0, S_N(1) = 1, first N
/// derivatives vanish at both ends).
class SmoothstepBump {
 public:
  SmoothstepBump(double radius, int order);

  double operator()(double s) const;
  double radius() const { return radius_; }
  int order() const { return order_; }

  /// Exact int b = R.
  double integral() const { return radius_; }
  /// int b^2, by Gauss-Legendre on the polynomial pieces (exact).
  double square_integral() const;
  /// (b * b)(y), exact up to rounding.
  double self_convolution(double y) const;

 private:
  double radius_;
  int order_;
  std::vector<double> coeffs_;  // S_N(u) = sum coeffs_[k] u^k
};

/// Chebyshev interpolant of a function on [a, b].
class ChebyshevPanel {
 public:
  ChebyshevPanel() = default;
  template <class F>
  ChebyshevPanel(double a, double b, int n, F&& f);
  double operator()(double x) const;
  double lo() const { return a_; }
  double hi() const { return b_; }

 private:
  double a_ = 0.0, b_ = 1.0;
  std::vector<double> c_;
};

struct BumpParams {
  int d = 1;
  double amplitude = 1.0;
  double radius_tau = 1.0;  // supp phi in tau is [-R_tau, R_tau]
  double radius_xi = 1.0;   // supp phi in each xi_k is [-R_xi, R_xi]
  int order = 3;
};

/// g in the counterexample class: phi(tau, xi) = b_tau(tau) prod_k b_xi(xi_k),
/// ghat = A (phi * phi) >= 0 with compact support, and
///   g(t, x) = A (2 pi)^{-(1+d)} Phi(t, x)^2 >= 0,  Phi = int phi e^{i z.zeta},
/// with Phi evaluated by quadrature on the inverse-transform grid.
class BumpPairFunction final : public SpaceTimeFunction {
 public:
  BumpPairFunction(BumpParams params, GridSpec inverse_grid);

  double operator()(double t, std::span<const double> x) const override;
  Interval support_t() const override;
  Box support_x() const override;
  double peak() const override { return peak_; }
  double spatial_radius(double fraction) const override;
  double temporal_radius(double fraction) const override;
  double frequency_radius() const override;

  bool has_fourier() const override { return true; }
  std::complex<double> fourier(double tau, std::span<const double> xi) const override;
  Interval fourier_support_tau() const override;
  Box fourier_support_xi() const override;

  /// Real ghat(tau, xi) without the complex wrapper.
  double fourier_real(double tau, std::span<const double> xi) const;

  /// Phi along one axis (0 = t, k = x_k) by direct quadrature, bypassing the
  /// tabulated interpolant.
  double inverse_transform_direct(int axis, double z) const;
  /// Same through the interpolation cache.
  double inverse_transform(int axis, double z) const;

  const BumpParams& params() const { return p_; }
  const SmoothstepBump& bump_tau() const { return b_tau_; }
  const SmoothstepBump& bump_xi() const { return b_xi_; }
  /// Half-width of the effective support of g along t and along each x_k.
  double support_halfwidth_t() const { return z_tau_; }
  double support_halfwidth_x() const { return z_xi_; }
  /// Half-width along one axis outside which Phi^2 < fraction * Phi(0)^2.
  double halfwidth(int axis, double fraction) const;

 private:
  struct AxisTable {
    double panel = 1.0;
    double extent = 0.0;
    std::vector<ChebyshevPanel> panels;
    std::vector<double> scan_z;         // scan abscissae
    std::vector<double> scan_envelope;  // max_{z' >= z} |B(z')| / B(0)
  };
  struct ConvTable {
    ChebyshevPanel inner, outer;  // [0, R] and [R, 2R]
    double radius = 1.0;
    double operator()(double y) const;
  };

  double direct(const SmoothstepBump& b, const Nodes& nodes, double z) const;
  double cached(const AxisTable& table, const SmoothstepBump& b, const Nodes& nodes, double z) const;

  BumpParams p_;
  GridSpec grid_;
  SmoothstepBump b_tau_, b_xi_;
  Nodes nodes_tau_, nodes_xi_;
  AxisTable table_tau_, table_xi_;
  ConvTable conv_tau_, conv_xi_;
  double z_tau_ = 0.0, z_xi_ = 0.0;
  double norm_ = 1.0;
  double peak_ = 1.0;
};

/// Default inverse-transform grid: trapezoid, 129 points per axis over supp phi.
GridSpec default_inverse_grid(const BumpParams& params);

std::shared_ptr<BumpPairFunction> make_counterexample_g(BumpParams params, GridSpec inverse_grid);
std::shared_ptr<BumpPairFunction> make_counterexample_g(BumpParams params);

// ---------------------------------------------------------------------------
// Sampling / export

struct Sample {
  std::vector<double> coords;
  double value = 0.0;
};

/// g sampled on a (1+d)-dimensional grid (t, x_1, ..., x_d).
std::vector<Sample> sample_spacetime(const SpaceTimeFunction& g, const GridSpec& grid);

}  // namespace kinlab

#include "kinlab/detail/chebyshev_impl.hpp"
