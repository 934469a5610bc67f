#pragma once

#include <optional>
#include <string>
#include <vector>

namespace kinlab {

enum class GrowthModel { logarithmic, power_law };

const char* model_name(GrowthModel m);

/// Least-squares fit y = c0 + c1 * X with X = ln(param) (logarithmic) or
/// ln y = c0 + c1 ln(param) (power law).
struct GrowthFit {
  GrowthModel model = GrowthModel::logarithmic;
  double c0 = 0.0;
  double c1 = 0.0;
  double c0_stderr = 0.0;
  double c1_stderr = 0.0;
  double c1_ci_lo = 0.0;  // 95% confidence interval of c1 (Student t)
  double c1_ci_hi = 0.0;
  double r_squared = 0.0;
  std::vector<double> residuals;
};

struct GrowthRow {
  double param = 0.0;
  double value = 0.0;
  double error = 0.0;
};

/// Series of (truncation parameter, value) with a fitted growth law.
class GrowthTable {
 public:
  /// Fits need at least this many rows (one residual degree of freedom).
  static constexpr std::size_t kMinFitRows = 3;

  GrowthTable() = default;
  explicit GrowthTable(std::vector<GrowthRow> rows);

  void add(double param, double value, double error = 0.0);

  const std::vector<GrowthRow>& rows() const { return rows_; }
  bool insufficient_data() const { return rows_.size() < kMinFitRows; }
  bool strictly_increasing() const;
  bool nondecreasing() const;
  /// Successive differences value[k+1] - value[k].
  std::vector<double> increments() const;

  /// Empty when there are too few rows. With `reciprocal_param` the abscissa
  /// is ln(1/param), as for eps-schedules.
  std::optional<GrowthFit> fit(GrowthModel model, bool reciprocal_param = false) const;

 private:
  std::vector<GrowthRow> rows_;
};

}  // namespace kinlab
