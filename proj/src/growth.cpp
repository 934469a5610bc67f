#include "kinlab/growth.hpp"

#include <cmath>

#include <boost/math/distributions/students_t.hpp>

#include "kinlab/error.hpp"

namespace kinlab {

const char* model_name(GrowthModel m) { return m == GrowthModel::logarithmic ? "c0 + c1*ln(x)" : "exp(c0) * x^c1"; }

GrowthTable::GrowthTable(std::vector<GrowthRow> rows) : rows_(std::move(rows)) {}

void GrowthTable::add(double param, double value, double error) { rows_.push_back({param, value, error}); }

bool GrowthTable::strictly_increasing() const {
  for (std::size_t i = 1; i < rows_.size(); ++i) {
    if (!(rows_[i].value > rows_[i - 1].value)) return false;
  }
  return true;
}

bool GrowthTable::nondecreasing() const {
  for (std::size_t i = 1; i < rows_.size(); ++i) {
    if (!(rows_[i].value >= rows_[i - 1].value)) return false;
  }
  return true;
}

std::vector<double> GrowthTable::increments() const {
  std::vector<double> out;
  for (std::size_t i = 1; i < rows_.size(); ++i) out.push_back(rows_[i].value - rows_[i - 1].value);
  return out;
}

std::optional<GrowthFit> GrowthTable::fit(GrowthModel model, bool reciprocal_param) const {
  if (insufficient_data()) return std::nullopt;
  const std::size_t n = rows_.size();
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double p = reciprocal_param ? 1.0 / rows_[i].param : rows_[i].param;
    if (!(p > 0.0)) throw MalformedInput("endpoint_lab", "growth fit needs positive parameters");
    x[i] = std::log(p);
    if (model == GrowthModel::power_law) {
      if (!(rows_[i].value > 0.0)) throw MalformedInput("endpoint_lab", "power-law fit needs positive values");
      y[i] = std::log(rows_[i].value);
    } else {
      y[i] = rows_[i].value;
    }
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw DegenerateInput("endpoint_lab", "growth fit needs distinct parameters");
  GrowthFit f;
  f.model = model;
  f.c1 = sxy / sxx;
  f.c0 = my - f.c1 * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (f.c0 + f.c1 * x[i]);
    f.residuals.push_back(r);
    sse += r * r;
  }
  f.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  const double dof = static_cast<double>(n - 2);
  const double s2 = sse / dof;
  f.c1_stderr = std::sqrt(s2 / sxx);
  f.c0_stderr = std::sqrt(s2 * (1.0 / n + mx * mx / sxx));
  const boost::math::students_t dist(dof);
  const double tq = boost::math::quantile(boost::math::complement(dist, 0.025));
  f.c1_ci_lo = f.c1 - tq * f.c1_stderr;
  f.c1_ci_hi = f.c1 + tq * f.c1_stderr;
  return f;
}

}  // namespace kinlab
