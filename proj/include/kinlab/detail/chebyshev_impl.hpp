#pragma once

#include <cmath>
#include <numbers>

namespace kinlab {

template <class F>
ChebyshevPanel::ChebyshevPanel(double a, double b, int n, F&& f) : a_(a), b_(b), c_(n, 0.0) {
  std::vector<double> fx(n);
  for (int j = 0; j < n; ++j) {
    const double u = std::cos(std::numbers::pi * (j + 0.5) / n);
    fx[j] = f(0.5 * (a + b) + 0.5 * (b - a) * u);
  }
  for (int k = 0; k < n; ++k) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += fx[j] * std::cos(std::numbers::pi * k * (j + 0.5) / n);
    c_[k] = (k == 0 ? 1.0 : 2.0) * s / n;
  }
}

inline double ChebyshevPanel::operator()(double x) const {
  const double u = (2.0 * x - a_ - b_) / (b_ - a_);
  double b1 = 0.0, b2 = 0.0;
  for (std::size_t k = c_.size(); k-- > 1;) {
    const double b0 = 2.0 * u * b1 - b2 + c_[k];
    b2 = b1;
    b1 = b0;
  }
  return u * b1 - b2 + c_[0];
}

}  // namespace kinlab
