#pragma once

#include <array>
#include <cmath>
#include <span>

namespace kinlab::detail {

/// Orthonormal frame of R^d (d <= 3) whose first vector is v / |v|; the
/// standard basis when v = 0.
inline std::array<std::array<double, 3>, 3> frame_along(std::span<const double> v, int d) {
  std::array<std::array<double, 3>, 3> e{};
  double n = 0.0;
  for (int k = 0; k < d; ++k) n += v[k] * v[k];
  n = std::sqrt(n);
  if (n == 0.0 || d == 1) {
    for (int k = 0; k < d; ++k) e[k][k] = 1.0;
    return e;
  }
  for (int k = 0; k < d; ++k) e[0][k] = v[k] / n;
  if (d == 2) {
    e[1] = {-e[0][1], e[0][0], 0.0};
    return e;
  }
  // Cross with the coordinate axis least aligned with v.
  int axis = 0;
  for (int k = 1; k < 3; ++k) {
    if (std::abs(e[0][k]) < std::abs(e[0][axis])) axis = k;
  }
  std::array<double, 3> a{};
  a[axis] = 1.0;
  auto cross = [](const std::array<double, 3>& p, const std::array<double, 3>& q) {
    return std::array<double, 3>{p[1] * q[2] - p[2] * q[1], p[2] * q[0] - p[0] * q[2], p[0] * q[1] - p[1] * q[0]};
  };
  e[1] = cross(e[0], a);
  const double m = std::sqrt(e[1][0] * e[1][0] + e[1][1] * e[1][1] + e[1][2] * e[1][2]);
  for (double& c : e[1]) c /= m;
  e[2] = cross(e[0], e[1]);
  return e;
}

}  // namespace kinlab::detail
