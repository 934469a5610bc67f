#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "kinlab/functions.hpp"
#include "kinlab/quadrature.hpp"

namespace kinlab::detail {

inline constexpr int kMaxBoxDim = 6;

inline bool box_empty(const Box& box) {
  return std::any_of(box.begin(), box.end(), [](const Interval& iv) { return !(iv.hi > iv.lo); });
}

/// Tensor rule over a box of dimension <= kMaxBoxDim; f takes const double*.
/// Nodes are visited in lexicographic order (last axis fastest).
template <class F>
double box_integrate(const Box& box, int count, Rule rule, F&& f) {
  const int dim = static_cast<int>(box.size());
  if (dim == 0) return f(static_cast<const double*>(nullptr));
  if (box_empty(box)) return 0.0;
  std::array<Nodes, kMaxBoxDim> nodes;
  for (int k = 0; k < dim; ++k) nodes[k] = interval_nodes(box[k].lo, box[k].hi, count, rule);
  std::array<int, kMaxBoxDim> idx{};
  std::array<double, kMaxBoxDim> p{};
  double sum = 0.0;
  while (true) {
    double w = 1.0;
    for (int k = 0; k < dim; ++k) {
      p[k] = nodes[k].x[idx[k]];
      w *= nodes[k].w[idx[k]];
    }
    sum += w * f(p.data());
    int k = dim - 1;
    while (k >= 0 && ++idx[k] == count) idx[k--] = 0;
    if (k < 0) break;
  }
  return sum;
}

/// Largest |f| over the faces of the box, sampled at the tensor nodes of the
/// remaining axes.
template <class F>
double box_boundary_max(const Box& box, int count, Rule rule, F&& f) {
  const int dim = static_cast<int>(box.size());
  if (dim == 0 || box_empty(box)) return 0.0;
  double worst = 0.0;
  for (int face = 0; face < dim; ++face) {
    for (double edge : {box[face].lo, box[face].hi}) {
      Box sub;
      for (int k = 0; k < dim; ++k) {
        if (k != face) sub.push_back(box[k]);
      }
      auto on_face = [&](const double* q) {
        std::array<double, kMaxBoxDim> p{};
        for (int k = 0, j = 0; k < dim; ++k) p[k] = k == face ? edge : q[j++];
        worst = std::max(worst, std::abs(f(p.data())));
        return 0.0;
      };
      if (sub.empty()) {
        on_face(nullptr);
      } else {
        box_integrate(sub, count, rule, on_face);
      }
    }
  }
  return worst;
}

}  // namespace kinlab::detail
