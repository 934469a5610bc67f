#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace kinlab {

enum class Rule { trapezoid, gauss_legendre };

const char* rule_name(Rule r);
Rule parse_rule(const std::string& name);

/// One axis of a tensor-product grid.
struct AxisGrid {
  double lo = -1.0;
  double hi = 1.0;
  int count = 2;
  Rule rule = Rule::trapezoid;

  void validate() const;
  /// Same interval and rule with about half the points (odd trapezoid grids
  /// give every other node).
  AxisGrid coarsened() const;
};

/// Tensor-product quadrature grid over one axis group (t, x, v or xi).
struct GridSpec {
  std::vector<AxisGrid> axes;

  static GridSpec uniform(int dim, double lo, double hi, int count, Rule rule = Rule::trapezoid);

  int dimension() const { return static_cast<int>(axes.size()); }
  void validate() const;
  GridSpec coarsened() const;
  double total_weight() const;
  double volume() const;
  std::size_t size() const;
};

struct Nodes {
  std::vector<double> x;
  std::vector<double> w;
};

/// Gauss-Legendre nodes and weights on [-1, 1], cached per count.
const Nodes& gauss_legendre(int count);

/// Nodes and weights of one axis.
Nodes axis_nodes(const AxisGrid& axis);

/// Trapezoid/GL nodes on [lo, hi] with the given count.
Nodes interval_nodes(double lo, double hi, int count, Rule rule);

/// Calls f(point, weight) for each node of the tensor grid in lexicographic
/// order (last axis fastest).
void for_each_node(const GridSpec& grid,
                   const std::function<void(std::span<const double>, double)>& f);

/// Tensor quadrature of f over the grid, summed in node order.
double integrate(const GridSpec& grid, const std::function<double(std::span<const double>)>& f);

/// Pairwise (tree) summation in a fixed order.
double pairwise_sum(std::span<const double> values);

/// Quadrature of the ball |v| <= radius in dimension 1, 2 or 3, organised in
/// radial shells so nested truncations can share work.
struct BallNode {
  double v[3] = {0.0, 0.0, 0.0};
  double weight = 0.0;
};

struct BallShell {
  double r_lo = 0.0;
  double r_hi = 0.0;
  std::vector<BallNode> nodes;
};

struct BallRule {
  int radial_per_shell = 8;  // Gauss-Legendre nodes per radial shell
  int angular = 32;          // trapezoid nodes in the azimuth (d >= 2)
  int polar = 16;            // Gauss-Legendre nodes in cos(theta) (d = 3)
  double unit = 1.0;         // first shell is [0, unit], then dyadic

  BallRule coarsened() const;
};

/// Shell boundaries: 0, min(unit, R), then doubling, plus every extra
/// breakpoint in (0, R]. The last boundary is R.
std::vector<double> shell_boundaries(double radius, const BallRule& rule,
                                     std::span<const double> extra_breaks = {});

std::vector<BallShell> ball_shells(int d, std::span<const double> boundaries, const BallRule& rule);

/// Surface measure of S^{d-1}.
double sphere_area(int d);

}  // namespace kinlab
