#pragma once

#include <string>
#include <vector>

#include "kinlab/ext_rational.hpp"

namespace kinlab::exponents {

/// Lebesgue exponents (q, p, r, a) of the estimate
///   ||f||_{L^q_t L^p_x L^r_v} <= C ||f0||_{L^a_{x,v}}.
/// Every entry is positive (possibly +inf). Entries below 1 only arise as
/// intermediate results of `scale`.
struct ExponentTuple {
  ExtRational q, p, r, a;

  /// Validates positivity; throws MalformedInput otherwise.
  static ExponentTuple make(ExtRational q, ExtRational p, ExtRational r, ExtRational a);

  bool is_lebesgue() const;  // all entries >= 1
  std::string str() const;   // "(q, p, r, a)" with exact fractions

  friend bool operator==(const ExponentTuple&, const ExponentTuple&) = default;
};

/// Conditions of the admissible range, in the order they are checked.
enum class Condition {
  time_scaling,     // 2/q = d (1/r - 1/p)
  average_scaling,  // 1/a = (1/r + 1/p) / 2
  q_greater_a,      // q > a
  p_at_least_a,     // p >= a
};

const char* condition_id(Condition c);

enum class Status { admissible_nonendpoint, endpoint, inadmissible };

const char* status_name(Status s);

struct AdmissibilityVerdict {
  Status status = Status::inadmissible;
  std::vector<Condition> violated;
};

AdmissibilityVerdict check_admissible(const ExponentTuple& e, int d);

/// (q/lambda, p/lambda, r/lambda, a/lambda): the power substitution f -> f^lambda.
ExponentTuple scale(const ExponentTuple& e, const ExtRational& lambda);

struct DualTriple {
  ExtRational q, p, a;  // Hoelder conjugates q', p', a'
  friend bool operator==(const DualTriple&, const DualTriple&) = default;
};

/// Hoelder conjugates of (q, p, a); r is not used.
DualTriple dualize(const ExponentTuple& e);

/// Tuple of the r = 1 family parametrised by p:
///   2/q = d (1 - 1/p),  1/a = (1 + 1/p) / 2.
ExponentTuple reduced_family(const ExtRational& p, int d);

/// True when e has r = 1 and satisfies both scaling relations of the r = 1 family.
bool in_reduced_family(const ExponentTuple& e, int d);

/// dualize() for a member of the r = 1 family. Verifies a' = 2 p' and
/// 1/q' + d/a' = 1 exactly; throws MalformedInput if e is not in the family.
DualTriple dualize_reduced(const ExponentTuple& e, int d);

/// Exact solution of 1/q + d/((d+1) sigma) = 1 for sigma > 1.
ExtRational q_of_sigma(const ExtRational& sigma, int d);

/// d+1, the value q_of_sigma approaches as sigma -> 1. Its conjugate (d+1)/d
/// is q = a of the rescaled endpoint tuple.
ExtRational q_endpoint_limit(int d);

/// The L^2-based endpoint tuple (2, 2d/(d-1), 2d/(d+1), 2); p = inf for d = 1.
ExponentTuple endpoint_l2(int d);

}  // namespace kinlab::exponents
