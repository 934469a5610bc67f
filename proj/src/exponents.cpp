#include "kinlab/exponents.hpp"

#include "kinlab/error.hpp"

namespace kinlab::exponents {

namespace {

const char* kModule = "exponents";

void require_dimension(int d) {
  if (d < 1) throw MalformedInput(kModule, "dimension must be >= 1, got " + std::to_string(d));
}

}  // namespace

ExponentTuple ExponentTuple::make(ExtRational q, ExtRational p, ExtRational r, ExtRational a) {
  for (const auto* x : {&q, &p, &r, &a}) {
    if (!x->is_positive()) throw MalformedInput(kModule, "non-positive exponent " + x->str());
  }
  return ExponentTuple{std::move(q), std::move(p), std::move(r), std::move(a)};
}

bool ExponentTuple::is_lebesgue() const {
  const ExtRational one(1);
  return q >= one && p >= one && r >= one && a >= one;
}

std::string ExponentTuple::str() const {
  return "(" + q.str() + ", " + p.str() + ", " + r.str() + ", " + a.str() + ")";
}

const char* condition_id(Condition c) {
  switch (c) {
    case Condition::time_scaling: return "2/q=d(1/r-1/p)";
    case Condition::average_scaling: return "1/a=(1/r+1/p)/2";
    case Condition::q_greater_a: return "q>a";
    case Condition::p_at_least_a: return "p>=a";
  }
  return "?";
}

const char* status_name(Status s) {
  switch (s) {
    case Status::admissible_nonendpoint: return "admissible-nonendpoint";
    case Status::endpoint: return "endpoint";
    case Status::inadmissible: return "inadmissible";
  }
  return "?";
}

AdmissibilityVerdict check_admissible(const ExponentTuple& e, int d) {
  require_dimension(d);
  ExponentTuple::make(e.q, e.p, e.r, e.a);

  const ExtRational iq = e.q.reciprocal(), ip = e.p.reciprocal(), ir = e.r.reciprocal(),
                    ia = e.a.reciprocal();
  AdmissibilityVerdict verdict;
  const bool time_ok = ExtRational(2) * iq == ExtRational(d) * (ir - ip);
  const bool avg_ok = ia * ExtRational(2) == ir + ip;
  const bool q_gt_a = e.q > e.a;
  const bool p_ge_a = e.p >= e.a;
  if (!time_ok) verdict.violated.push_back(Condition::time_scaling);
  if (!avg_ok) verdict.violated.push_back(Condition::average_scaling);
  if (!q_gt_a) verdict.violated.push_back(Condition::q_greater_a);
  if (!p_ge_a) verdict.violated.push_back(Condition::p_at_least_a);

  if (verdict.violated.empty()) {
    verdict.status = Status::admissible_nonendpoint;
  } else if (time_ok && avg_ok && p_ge_a && e.q == e.a) {
    verdict.status = Status::endpoint;
  } else {
    verdict.status = Status::inadmissible;
  }
  return verdict;
}

ExponentTuple scale(const ExponentTuple& e, const ExtRational& lambda) {
  if (!lambda.is_finite() || !lambda.is_positive() || lambda.is_zero()) {
    throw MalformedInput(kModule, "scale factor must be finite and positive, got " + lambda.str());
  }
  return ExponentTuple::make(e.q / lambda, e.p / lambda, e.r / lambda, e.a / lambda);
}

DualTriple dualize(const ExponentTuple& e) {
  const ExtRational one(1);
  if (e.q < one || e.p < one || e.a < one) {
    throw MalformedInput(kModule, "dualize needs q, p, a >= 1, got " + e.str());
  }
  return DualTriple{e.q.conjugate(), e.p.conjugate(), e.a.conjugate()};
}

ExponentTuple reduced_family(const ExtRational& p, int d) {
  require_dimension(d);
  if (p < ExtRational(1)) throw MalformedInput(kModule, "p must be >= 1, got " + p.str());
  const ExtRational ip = p.reciprocal();
  const ExtRational two_over_q = ExtRational(d) * (ExtRational(1) - ip);
  if (two_over_q.is_zero()) throw OutOfRange(kModule, "p = 1 gives q = inf outside the family");
  const ExtRational q = ExtRational(2) / two_over_q;
  const ExtRational a = ExtRational(2) / (ExtRational(1) + ip);
  return ExponentTuple::make(q, p, ExtRational(1), a);
}

bool in_reduced_family(const ExponentTuple& e, int d) {
  if (e.r != ExtRational(1)) return false;
  const ExtRational ip = e.p.reciprocal();
  return ExtRational(2) * e.q.reciprocal() == ExtRational(d) * (ExtRational(1) - ip) &&
         ExtRational(2) * e.a.reciprocal() == ExtRational(1) + ip;
}

DualTriple dualize_reduced(const ExponentTuple& e, int d) {
  require_dimension(d);
  if (!in_reduced_family(e, d)) {
    throw MalformedInput(kModule, "tuple " + e.str() + " is not in the r = 1 family for d = " +
                                      std::to_string(d));
  }
  DualTriple dual = dualize(e);
  if (dual.a != ExtRational(2) * dual.p) {
    throw std::logic_error("a' = 2p' fails for " + e.str());
  }
  if (dual.q.reciprocal() + ExtRational(d) * dual.a.reciprocal() != ExtRational(1)) {
    throw std::logic_error("1/q' + d/a' = 1 fails for " + e.str());
  }
  return dual;
}

ExtRational q_of_sigma(const ExtRational& sigma, int d) {
  require_dimension(d);
  if (!sigma.is_finite() || sigma <= ExtRational(1)) {
    throw OutOfRange(kModule, "sigma must be finite and > 1 (endpoint excluded), got " + sigma.str());
  }
  const ExtRational inv_q = ExtRational(1) - ExtRational(d) / (ExtRational(d + 1) * sigma);
  return inv_q.reciprocal();
}

ExtRational q_endpoint_limit(int d) {
  require_dimension(d);
  return ExtRational(d + 1);
}

ExponentTuple endpoint_l2(int d) {
  require_dimension(d);
  const ExtRational p = d == 1 ? ExtRational::infinity() : ExtRational(2 * d, d - 1);
  return ExponentTuple::make(ExtRational(2), p, ExtRational(2 * d, d + 1), ExtRational(2));
}

}  // namespace kinlab::exponents
