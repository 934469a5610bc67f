#include <doctest.h>

#include "kinlab/error.hpp"
#include "kinlab/exponents.hpp"
#include "kinlab/rng.hpp"

using namespace kinlab;
using namespace kinlab::exponents;

namespace {

ExtRational R(std::int64_t n, std::int64_t d = 1) { return ExtRational(n, d); }

ExponentTuple T(ExtRational q, ExtRational p, ExtRational r, ExtRational a) { return ExponentTuple::make(q, p, r, a); }

}  // namespace

TEST_CASE("extended rationals") {
  CHECK(ExtRational::parse("4/3") == R(4, 3));
  CHECK(ExtRational::parse("-1/2") == R(-1, 2));
  CHECK(ExtRational::parse("inf").is_infinite());
  CHECK(ExtRational::parse("∞").is_infinite());
  CHECK(ExtRational::parse("6/4").str() == "3/2");
  CHECK(R(3, 2).conjugate() == R(3));
  CHECK(R(1).conjugate().is_infinite());
  CHECK(ExtRational::infinity().conjugate() == R(1));
  CHECK(ExtRational::infinity().reciprocal() == R(0));
  CHECK(R(0).reciprocal().is_infinite());
  CHECK(R(1, 3) + R(1, 6) == R(1, 2));
  CHECK(R(2) < ExtRational::infinity());
  CHECK_THROWS_AS(ExtRational::parse("abc"), MalformedInput);
  CHECK_THROWS_AS(ExtRational::parse("1/0"), MalformedInput);
  CHECK_THROWS(ExtRational::infinity() - ExtRational::infinity());
  CHECK_THROWS(R(0) * ExtRational::infinity());
}

TEST_CASE("admissibility examples") {
  CHECK(check_admissible(T(2, 4, R(4, 3), 2), 2).status == Status::endpoint);
  CHECK(check_admissible(T(3, 3, 1, R(3, 2)), 1).status == Status::admissible_nonendpoint);
  const auto v = check_admissible(T(2, 2, 2, 2), 2);
  CHECK(v.status == Status::inadmissible);
  REQUIRE_FALSE(v.violated.empty());
  CHECK(v.violated.front() == Condition::time_scaling);
  CHECK(std::string(status_name(Status::endpoint)) == "endpoint");
  CHECK_THROWS_AS(T(0, 2, 2, 2), MalformedInput);
  CHECK_THROWS_AS(T(-1, 2, 2, 2), MalformedInput);
}

TEST_CASE("endpoint tuples") {
  CHECK(endpoint_l2(1) == T(2, ExtRational::infinity(), 1, 2));
  CHECK(endpoint_l2(2) == T(2, 4, R(4, 3), 2));
  CHECK(endpoint_l2(3) == T(2, 3, R(3, 2), 2));
  for (int d = 1; d <= 4; ++d) CHECK(check_admissible(endpoint_l2(d), d).status == Status::endpoint);
}

TEST_CASE("power substitution") {
  CHECK(scale(endpoint_l2(2), R(4, 3)) == T(R(3, 2), 3, 1, R(3, 2)));
  CHECK(scale(endpoint_l2(1), R(1)) == endpoint_l2(1));
  const auto e = T(3, 3, 1, R(3, 2));
  CHECK(scale(e, 1) == e);
  CHECK_THROWS_AS(scale(e, 0), MalformedInput);
  CHECK_THROWS_AS(scale(e, R(-1, 2)), MalformedInput);
  // scaling relations are invariant under the substitution; q = a stays
  CHECK(check_admissible(scale(endpoint_l2(2), R(4, 3)), 2).status == Status::endpoint);
}

TEST_CASE("duals") {
  CHECK(dualize(T(R(3, 2), 3, 1, R(3, 2))) == DualTriple{3, R(3, 2), 3});
  CHECK(dualize(T(2, 2, 1, 2)) == DualTriple{2, 2, 2});
  const auto e = reduced_family(R(9, 7), 2);
  CHECK(e.a == R(9, 8));
  const auto dual = dualize_reduced(e, 2);
  CHECK(dual.a == R(9));
  CHECK(dual.p == R(9, 2));
  CHECK(dual.q == R(9, 7));
  CHECK_THROWS_AS(dualize_reduced(T(2, 2, 2, 2), 2), MalformedInput);
}

TEST_CASE("q of sigma") {
  CHECK(q_of_sigma(R(3, 2), 2) == R(9, 5));
  CHECK(q_of_sigma(R(2), 1) == R(4, 3));
  CHECK_THROWS_AS(q_of_sigma(R(1), 2), OutOfRange);
  CHECK_THROWS_AS(q_of_sigma(R(1, 2), 2), OutOfRange);
  for (int d = 1; d <= 3; ++d) {
    CHECK(q_endpoint_limit(d) == R(d + 1));
    // the conjugate of the limit is q = a of the endpoint tuple after the power substitution
    const auto e = scale(endpoint_l2(d), R(2 * d, d + 1));
    CHECK(q_endpoint_limit(d).conjugate() == e.q);
    CHECK(e.q == e.a);
    CHECK(e.a == R(d + 1, d));
    // increasing approach to the limit as sigma decreases to 1
    CHECK(q_of_sigma(R(11, 10), d) < q_endpoint_limit(d));
    CHECK(q_of_sigma(R(1001, 1000), d) > q_of_sigma(R(11, 10), d));
    CHECK(q_of_sigma(R(2), d) < q_of_sigma(R(11, 10), d));
    // at sigma = a'/(d+1) the dual exponent q' is recovered
    const auto f = reduced_family(R(2), d);
    const auto dual = dualize(f);
    if (dual.a > R(d + 1)) CHECK(q_of_sigma(dual.a / R(d + 1), d) == dual.q);
  }
}

TEST_CASE("property: family tuples satisfy both dual relations exactly") {
  CounterRng rng(7);
  for (int d = 1; d <= 3; ++d) {
    for (int i = 0; i < 200; ++i) {
      const std::int64_t m = 2 + static_cast<std::int64_t>(rng.next_u64() % 97);
      const std::int64_t lo = d <= 2 ? 1 : m / 3 + 1;
      const std::int64_t k = lo + static_cast<std::int64_t>(rng.next_u64() % static_cast<std::uint64_t>(m - lo));
      const auto e = reduced_family(R(m, k), d);
      CHECK(in_reduced_family(e, d));
      const auto dual = dualize_reduced(e, d);
      CHECK(dual.a == R(2) * dual.p);
      CHECK(dual.q.reciprocal() + R(d) * dual.a.reciprocal() == R(1));
      // the scaling conditions of the admissible range hold for every member
      const auto v = check_admissible(e, d);
      for (auto c : v.violated) {
        CHECK(c != Condition::time_scaling);
        CHECK(c != Condition::average_scaling);
      }
    }
  }
}

TEST_CASE("property: family members are non-endpoint exactly when q > a") {
  for (int d = 1; d <= 3; ++d) {
    for (std::int64_t m = 2; m <= 40; ++m) {
      for (std::int64_t k = 1; k < m; ++k) {
        const ExtRational p(m, k);
        if (ExtRational(1) / p <= ExtRational(d - 2, d) || ExtRational(k, m) >= ExtRational(1)) continue;
        const auto e = reduced_family(p, d);
        if (e.p < e.a) continue;
        const bool nonendpoint = check_admissible(e, d).status == Status::admissible_nonendpoint;
        CHECK(nonendpoint == (e.q > e.a));
      }
    }
  }
}

TEST_CASE("property: scale round trip") {
  CounterRng rng(11);
  for (int i = 0; i < 100; ++i) {
    const ExtRational lambda(1 + static_cast<std::int64_t>(rng.next_u64() % 50),
                             1 + static_cast<std::int64_t>(rng.next_u64() % 50));
    const auto e = endpoint_l2(1 + i % 3);
    CHECK(scale(scale(e, lambda), lambda.reciprocal()) == e);
  }
}

TEST_CASE("property: scale composes multiplicatively") {
  const auto e = endpoint_l2(3);
  CHECK(scale(scale(e, R(3, 2)), R(4, 5)) == scale(e, R(6, 5)));
  CHECK(scale(scale(e, R(7, 3)), R(3, 7)) == e);
}
