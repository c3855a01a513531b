#include <catch_amalgamated.hpp>

#include <cmath>

#include "isoprof/potential.hpp"

using namespace isoprof;
using Catch::Matchers::WithinRel;
using Catch::Matchers::WithinAbs;

TEST_CASE("power potential evaluation, inverse and derivatives", "[potential]") {
  CHECK(Potential::power(1)(3.0) == 3.0);
  CHECK_THAT(Potential::power(2)(2.0), WithinRel(4.0, 1e-15));
  CHECK_THAT(Potential::power(2, 0.5)(2.0), WithinRel(1.0, 1e-15));
  CHECK(Potential::power(2)(0.0) == 0.0);
  CHECK_THAT(Potential::power(2).inverse(9.0), WithinRel(3.0, 1e-12));
  CHECK_THAT(Potential::power(1).inverse(7.0), WithinRel(7.0, 1e-12));
  CHECK_THAT(Potential::power(3).inverse(8.0), WithinRel(2.0, 1e-12));
  CHECK(Potential::power(3).inverse(0.0) == 0.0);
  CHECK_THAT(Potential::power(2).deriv(3.0), WithinRel(6.0, 1e-15));
  CHECK_THAT(Potential::power(1).deriv(5.0), WithinRel(1.0, 1e-15));
  CHECK_THAT(Potential::power(3).deriv2(2.0), WithinRel(12.0, 1e-14));
  CHECK_THROWS_AS(Potential::power(2)(-1.0), DomainError);
  CHECK_THROWS_AS(Potential::power(0.5), DomainError);
}

TEST_CASE("custom potential uses finite differences", "[potential]") {
  const auto p = Potential::custom([](double x) { return x * x; });
  CHECK_THAT(p.deriv(3.0), WithinAbs(6.0, 1e-6));
  CHECK_THAT(p.deriv2(3.0), WithinAbs(2.0, 1e-3));
  CHECK_THAT(p.inverse(16.0), WithinRel(4.0, 1e-10));
  CHECK(!p.is_power());
}

TEST_CASE("scaling and inverse round trip", "[potential]") {
  for (double alpha : {1.0, 1.2, 1.5, 2.0, 3.0, 5.0}) {
    const auto p1 = Potential::power(alpha);
    const auto pc = Potential::power(alpha, 1.7);
    for (double x : numeric::geomspace(1e-3, 50.0, 30)) {
      CHECK(pc(x) == p1(1.7 * x));
      CHECK_THAT(p1.inverse(p1(x)), WithinRel(x, 1e-10));
    }
    CHECK_THAT(p1.unit_normalized().inverse(1.0), WithinRel(1.0, 1e-12));
  }
}

TEST_CASE("hypothesis classes of the power family", "[potential]") {
  auto rep = [](double alpha) { return check_hypotheses(Potential::power(alpha), 64, 100.0); };
  const auto r15 = rep(1.5);
  CHECK(r15.h0.holds());
  CHECK(r15.h1_prime.holds());
  CHECK(r15.h1.holds());
  CHECK(r15.h2.verdict == Verdict::fails);
  CHECK(std::isfinite(r15.h2.witness_x));

  const auto r2 = rep(2.0);
  CHECK(r2.h1.holds());
  CHECK(r2.h2.holds());
  CHECK(r2.h2_prime.holds());

  const auto r3 = rep(3.0);
  CHECK(r3.h2.holds());
  CHECK(r3.h2_prime.holds());
  REQUIRE(r3.alpha_h2prime);
  CHECK(*r3.alpha_h2prime == 3.0);
  CHECK(!r3.h1.holds());
  CHECK(!r3.h1_prime.holds());

  const auto r1 = rep(1.0);
  CHECK(r1.h1_prime.holds());
  CHECK(!r1.h2.holds());

  // phi(0) != 0 is outside every class.
  const auto shifted = check_hypotheses(Potential::custom([](double x) { return 1 + x * x; }), 64, 10.0);
  CHECK(shifted.h0.verdict == Verdict::fails);
  CHECK_THROWS_AS(check_hypotheses(Potential::power(2), 8, 10.0), DomainError);
}

TEST_CASE("hypothesis implications hold on every tested potential", "[potential][property]") {
  for (double alpha : {1.0, 1.1, 1.2, 1.5, 1.8, 2.0, 2.5, 3.0, 5.0}) {
    const auto r = check_hypotheses(Potential::power(alpha), 64, 100.0);
    if (r.h1_prime.holds()) CHECK(r.h1.holds());
    if (r.h2_prime.holds()) CHECK(r.h2.holds());
    if (r.h1.holds() && r.h2.holds()) CHECK(alpha == 2.0);
  }
}

TEST_CASE("scaling inequalities hold for the detected class", "[potential][property]") {
  for (double alpha : {1.0, 1.2, 1.5, 2.0, 3.0, 5.0}) {
    const auto p = Potential::power(alpha);
    const auto rep = check_hypotheses(p, 64, 1e3);
    for (double t : {1.0, 1.5, 2.0, 4.0}) {
      for (double x : numeric::geomspace(1e-2, 1e2, 64)) {
        const auto res = lemma21_check(p, t, x, rep);
        INFO("alpha=" << alpha << " t=" << t << " x=" << x);
        CHECK(res.all_pass());
        CHECK(res.min_slack() >= -1e-9);
      }
    }
  }
}

TEST_CASE("scaling inequality examples", "[potential]") {
  const auto r2 = lemma21_check(Potential::power(2), 2.0, 1.0);
  bool saw_upper = false;
  for (const auto& c : r2.checks)
    if (c.statement == "phi(t*x) <= t^2*phi(x)") {
      saw_upper = true;
      CHECK_THAT(c.lhs, WithinRel(4.0, 1e-15));
      CHECK_THAT(c.rhs, WithinRel(4.0, 1e-15));
      CHECK(c.pass);
    }
  CHECK(saw_upper);
  const auto r1 = lemma21_check(Potential::power(1), 3.0, 2.0);
  CHECK(r1.checks.front().lhs == 6.0);
  CHECK(r1.checks.front().rhs == 6.0);
  const auto r3 = lemma21_check(Potential::power(3), 2.0, 1.0);
  CHECK(r3.all_pass());
  CHECK_THROWS_AS(lemma21_check(Potential::power(2), 0.5, 1.0), DomainError);
}
