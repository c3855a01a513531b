#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "isoprof/bounds.hpp"

using namespace isoprof;
using Catch::Matchers::WithinRel;

namespace {

void check_sandwich(const BoundCertificate& cert, const RadialMeasure& m) {
  INFO("route=" << to_string(cert.route) << " a=" << cert.a << " value=" << cert.value);
  REQUIRE(cert.valid());
  CHECK(cert.value > 0);
  CHECK(cert.value <= witness_for(cert, m) * (1 + 1e-9));
}

}  // namespace

TEST_CASE("bobkov bound formula", "[bounds]") {
  CHECK(bobkov_bound(0.5, 1.0, kNegInf) == 0.0);
  CHECK_THAT(bobkov_bound(0.5, 2.0, 0.0), WithinRel(M_LN2 / 4, 1e-15));
  CHECK(bobkov_bound(0.5, 1.0, -1.0) == 0.0);
  CHECK_THROWS_AS(bobkov_bound(1.5, 1.0, 0.0), DomainError);
  CHECK_THROWS_AS(bobkov_bound(0.5, 0.0, 0.0), DomainError);
}

TEST_CASE("bobkov optimizer", "[bounds]") {
  // n = 1, alpha = 1: Is_nu(1/4) = 1/4 exactly.
  const auto e1 = normalize(1, Potential::power(1));
  const auto c = bobkov_optimize(e1, 0.25);
  check_sandwich(c, e1);
  CHECK(c.value <= 0.25);

  const auto m = normalize(10, Potential::power(2));
  for (double a : {1e-6, 0.01, 0.3}) {
    const auto cert = bobkov_optimize(m, a);
    check_sandwich(cert, m);
    // No probed radius does better than the optimizer.
    for (double r : numeric::geomspace(0.1, 10, 30))
      CHECK(bobkov_bound(a, r, m.log_cdf(r)) <= cert.value * (1 + 1e-9));
  }
  CHECK_FALSE(bobkov_optimize(m, 0.7).valid());
}

TEST_CASE("large-set radial bound", "[bounds]") {
  ConstantsLedger ledger;
  const auto m = normalize(100, Potential::power(2));
  const auto fit = klartag_fit(m, numeric::linspace(0.02, 1.0, 50));
  ledger.set("c1", fit.c1_hat, Provenance::estimated);
  ledger.set("C1", std::max(fit.C1_hat, 1 + 1e-9), Provenance::estimated);
  const double threshold = std::exp(-ledger.value("c_split") * 100);
  REQUIRE(threshold < 0.25);
  check_sandwich(prop_nu_big(m, 0.25, ledger), m);
  CHECK_FALSE(prop_nu_big(m, threshold / 2, ledger).valid());
  CHECK_FALSE(prop_nu_big(m, 0.6, ledger).valid());
}

TEST_CASE("small-set bounds", "[bounds]") {
  ConstantsLedger ledger;
  const double c = ledger.value("c_split");
  const auto m3 = normalize(20, Potential::power(3));
  const double a = std::exp(-25.0);
  REQUIRE(a <= std::exp(-c * 20));
  check_sandwich(prop_small(m3, a, c, SmallRegime::h0, ledger), m3);
  check_sandwich(prop_small(m3, a, c, SmallRegime::h2, ledger), m3);

  const auto m2 = normalize(20, Potential::power(2));
  for (double aa : {1e-20, 1e-40, 1e-100}) check_sandwich(prop_small(m2, aa, c, SmallRegime::h2, ledger), m2);
  // Above the small-set threshold the bound does not apply.
  CHECK_FALSE(prop_small(m2, 0.4, c, SmallRegime::h2, ledger).valid());
  // power(1.5) is H0 but not H2.
  const auto m15 = normalize(20, Potential::power(1.5));
  check_sandwich(prop_small(m15, a, c, SmallRegime::h0, ledger), m15);
  CHECK_FALSE(prop_small(m15, a, c, SmallRegime::h2, ledger).valid());
}

TEST_CASE("tensorization", "[bounds]") {
  ConstantsLedger ledger;
  const auto setup = prepare_theorem(50, Potential::power(2), ledger);
  REQUIRE(setup.applicable);
  REQUIRE(setup.h2_route);
  CHECK(setup.C_nu > 0);
  CHECK(setup.C_sigma > 0);
  const auto cert = tensorize(setup.C_nu, setup.C_sigma, setup.J, setup.unit_nu, 0.1, ledger);
  REQUIRE(cert.valid());
  CHECK(cert.value > 0);
  CHECK(cert.value <= upper_bound(setup.unit_nu, 0.1));
  CHECK_FALSE(tensorize(0.0, setup.C_sigma, setup.J, setup.unit_nu, 0.1, ledger).valid());
  CHECK_FALSE(tensorize(setup.C_nu, setup.C_sigma, setup.J, normalize(1, Potential::power(2)), 0.1, ledger).valid());
}

TEST_CASE("assembled bound", "[bounds]") {
  ConstantsLedger ledger;
  for (double alpha : {1.0, 1.5, 2.0, 3.0}) {
    const auto s = prepare_theorem(10, Potential::power(alpha), ledger);
    REQUIRE(s.applicable);
    const auto m = normalize(10, Potential::power(alpha));
    for (double a : {1e-30, 1e-8, 0.2, 0.5, 0.8}) {
      const auto cert = theorem_mualpha(s, a, ledger);
      INFO("alpha=" << alpha << " a=" << a);
      REQUIRE(cert.valid());
      CHECK(cert.value > 0);
      CHECK(cert.value <= upper_bound(m, a) * (1 + 1e-9));
    }
  }
  CHECK_THROWS_AS(theorem_mualpha(prepare_theorem(5, Potential::custom([](double x) { return x * x; }), ledger), 0.2, ledger),
                  DomainError);
}

TEST_CASE("routes agree near the small/large threshold", "[bounds]") {
  ConstantsLedger ledger;
  const auto s = prepare_theorem(30, Potential::power(2), ledger);
  const double t = std::exp(-ledger.value("c_split") * 30);
  const auto above = theorem_muphi(s, t * (1 + 1e-9), ledger);
  const auto below = theorem_muphi(s, t * (1 - 1e-9), ledger);
  REQUIRE(above.valid());
  REQUIRE(below.valid());
  const double ratio = above.value / below.value;
  CHECK(ratio < 10);
  CHECK(ratio > 0.1);
}

TEST_CASE("lambda homogeneity of the assembled bound", "[bounds][property]") {
  ConstantsLedger ledger;
  for (double lambda : {0.5, 3.0}) {
    const auto base = theorem_muphi(10, Potential::power(2), 0.1, ledger);
    const auto scaled = theorem_muphi(10, Potential::power(2, lambda), 0.1, ledger);
    // phi_lambda(x) = phi(lambda x): boundary measures scale by lambda.
    CHECK_THAT(scaled.value, WithinRel(lambda * base.value, 1e-9));
  }
}

TEST_CASE("dimension-free coefficient", "[bounds]") {
  const std::vector<int> ns{5, 10, 50, 100, 200};
  const std::vector<double> as{1e-6, 0.01, 0.3};
  // Isotropic power(2) is the standard Gaussian in every dimension.
  const auto g = dimension_free_check(Potential::power(2), ns, as);
  CHECK(g.hypothesis == "h2_prime");
  CHECK(g.ratio() < 1.01);
  for (const auto& r : g.rows) CHECK_THAT(r.lambda, WithinRel(1 / std::sqrt(2.0), 1e-6));
  const auto c3 = dimension_free_check(Potential::power(3), ns, as);
  CHECK(c3.hypothesis == "h2_prime");
  CHECK(c3.ratio() < 2);
  CHECK_THROWS_AS(dimension_free_check(Potential::power(2), std::span<const int>{}, as), DomainError);
}

TEST_CASE("certificate json", "[bounds]") {
  ConstantsLedger ledger;
  const auto m = normalize(5, Potential::power(2));
  const auto j = bobkov_optimize(m, 0.1).to_json();
  CHECK(j["route"] == "bobkov_direct");
  CHECK(j.contains("validity"));
  CHECK(j.contains("constants_used"));
}
