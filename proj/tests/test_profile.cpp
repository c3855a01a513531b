#include <catch_amalgamated.hpp>

#include <cmath>

#include "isoprof/profile.hpp"

using namespace isoprof;
using Catch::Matchers::WithinRel;
using Catch::Matchers::WithinAbs;

TEST_CASE("comparison profiles", "[profile]") {
  const auto p2 = Potential::power(2);
  const double a = std::exp(-4.0);
  CHECK_THAT(l_phi(p2, a), WithinRel(2 * a, 1e-12));
  CHECK_THAT(l_alpha(2.0, a), WithinRel(2 * a, 1e-12));
  CHECK_THAT(l_phi(p2, 0.5), WithinRel(std::sqrt(M_LN2) / 2, 1e-12));
  for (double x : {1e-9, 0.01, 0.3, 0.5}) CHECK_THAT(l_phi(Potential::power(1), x), WithinRel(x, 1e-12));
  CHECK(l_phi(p2, 0.0) == 0.0);
  CHECK(l_phi(p2, 1.0) == 0.0);
  CHECK_THAT(l_phi(p2, 0.8), WithinRel(l_phi(p2, 0.2), 1e-14));
  CHECK_THROWS_AS(l_phi(p2, 1.5), DomainError);
}

TEST_CASE("one-dimensional isoperimetric profile closed forms", "[profile]") {
  const auto I1 = ProfileFn::i_phi(Potential::power(1));
  for (double a : numeric::linspace(0.0, 1.0, 50)) CHECK_THAT(I1(a), WithinAbs(std::min(a, 1 - a), 1e-8));
  CHECK_THAT(I1(1e-12), WithinRel(1e-12, 1e-8));
  const auto I2 = ProfileFn::i_phi(Potential::power(2));
  CHECK_THAT(I2(0.5), WithinRel(1 / std::sqrt(M_PI), 1e-12));
  CHECK_THAT(I2(0.3), WithinAbs(I2(0.7), 1e-10));
  // power(2) is N(0, 1/2): I(a) = sqrt(2) gaussian_profile(a).
  for (double a : {1e-10, 1e-4, 0.05, 0.3}) CHECK_THAT(I2(a), WithinRel(std::sqrt(2.0) * gaussian_profile(a), 1e-9));
  // lambda-homogeneity: I_{phi_lambda} = lambda I_phi.
  const auto I2s = ProfileFn::i_phi(Potential::power(2, 3.0));
  CHECK_THAT(I2s(0.2), WithinRel(3 * I2(0.2), 1e-10));
}

TEST_CASE("gaussian profile", "[profile]") {
  CHECK_THAT(gaussian_profile(0.5), WithinRel(1 / std::sqrt(2 * M_PI), 1e-14));
  const double a = 0.5 * std::erfc(1 / std::sqrt(2.0));
  CHECK_THAT(gaussian_profile(a), WithinRel(std::exp(-0.5) / std::sqrt(2 * M_PI), 1e-12));
  CHECK_THAT(normal_quantile(a), WithinAbs(-1.0, 1e-12));
  for (double u : {1e-300, 1e-20, 1e-5, 0.02425, 0.3, 0.97575, 1 - 1e-10}) {
    const double z = normal_quantile(u);
    CHECK_THAT(0.5 * std::erfc(-z / std::sqrt(2.0)), WithinRel(u, 1e-10));
  }
  CHECK_THAT(gaussian_profile(0.1), WithinAbs(gaussian_profile(0.9), 1e-15));
  CHECK(gaussian_profile(0.0) == 0.0);
}

TEST_CASE("profile shape: concave, symmetric, zero at the endpoints", "[profile][property]") {
  for (double alpha : {1.0, 1.2, 1.5, 2.0, 3.0}) {
    const auto r = check_profile_shape(ProfileFn::i_phi(Potential::power(alpha)), 200);
    INFO("alpha=" << alpha);
    CHECK(r.ok());
  }
  CHECK(check_profile_shape(ProfileFn::gaussian(), 200).ok());
  CHECK(check_profile_shape(ProfileFn::cheeger_linear(), 200).ok());
  CHECK(check_profile_shape(ProfileFn::l_phi(Potential::power(2)), 200).symmetric);
}

TEST_CASE("equivalence constants", "[profile]") {
  const auto e1 = estimate_d1_d2(Potential::power(1));
  CHECK_THAT(e1.d1_hat, WithinRel(1.0, 1e-8));
  CHECK_THAT(e1.d2_hat, WithinRel(1.0, 1e-8));
  CHECK(e1.conforming);
  const auto e2 = estimate_d1_d2(Potential::power(2));
  CHECK(e2.d1_hat >= 0.5);
  CHECK(e2.d2_hat <= 3.0);
  // Frozen from the first run of the estimator on 2^-1..2^-40.
  CHECK_THAT(e2.d1_hat, WithinRel(0.518249, 1e-5));
  CHECK_THAT(e2.d2_hat, WithinRel(0.737832, 1e-5));
  for (double alpha : {1.2, 1.5, 3.0}) {
    const auto e = estimate_d1_d2(Potential::power(alpha));
    CHECK(e.d1_hat > 0);
    CHECK(e.d1_hat <= e.d2_hat);
    CHECK(std::isfinite(e.d2_hat));
  }
  CHECK_FALSE(estimate_d1_d2(Potential::power(3)).conforming);
  // Scale invariance: estimates do not depend on lambda.
  CHECK_THAT(estimate_d1_d2(Potential::power(1.5, 4.0)).d1_hat,
             WithinRel(estimate_d1_d2(Potential::power(1.5)).d1_hat, 1e-8));
}
