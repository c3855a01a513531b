#include <catch_amalgamated.hpp>

#include <cmath>

#include "isoprof/profile.hpp"
#include "isoprof/witness.hpp"

using namespace isoprof;
using Catch::Matchers::WithinRel;
using Catch::Matchers::WithinAbs;

TEST_CASE("ball witness closed forms", "[witness]") {
  // n = 1, power(1): tail(r) = e^{-r} = 1 - a, perimeter e^{-r} = 1 - a.
  const auto e1 = normalize(1, Potential::power(1));
  for (double a : {0.1, 0.5, 0.9}) {
    const auto w = ball_witness(e1, a);
    CHECK(w.family == WitnessFamily::ball);
    CHECK_THAT(w.perimeter, WithinRel(1 - a, 1e-9));
    CHECK_THAT(w.parameter, WithinRel(-std::log1p(-a), 1e-9));
  }
  // n = 2, power(2): cdf 1 - e^{-r^2}, perimeter 2 r e^{-r^2} = 2 r (1 - a).
  const auto g2 = normalize(2, Potential::power(2));
  for (double a : {1e-6, 0.25, 0.75}) {
    const double r = std::sqrt(-std::log1p(-a));
    CHECK_THAT(ball_witness(g2, a).perimeter, WithinRel(2 * r * (1 - a), 1e-9));
  }
  CHECK_THROWS_AS(ball_witness(g2, 0.0), DomainError);
  CHECK_THROWS_AS(ball_witness(g2, 1.0), DomainError);
}

TEST_CASE("half-space witness matches the Gaussian factorization", "[witness]") {
  // power(2): each coordinate is N(0, 1/2), so the half-space of mass a has
  // perimeter sqrt(2) * gaussian_profile(a) in every dimension.
  for (int n : {1, 2, 3, 5, 10, 50, 200}) {
    const auto m = normalize(n, Potential::power(2));
    for (double a : {1e-12, 1e-6, 0.01, 0.25, 0.5, 0.8}) {
      INFO("n=" << n << " a=" << a);
      CHECK_THAT(halfspace_witness(m, a).perimeter, WithinRel(std::sqrt(2.0) * gaussian_profile(a), 1e-9));
    }
  }
}

TEST_CASE("half-space witness in one dimension is I_phi", "[witness]") {
  const auto w = halfspace_witness(1, Potential::power(1), 0.25);
  CHECK_THAT(w.parameter, WithinRel(-M_LN2, 1e-9));
  CHECK_THAT(w.perimeter, WithinRel(0.25, 1e-9));
  for (double alpha : {1.0, 1.5, 2.0, 3.0}) {
    const auto p = Potential::power(alpha);
    const auto I = ProfileFn::i_phi(p);
    for (double a : {1e-8, 0.01, 0.2, 0.5}) CHECK_THAT(upper_bound(1, p, a), WithinAbs(I(a), 1e-8));
  }
  CHECK(std::abs(halfspace_witness(4, Potential::power(1.5), 0.5).parameter) < 1e-12);
}

TEST_CASE("witness symmetry", "[witness][property]") {
  for (double alpha : {1.0, 1.5, 3.0}) {
    const auto m = normalize(6, Potential::power(alpha));
    for (double a : {0.01, 0.2, 0.4}) {
      CHECK_THAT(halfspace_witness(m, a).perimeter, WithinAbs(halfspace_witness(m, 1 - a).perimeter, 1e-8));
      CHECK(upper_bound(m, a) <= ball_witness(m, a).perimeter);
      CHECK(radial_upper_bound(m, a) <= ball_witness(m, a).perimeter);
    }
  }
}

TEST_CASE("sphere cap profile", "[witness]") {
  for (double a : {0.01, 0.3, 0.5}) CHECK_THAT(sphere_profile(3, a), WithinRel(std::sqrt(a * (1 - a)), 1e-12));
  CHECK_THAT(sphere_profile(2, 0.2), WithinRel(1 / M_PI, 1e-14));
  CHECK(sphere_profile(5, 0.0) == 0.0);
  CHECK_THAT(sphere_profile(7, 0.3), WithinRel(sphere_profile(7, 0.7), 1e-12));
  // High dimension: sigma_{n-1} approaches the Gaussian profile scaled by sqrt(n).
  CHECK_THAT(sphere_profile(10000, 0.2) / std::sqrt(10000.0), WithinRel(gaussian_profile(0.2), 2e-3));
  CHECK_THROWS_AS(sphere_profile(1, 0.3), DomainError);
}

TEST_CASE("sampler", "[witness]") {
  const auto m = normalize(3, Potential::power(2));
  const auto a = sample(m, 1000, 42);
  const auto b = sample(m, 1000, 42);
  CHECK(a.coords == b.coords);
  CHECK(sample(m, 10, 43).coords != sample(m, 10, 42).coords);
  CHECK(a.dim == 3);
  CHECK(a.size() == 1000);

  const std::size_t count = 100000;
  const auto s = sample(m, count, 7);
  double sum = 0, sum2 = 0;
  const double r03 = m.quantile(0.3);
  std::size_t inside = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    double r2 = 0;
    for (double x : s.point(i)) r2 += x * x;
    sum += r2;
    sum2 += r2 * r2;
    inside += std::sqrt(r2) <= r03;
  }
  const double mean = sum / count;
  const double se = std::sqrt((sum2 / count - mean * mean) / count);
  CHECK(std::abs(mean - 1.5) <= 5 * se);
  const double frac = static_cast<double>(inside) / count;
  CHECK(std::abs(frac - 0.3) <= 5 * std::sqrt(0.3 * 0.7 / count));
  CHECK_THROWS_AS(sample(m, 0, 1), DomainError);
}
