#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "isoprof/numerics.hpp"

using namespace isoprof;
using Catch::Matchers::WithinRel;
using Catch::Matchers::WithinAbs;

TEST_CASE("log-space helpers", "[numerics]") {
  using namespace numeric;
  CHECK_THAT(log_sum_exp(std::log(2.0), std::log(3.0)), WithinRel(std::log(5.0), 1e-15));
  CHECK(log_sum_exp(kNegInf, 1.5) == 1.5);
  CHECK_THAT(log_sum_exp(-1000.0, -1000.0), WithinRel(-1000.0 + M_LN2, 1e-15));
  CHECK_THAT(log1m_exp(std::log(0.25)), WithinRel(std::log(0.75), 1e-15));
  CHECK_THAT(log1m_exp(-1e-20), WithinRel(std::log(1e-20), 1e-12));
  CHECK(log1m_exp(0.0) == kNegInf);
  CHECK(std::isnan(log1m_exp(0.1)));
  CHECK_THAT(log_diff_exp(std::log(5.0), std::log(3.0)), WithinRel(std::log(2.0), 1e-14));
  CHECK(xlog1x(0.0) == 0.0);
  CHECK_THAT(binary_entropy(0.5), WithinRel(M_LN2, 1e-15));
  CHECK(binary_entropy(1.0) == 0.0);
}

TEST_CASE("log_integrate reproduces closed-form integrals", "[numerics]") {
  using namespace numeric;
  QuadraturePlan plan;
  // int_0^inf r^4 e^{-r^2} dr = 3 sqrt(pi) / 8
  auto f = [](double r) { return r > 0 ? 4 * std::log(r) - r * r : kNegInf; };
  const auto res = log_integrate(f, 0.0, 40.0, std::sqrt(2.0), std::vector<double>{1.0, 2.0, 5.0}, plan);
  CHECK_THAT(res.log_value, WithinAbs(std::log(3 * std::sqrt(M_PI) / 8), 1e-12));
  CHECK(res.rel_error <= 1e-10);

  // A peak far out in the tail: int_0^inf r^{999} e^{-r} dr = 999!
  auto g = [](double r) { return r > 0 ? 999 * std::log(r) - r : kNegInf; };
  const auto big = log_integrate(g, 0.0, 5000.0, 999.0, std::vector<double>{500.0, 999.0, 1500.0}, plan);
  CHECK_THAT(big.log_value, WithinRel(std::lgamma(1000.0), 1e-12));

  // Integrand that vanishes on the first panel.
  auto h = [](double x) { return x < 1 ? kNegInf : -x; };
  CHECK_THAT(log_integrate(h, 0.0, 60.0, 0.0, std::vector<double>{}, plan).log_value, WithinAbs(-1.0, 1e-10));
}

TEST_CASE("root finding and search utilities", "[numerics]") {
  using namespace numeric;
  CHECK_THAT(find_root([](double x) { return x * x - 2; }, 0.0, 2.0, 52), WithinRel(std::sqrt(2.0), 1e-14));
  CHECK_THROWS_AS(find_root([](double x) { return x * x + 1; }, 0.0, 2.0), RootFindingError);
  CHECK(expand_until([](double x) { return x > 100; }, 1.0) == 128.0);
  CHECK_THROWS_AS(expand_until([](double) { return false; }, 1.0, 1e10), RootFindingError);
  const auto m = golden_max([](double x) { return -(x - 0.3) * (x - 0.3); }, 0.0, 1.0, 80);
  CHECK_THAT(m.first, WithinAbs(0.3, 1e-8));

  const auto g = geomspace(1e-3, 1e3, 7);
  REQUIRE(g.size() == 7);
  CHECK(g.front() == 1e-3);
  CHECK(g.back() == 1e3);
  CHECK_THAT(g[3], WithinRel(1.0, 1e-14));
  const auto l = linspace(0.0, 1.0, 5);
  CHECK(l[2] == 0.5);
  CHECK(linspace(2.0, 3.0, 1).size() == 1);
}
