#pragma once

// Achievable boundary measures: centered balls and half-spaces give upper
// bounds on the isoperimetric profile of mu_{n,phi}. Also the exact cap
// profile of the uniform measure on the sphere and a sampler for mu_{n,phi}.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <boost/math/special_functions/beta.hpp>

#include "isoprof/errors.hpp"
#include "isoprof/numerics.hpp"
#include "isoprof/potential.hpp"
#include "isoprof/radial.hpp"

namespace isoprof {

enum class WitnessFamily { halfspace, ball };

inline const char* to_string(WitnessFamily f) {
  return f == WitnessFamily::ball ? "ball" : "halfspace";
}

struct WitnessResult {
  double a = 0;
  WitnessFamily family = WitnessFamily::ball;
  double parameter = 0;  // radius r, or threshold t of {x_1 <= t}
  double perimeter = 0;
};

namespace detail {

inline void check_open_probability(double a) {
  if (!(a > 0 && a < 1)) throw DomainError("witness needs a in (0, 1)");
}

// log(|S^{n-2}| / |S^{n-1}|): density of theta_1 at 0 for uniform theta.
inline double log_sphere_slice(int n) {
  return std::lgamma(0.5 * n) - std::lgamma(0.5 * (n - 1)) - 0.5 * std::log(M_PI);
}

}  // namespace detail

/// Centered ball {|x| <= r} of mu-mass a; its boundary measure is the radial
/// density at r.
inline WitnessResult ball_witness(const RadialMeasure& m, double a) {
  detail::check_open_probability(a);
  const double r = m.quantile(a);
  return {a, WitnessFamily::ball, r, r > 0 ? std::exp(m.log_density(r)) : 0.0};
}

/// One-dimensional marginal of mu_{n,phi} along a coordinate axis.
class HalfspaceMarginal {
 public:
  explicit HalfspaceMarginal(const RadialMeasure& m) : m_(&m) {}

  /// log of the marginal density at t.
  double log_density(double t) const {
    t = std::abs(t);
    const int n = m_->n();
    const Potential& phi = m_->potential();
    if (n == 1) return -phi(t) - M_LN2 - m_->log_z_rad();
    const double peak = slice_peak(t);
    auto log_f = [&](double s) {
      if (s < 0) return kNegInf;
      const double rho = std::hypot(t, s);
      if (n == 2) return -phi(rho);
      if (s == 0) return kNegInf;
      return (n - 2) * std::log(s) - phi(rho);
    };
    const double ref = log_f(std::max(peak, 1e-300));
    double step = std::max({peak, m_->inv_n(), 1e-12});
    double hi = peak + step;
    while (log_f(hi) > ref + m_->plan().abs_tol_log - 40.0) {
      step *= 2;
      hi = peak + step;
      if (!std::isfinite(hi)) throw NumericError("marginal integrand does not decay");
    }
    std::vector<double> breaks = numeric::linspace(0.0, hi, 9);
    for (double f : {0.125, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0, 4.0}) breaks.push_back(f * peak);
    const auto res = numeric::log_integrate(log_f, 0.0, hi, peak, breaks, m_->plan());
    return res.log_value + detail::log_sphere_slice(n) - m_->log_z_rad();
  }

  /// log P(X_1 > t) for t >= 0, as a mixture over the radius of the
  /// one-dimensional projection tail of the uniform sphere measure.
  double log_upper_tail(double t) const {
    if (t < 0) throw DomainError("marginal upper tail needs t >= 0");
    const int n = m_->n();
    if (n == 1) return m_->log_tail(t) - M_LN2;
    if (t == 0) return -M_LN2;
    const double p = 0.5 * (n - 1);
    auto log_f = [&](double r) {
      if (!(r > t)) return kNegInf;
      const double x = (r - t) * (r + t) / (r * r);
      const double b = 0.5 * boost::math::ibeta(p, 0.5, x);
      return b > 0 ? m_->log_unnormalized(r) + std::log(b) : kNegInf;
    };
    // Mass beyond max(r_max, 2t) is below e^{-60} of the radial tail table
    // and is dropped.
    const double hi = std::max(m_->r_max(), 2 * t);
    std::vector<double> breaks = numeric::linspace(t, hi, 9);
    for (double f : {1.001, 1.01, 1.1, 1.5, 2.0}) breaks.push_back(f * t);
    const double r0 = m_->mode();
    for (double f : {0.5, 0.75, 1.0, 1.25, 1.5, 2.0}) breaks.push_back(f * r0);
    const double peak = std::max(r0, 1.5 * t);
    const auto res = numeric::log_integrate(log_f, t, hi, peak, breaks, m_->plan());
    return res.log_value - m_->log_z_rad();
  }

  /// t >= 0 with P(X_1 > t) = exp(log_a), log_a < log(1/2).
  double upper_quantile(double log_a) const {
    if (!(log_a < -M_LN2)) return 0.0;
    auto f = [&](double t) { return log_upper_tail(t) - log_a; };
    double hi = std::max(m_->mode(), m_->potential().inverse(1.0));
    while (f(hi) > 0) hi *= 2;
    return numeric::find_root(f, 0.0, hi, 48);
  }

 private:
  // Maximizer in s of s^{n-2} exp(-phi(sqrt(t^2 + s^2))).
  double slice_peak(double t) const {
    const int n = m_->n();
    if (n <= 2) return 0.0;
    const Potential& phi = m_->potential();
    auto g = [&](double s) {
      const double rho = std::hypot(t, s);
      return s * s * phi.deriv(rho) / rho - (n - 2);
    };
    const double hi = numeric::expand_until([&](double s) { return g(s) >= 0; },
                                            std::max(m_->mode(), 1e-6));
    double lo = hi * 1e-6;
    while (g(lo) >= 0) lo *= 1e-3;
    return numeric::find_root(g, lo, hi, 48);
  }

  const RadialMeasure* m_;
};

/// Half-space {x_1 <= t} of mu-mass a.
inline WitnessResult halfspace_witness(const RadialMeasure& m, double a) {
  detail::check_open_probability(a);
  const HalfspaceMarginal marginal(m);
  const double small = std::min(a, 1.0 - a);
  const double t = marginal.upper_quantile(std::log(small));
  const double parameter = a < 0.5 ? -t : t;
  return {a, WitnessFamily::halfspace, parameter, std::exp(marginal.log_density(t))};
}

inline WitnessResult halfspace_witness(int n, const Potential& p, double a,
                                       const QuadraturePlan& plan = {}) {
  return halfspace_witness(RadialMeasure::normalize(n, p, plan), a);
}

/// min over centered balls and half-spaces of mu-mass a; dominates Is_mu(a).
inline double upper_bound(const RadialMeasure& m, double a) {
  return std::min(ball_witness(m, a).perimeter, halfspace_witness(m, a).perimeter);
}

inline double upper_bound(int n, const Potential& p, double a, const QuadraturePlan& plan = {}) {
  return upper_bound(RadialMeasure::normalize(n, p, plan), a);
}

/// Isoperimetric profile of the radial law itself. nu is log-concave on the
/// half-line, so the better of [0, r] and [r, inf) of mass a is extremal.
inline double radial_upper_bound(const RadialMeasure& m, double a) {
  detail::check_open_probability(a);
  auto perimeter_at = [&](double r) { return r > 0 ? std::exp(m.log_density(r)) : 0.0; };
  const double lower = perimeter_at(m.quantile_log_cdf(std::log(a)));
  const double upper = perimeter_at(m.quantile_log_tail(std::log(a)));
  return std::min(lower, upper);
}

/// Exact isoperimetric profile of the uniform probability on S^{n-1}
/// (spherical caps are extremal), n >= 2.
inline double sphere_profile(int n, double a) {
  if (n < 2) throw DomainError("sphere profile needs n >= 2");
  if (!(a >= 0 && a <= 1)) throw DomainError("sphere profile needs a in [0, 1]");
  const double m = std::min(a, 1.0 - a);
  if (m == 0) return 0.0;
  const double log_cn = detail::log_sphere_slice(n);
  if (n == 2) return std::exp(log_cn);
  const double sin2 = boost::math::ibeta_inv(0.5 * (n - 1), 0.5, 2 * m);
  return std::exp(log_cn + 0.5 * (n - 2) * std::log(sin2));
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

struct SampleSet {
  int dim = 0;
  std::vector<double> coords;  // row-major, dim values per point

  std::size_t size() const { return dim ? coords.size() / static_cast<std::size_t>(dim) : 0; }
  std::span<const double> point(std::size_t i) const {
    return {coords.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
};

/// Draws X = r theta with r ~ nu (inverse CDF) and theta uniform on the
/// sphere (normalized Gaussian vector). Deterministic in `seed`.
inline SampleSet sample(const RadialMeasure& m, std::size_t count, std::uint64_t seed) {
  if (count < 1) throw DomainError("sample count must be >= 1");
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform;
  const int n = m.n();
  SampleSet out;
  out.dim = n;
  out.coords.reserve(count * static_cast<std::size_t>(n));
  std::vector<double> v(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < count; ++i) {
    double norm2 = 0;
    while (norm2 == 0) {
      norm2 = 0;
      for (double& x : v) {
        x = normal(gen);
        norm2 += x * x;
      }
    }
    double u = 0;
    while (u == 0) u = uniform(gen);
    const double r = m.quantile(u) / std::sqrt(norm2);
    for (double x : v) out.coords.push_back(r * x);
  }
  return out;
}

}  // namespace isoprof
