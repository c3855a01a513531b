#pragma once

// Log-space quadrature and bracketed root finding shared by every module.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <span>
#include <sstream>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "isoprof/errors.hpp"

namespace isoprof {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Settings for the adaptive quadrature behind every integral of the library.
struct QuadraturePlan {
  double rel_tol = 1e-10;
  /// Absolute floor, in natural-log units, relative to each panel's peak.
  double abs_tol_log = -60.0;
  int max_subdivisions = 2000;
};

namespace numeric {

inline double log_sum_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

/// log(1 - e^x) for x <= 0, accurate near both ends.
inline double log1m_exp(double x) {
  if (x > 0) return std::numeric_limits<double>::quiet_NaN();
  if (x == 0) return kNegInf;
  return x > -M_LN2 ? std::log(-std::expm1(x)) : std::log1p(-std::exp(x));
}

/// log(e^a - e^b) for a >= b.
inline double log_diff_exp(double a, double b) {
  if (b == kNegInf) return a;
  return a + log1m_exp(b - a);
}

/// a log(1/a) with the 0 log 0 = 0 convention.
inline double xlog1x(double a) { return a > 0 ? -a * std::log(a) : 0.0; }

inline double binary_entropy(double a) { return xlog1x(a) + xlog1x(1.0 - a); }

struct LogIntegral {
  double log_value = kNegInf;
  double rel_error = 0.0;
  int subdivisions = 0;
};

namespace detail {

struct Piece {
  double lo, hi, value, error;
  bool operator<(const Piece& other) const { return error < other.error; }
};

template <class F>
Piece kronrod(const F& f, double lo, double hi) {
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  double err = 0;
  auto mapped = [&](double t) { return f(mid + half * t); };
  const double r = boost::math::quadrature::gauss_kronrod<double, 21>::integrate(
      mapped, -1.0, 1.0, 0, 0.0, &err);
  return {lo, hi, half * r, half * err};
}

}  // namespace detail

/// log of the integral of exp(log_f) over [lo, hi].
///
/// log_f must be unimodal (log-concave integrands in practice) with its
/// maximum at `peak`. The range is cut at every element of `breaks` lying
/// inside it; each panel is shifted by its own maximum before exponentiating
/// and refined by global Gauss-Kronrod bisection. Panels are combined with
/// log-sum-exp, so tails far below the global peak keep relative accuracy.
/// `budget` counts subdivisions across calls sharing one plan.
template <class LogF>
LogIntegral log_integrate(const LogF& log_f, double lo, double hi, double peak,
                          std::span<const double> breaks, const QuadraturePlan& plan,
                          int* budget = nullptr) {
  LogIntegral out;
  if (!(hi > lo)) return out;
  std::vector<double> nodes{lo, hi};
  for (double b : breaks)
    if (b > lo && b < hi) nodes.push_back(b);
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

  int local_budget = plan.max_subdivisions;
  int& remaining = budget ? *budget : local_budget;
  const double abs_floor = std::exp(plan.abs_tol_log);
  double worst = 0.0;

  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const double a = nodes[i];
    const double b = nodes[i + 1];
    // The clamped peak is the panel maximum for unimodal integrands; the
    // endpoints and midpoint guard against an integrand vanishing there.
    double shift = kNegInf;
    for (double x : {std::clamp(peak, a, b), a, 0.5 * (a + b), b}) {
      const double v = log_f(x);
      if (!std::isnan(v)) shift = std::max(shift, v);
    }
    if (shift == kNegInf) continue;
    auto f = [&](double x) {
      const double v = log_f(x) - shift;
      return v < -745.0 ? 0.0 : std::exp(v);
    };
    std::priority_queue<detail::Piece> heap;
    heap.push(detail::kronrod(f, a, b));
    double total = heap.top().value;
    double error = heap.top().error;
    while (error > std::max(plan.rel_tol * std::abs(total), abs_floor)) {
      if (remaining <= 0) {
        std::ostringstream msg;
        msg << "quadrature did not converge on [" << a << ", " << b
            << "]: achieved relative error " << error / std::abs(total);
        throw QuadratureError(msg.str(), error / std::abs(total));
      }
      --remaining;
      ++out.subdivisions;
      const detail::Piece worst_piece = heap.top();
      heap.pop();
      const double m = 0.5 * (worst_piece.lo + worst_piece.hi);
      const auto left = detail::kronrod(f, worst_piece.lo, m);
      const auto right = detail::kronrod(f, m, worst_piece.hi);
      total += left.value + right.value - worst_piece.value;
      error += left.error + right.error - worst_piece.error;
      heap.push(left);
      heap.push(right);
    }
    if (total > 0) {
      out.log_value = log_sum_exp(out.log_value, shift + std::log(total));
      worst = std::max(worst, error / total);
    }
  }
  out.rel_error = worst;
  return out;
}

/// Root of a monotone function on a sign-changing bracket (TOMS 748).
template <class F>
double find_root(const F& f, double lo, double hi, int bits = 50, std::uintmax_t max_iter = 300) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0) return lo;
  if (fhi == 0) return hi;
  if (std::signbit(flo) == std::signbit(fhi) || std::isnan(flo) || std::isnan(fhi)) {
    std::ostringstream msg;
    msg << "root not bracketed on [" << lo << ", " << hi << "]: f(lo)=" << flo << ", f(hi)=" << fhi;
    throw RootFindingError(msg.str(), lo, hi);
  }
  std::uintmax_t iters = max_iter;
  const auto r = boost::math::tools::toms748_solve(
      f, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(bits), iters);
  return 0.5 * (r.first + r.second);
}

/// find_root for a bracket chosen from tabulated values: when rounding in
/// f moves the root just outside [lo, hi], returns the nearer endpoint.
template <class F>
double find_root_tabulated(const F& f, double lo, double hi, int bits = 50) {
  const double flo = f(lo);
  const double fhi = f(hi);
  if (std::isnan(flo) || std::isnan(fhi)) return find_root(f, lo, hi, bits);
  if (flo != 0 && fhi != 0 && std::signbit(flo) == std::signbit(fhi))
    return std::abs(flo) <= std::abs(fhi) ? lo : hi;
  return find_root(f, lo, hi, bits);
}

/// Doubles `hi` (starting from `start`) until pred(hi) holds.
template <class Pred>
double expand_until(const Pred& pred, double start, double limit = 1e300) {
  double hi = start > 0 ? start : 1.0;
  while (!pred(hi)) {
    hi *= 2.0;
    if (hi > limit) {
      std::ostringstream msg;
      msg << "bracket expansion exceeded " << limit;
      throw RootFindingError(msg.str(), start, hi);
    }
  }
  return hi;
}

/// Maximizer of a unimodal function on [lo, hi] by golden-section search.
template <class F>
std::pair<double, double> golden_max(const F& f, double lo, double hi, int iters = 60) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - g * (hi - lo);
  double x2 = lo + g * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int i = 0; i < iters; ++i) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = f(x1);
    }
  }
  return f1 > f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

/// n points from lo to hi, geometrically spaced.
inline std::vector<double> geomspace(double lo, double hi, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double step = std::log(hi / lo) / (n - 1);
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = lo * std::exp(step * i);
  out.back() = hi;
  return out;
}

inline std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  return out;
}

}  // namespace numeric
}  // namespace isoprof
