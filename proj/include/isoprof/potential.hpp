#pragma once

// Convex radial potentials phi and the hypothesis classes they fall into.

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "isoprof/errors.hpp"
#include "isoprof/numerics.hpp"

namespace isoprof {

/// A convex non-decreasing phi: R+ -> R+ with phi(0) = 0, evaluated as
/// phi_lambda(x) = phi_base(lambda * x). Immutable; cheap to copy.
class Potential {
 public:
  using Fn = std::function<double(double)>;

  static Potential power(double alpha, double lambda = 1.0) {
    if (!(alpha >= 1.0)) throw DomainError("power potential needs alpha >= 1");
    check_lambda(lambda);
    Potential p;
    p.alpha_ = alpha;
    p.lambda_ = lambda;
    return p;
  }

  /// A user-supplied phi_base. Missing derivatives fall back to central
  /// finite differences.
  static Potential custom(Fn eval, Fn deriv = {}, Fn deriv2 = {}, double lambda = 1.0,
                          std::string name = "custom") {
    if (!eval) throw DomainError("custom potential needs an evaluation function");
    check_lambda(lambda);
    Potential p;
    p.custom_ = std::make_shared<const Custom>(
        Custom{std::move(eval), std::move(deriv), std::move(deriv2), std::move(name)});
    p.lambda_ = lambda;
    return p;
  }

  Potential with_lambda(double lambda) const {
    check_lambda(lambda);
    Potential p = *this;
    p.lambda_ = lambda;
    return p;
  }

  /// The same base function rescaled so that phi(1) = 1.
  Potential unit_normalized() const { return with_lambda(lambda_ * inverse(1.0)); }

  bool is_power() const noexcept { return custom_ == nullptr; }
  /// Exponent of a power potential; NaN for custom kinds.
  double alpha() const noexcept {
    return is_power() ? alpha_ : std::numeric_limits<double>::quiet_NaN();
  }
  double lambda() const noexcept { return lambda_; }

  std::string describe() const {
    std::ostringstream s;
    s.precision(17);
    if (is_power())
      s << "power(alpha=" << alpha_ << ", lambda=" << lambda_ << ")";
    else
      s << custom_->name << "(lambda=" << lambda_ << ")";
    return s.str();
  }

  double operator()(double x) const { return eval(x); }

  double eval(double x) const {
    if (!(x >= 0)) throw DomainError("potential evaluated at negative x");
    if (is_power()) return x == 0 ? 0.0 : std::pow(lambda_ * x, alpha_);
    return custom_->eval(lambda_ * x);
  }

  /// log phi(x) for x > 0, without forming phi(x) for power kinds.
  double log_eval(double x) const {
    if (!(x > 0)) throw DomainError("log_eval needs x > 0");
    if (is_power()) return alpha_ * std::log(lambda_ * x);
    return std::log(custom_->eval(lambda_ * x));
  }

  double deriv(double x) const {
    if (!(x > 0)) throw DomainError("derivative needs x > 0");
    if (is_power()) return alpha_ * lambda_ * std::pow(lambda_ * x, alpha_ - 1.0);
    const double u = lambda_ * x;
    if (custom_->deriv) return lambda_ * custom_->deriv(u);
    double h = std::max(1.0, u) * std::cbrt(std::numeric_limits<double>::epsilon());
    if (u - h < 0) {
      // One-sided second-order stencil near the origin.
      h = std::min(h, u);
      const double f0 = custom_->eval(u);
      return lambda_ * (-3.0 * f0 + 4.0 * custom_->eval(u + h) - custom_->eval(u + 2 * h)) /
             (2 * h);
    }
    return lambda_ * (custom_->eval(u + h) - custom_->eval(u - h)) / (2 * h);
  }

  double deriv2(double x) const {
    if (!(x > 0)) throw DomainError("second derivative needs x > 0");
    if (is_power()) {
      if (alpha_ == 1.0) return 0.0;
      return alpha_ * (alpha_ - 1.0) * lambda_ * lambda_ * std::pow(lambda_ * x, alpha_ - 2.0);
    }
    const double u = lambda_ * x;
    if (custom_->deriv2) return lambda_ * lambda_ * custom_->deriv2(u);
    double h = std::max(1.0, u) * std::pow(std::numeric_limits<double>::epsilon(), 0.25);
    h = std::min(h, u);
    return lambda_ * lambda_ *
           (custom_->eval(u + h) - 2 * custom_->eval(u) + custom_->eval(u - h)) / (h * h);
  }

  /// phi^{-1}(y). Round-off negatives in [-1e-9, 0) clamp to 0.
  double inverse(double y) const {
    if (y < 0) {
      if (y >= -1e-9) return 0.0;
      throw DomainError("inverse of a potential needs y >= 0");
    }
    if (y == 0) return 0.0;
    if (is_power()) return std::pow(y, 1.0 / alpha_) / lambda_;
    constexpr double kLimit = 1e300;
    double hi = 1.0;
    while (custom_->eval(hi) < y) {
      hi *= 2.0;
      if (hi > kLimit) throw UnboundedInverseError("potential looks bounded: no x with phi(x) >= y");
    }
    const double u = numeric::find_root([&](double v) { return custom_->eval(v) - y; }, 0.0, hi, 60);
    return u / lambda_;
  }

 private:
  struct Custom {
    Fn eval;
    Fn deriv;
    Fn deriv2;
    std::string name;
  };

  static void check_lambda(double lambda) {
    if (!(lambda > 0) || !std::isfinite(lambda)) throw DomainError("lambda must be positive");
  }

  Potential() = default;

  double alpha_ = 1.0;
  double lambda_ = 1.0;
  std::shared_ptr<const Custom> custom_;
};

// ---------------------------------------------------------------------------
// Hypothesis classes
// ---------------------------------------------------------------------------

enum class Verdict { holds, fails, undetermined };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::fails: return "fails";
    case Verdict::undetermined: return "undetermined";
  }
  return "?";
}

struct HypothesisVerdict {
  Verdict verdict = Verdict::undetermined;
  double witness_x = std::numeric_limits<double>::quiet_NaN();

  bool holds() const noexcept { return verdict == Verdict::holds; }
  static HypothesisVerdict pass() { return {Verdict::holds}; }
  static HypothesisVerdict fail(double x) { return {Verdict::fails, x}; }
};

/// Grid-based verdicts for H0 (convex, non-decreasing, phi(0)=0), H1/H2
/// (sqrt(phi)/x non-increasing / non-decreasing), H1' (sqrt(phi) concave)
/// and H2' (H2 plus phi/x^alpha non-increasing for some alpha >= 2).
struct HypothesisReport {
  HypothesisVerdict h0, h1, h1_prime, h2, h2_prime;
  std::vector<double> grid;
  double rel_tol = 1e-9;
  std::optional<double> alpha_h2prime;
};

namespace detail {

inline bool below(double a, double b, double tol) {
  return a <= b + tol * std::max({std::abs(a), std::abs(b), 1e-300});
}

// First index i where seq[i+1] > seq[i] beyond tolerance, or npos.
inline std::size_t first_increase(const std::vector<double>& seq, double tol) {
  for (std::size_t i = 0; i + 1 < seq.size(); ++i)
    if (!below(seq[i + 1], seq[i], tol)) return i + 1;
  return std::string::npos;
}

inline std::size_t first_decrease(const std::vector<double>& seq, double tol) {
  for (std::size_t i = 0; i + 1 < seq.size(); ++i)
    if (!below(seq[i], seq[i + 1], tol)) return i + 1;
  return std::string::npos;
}

// Slopes of f between consecutive points of {0} U grid.
inline std::vector<double> chord_slopes(const std::vector<double>& xs, const std::vector<double>& fs,
                                        double f0) {
  std::vector<double> s;
  s.reserve(xs.size());
  double px = 0.0;
  double pf = f0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    s.push_back((fs[i] - pf) / (xs[i] - px));
    px = xs[i];
    pf = fs[i];
  }
  return s;
}

}  // namespace detail

inline HypothesisReport check_hypotheses(const Potential& p, int grid_size, double x_max,
                                         double rel_tol = 1e-9, double x_min_ratio = 1e-4) {
  if (grid_size < 16) throw DomainError("hypothesis grid needs at least 16 points");
  if (!(x_max > 0)) throw DomainError("hypothesis grid needs x_max > 0");
  HypothesisReport rep;
  rep.rel_tol = rel_tol;
  rep.grid = numeric::geomspace(x_max * x_min_ratio, x_max, grid_size);
  const auto& xs = rep.grid;
  const std::size_t npos = std::string::npos;

  std::vector<double> phi, root, ratio;
  bool finite = true;
  for (double x : xs) {
    const double v = p.eval(x);
    finite = finite && std::isfinite(v) && v >= 0;
    phi.push_back(v);
    root.push_back(std::sqrt(std::max(v, 0.0)));
    ratio.push_back(root.back() / x);
  }
  const double phi0 = p.eval(0.0);
  if (!finite || !std::isfinite(phi0) || std::all_of(phi.begin(), phi.end(), [](double v) { return v == 0; }))
    return rep;  // everything undetermined

  // H0
  if (std::abs(phi0) > 1e-12) {
    rep.h0 = HypothesisVerdict::fail(0.0);
  } else if (auto i = detail::first_decrease(phi, rel_tol); i != npos) {
    rep.h0 = HypothesisVerdict::fail(xs[i]);
  } else if (auto j = detail::first_decrease(detail::chord_slopes(xs, phi, phi0), rel_tol); j != npos) {
    rep.h0 = HypothesisVerdict::fail(xs[j]);
  } else {
    rep.h0 = HypothesisVerdict::pass();
  }
  if (!rep.h0.holds()) {
    rep.h1 = rep.h1_prime = rep.h2 = rep.h2_prime = rep.h0;
    return rep;
  }

  if (auto i = detail::first_increase(ratio, rel_tol); i != npos)
    rep.h1 = HypothesisVerdict::fail(xs[i]);
  else
    rep.h1 = HypothesisVerdict::pass();

  if (auto i = detail::first_decrease(ratio, rel_tol); i != npos)
    rep.h2 = HypothesisVerdict::fail(xs[i]);
  else
    rep.h2 = HypothesisVerdict::pass();

  if (auto i = detail::first_increase(detail::chord_slopes(xs, root, 0.0), rel_tol); i != npos)
    rep.h1_prime = HypothesisVerdict::fail(xs[i]);
  else
    rep.h1_prime = HypothesisVerdict::pass();

  if (!rep.h2.holds()) {
    rep.h2_prime = rep.h2;
    return rep;
  }
  double last_witness = xs.front();
  for (int k = 0; k <= 12; ++k) {
    const double a = 2.0 + 0.5 * k;
    std::vector<double> scaled;
    for (std::size_t i = 0; i < xs.size(); ++i)
      scaled.push_back(p.is_power() ? std::exp(p.log_eval(xs[i]) - a * std::log(xs[i]))
                                    : phi[i] / std::pow(xs[i], a));
    const auto i = detail::first_increase(scaled, rel_tol);
    if (i == npos) {
      rep.alpha_h2prime = a;
      break;
    }
    last_witness = xs[i];
  }
  rep.h2_prime = rep.alpha_h2prime ? HypothesisVerdict::pass() : HypothesisVerdict::fail(last_witness);
  return rep;
}

// ---------------------------------------------------------------------------
// Elementary inequalities satisfied by each hypothesis class
// ---------------------------------------------------------------------------

struct InequalityCheck {
  std::string hypothesis;  // "H0", "H1" or "H2"
  std::string statement;
  double lhs = 0;  // claimed lhs <= rhs
  double rhs = 0;
  double slack = 0;  // (rhs - lhs) / max(1, |lhs|, |rhs|)
  bool pass = false;
};

struct Lemma21Result {
  double t = 1;
  double x = 1;
  std::vector<InequalityCheck> checks;

  bool all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
  }
  double min_slack() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& c : checks) m = std::min(m, c.slack);
    return m;
  }
};

/// Evaluates the scaling inequalities of each class the report says holds,
/// at one (t, x). The inverse inequalities are taken at y = phi(x).
inline Lemma21Result lemma21_check(const Potential& p, double t, double x,
                                   const HypothesisReport& report, double tol = 1e-9) {
  if (!(t >= 1)) throw DomainError("scaling check needs t >= 1");
  if (!(x > 0)) throw DomainError("scaling check needs x > 0");
  Lemma21Result out{t, x, {}};
  const double fx = p.eval(x);
  const double ftx = p.eval(t * x);
  const double y = fx;
  const double inv_y = p.inverse(y);
  const double inv_ty = p.inverse(t * y);
  const double xd = x * p.deriv(x);
  const double d = p.deriv(x);
  const double dtx = p.deriv(t * x);

  auto add = [&](const char* h, const char* what, double lhs, double rhs) {
    const double slack = (rhs - lhs) / std::max({1.0, std::abs(lhs), std::abs(rhs)});
    out.checks.push_back({h, what, lhs, rhs, slack, slack >= -tol});
  };

  if (report.h0.holds()) {
    add("H0", "t*phi(x) <= phi(t*x)", t * fx, ftx);
    add("H0", "phi^-1(t*y) <= t*phi^-1(y)", inv_ty, t * inv_y);
    add("H0", "phi(x) <= x*phi'(x)", fx, xd);
  }
  if (report.h1.holds()) {
    add("H1", "t*phi(x) <= phi(t*x)", t * fx, ftx);
    add("H1", "phi(t*x) <= t^2*phi(x)", ftx, t * t * fx);
    add("H1", "sqrt(t)*phi^-1(y) <= phi^-1(t*y)", std::sqrt(t) * inv_y, inv_ty);
    add("H1", "phi^-1(t*y) <= t*phi^-1(y)", inv_ty, t * inv_y);
    add("H1", "phi(x) <= x*phi'(x)", fx, xd);
    add("H1", "x*phi'(x) <= 2*phi(x)", xd, 2 * fx);
    add("H1", "phi'(t*x) <= 2*t*phi'(x)", dtx, 2 * t * d);
  }
  if (report.h2.holds()) {
    add("H2", "t^2*phi(x) <= phi(t*x)", t * t * fx, ftx);
    add("H2", "phi^-1(t*y) <= sqrt(t)*phi^-1(y)", inv_ty, std::sqrt(t) * inv_y);
    add("H2", "2*phi(x) <= x*phi'(x)", 2 * fx, xd);
  }
  return out;
}

/// Convenience overload: classifies p on a grid covering t*x first.
inline Lemma21Result lemma21_check(const Potential& p, double t, double x) {
  const auto rep = check_hypotheses(p, 64, std::max(10.0, 4 * t * x));
  return lemma21_check(p, t, x, rep);
}

}  // namespace isoprof
