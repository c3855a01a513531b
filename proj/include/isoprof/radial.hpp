#pragma once

// The radial law nu_{n,phi}(dr) ∝ r^{n-1} exp(-phi(r)) dr on [0, inf):
// normalization, distribution functions, mode, moments, tail bounds,
// isotropic rescaling and the concentration-around-the-mode fit.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <sstream>
#include <vector>

#include "isoprof/errors.hpp"
#include "isoprof/numerics.hpp"
#include "isoprof/potential.hpp"

namespace isoprof {

class RadialMeasure {
 public:
  /// Truncation radius r_max sits where log F_{n,phi} drops below this.
  static constexpr double kTruncationLog = -60.0;
  static constexpr int kTablePanels = 256;

  /// Builds nu_{n,phi} and its cumulative tables; the normalizer is
  /// log of the integral of r^{n-1} e^{-phi(r)} over [0, inf), without the
  /// sphere-area factor.
  static RadialMeasure normalize(int n, Potential potential, QuadraturePlan plan = {}) {
    if (n < 1) throw DomainError("dimension n must be >= 1");
    if (!(plan.rel_tol > 0)) throw DomainError("quadrature rel_tol must be positive");
    RadialMeasure m(n, std::move(potential), plan);
    m.build();
    return m;
  }

  int n() const noexcept { return n_; }
  const Potential& potential() const noexcept { return phi_; }
  const QuadraturePlan& plan() const noexcept { return plan_; }
  double log_z_rad() const noexcept { return log_z_; }
  double r_max() const noexcept { return r_max_; }
  /// phi^{-1}(n) and phi^{-1}(2n), used all over the bounds.
  double inv_n() const noexcept { return inv_n_; }
  double inv_2n() const noexcept { return inv_2n_; }

  /// Panel boundaries of the cumulative tables, from 0 to r_max.
  const std::vector<double>& nodes() const noexcept { return nodes_; }

  /// Maximizer of the radial density: r phi'(r) = n - 1, or 0 when n = 1.
  double mode() const noexcept { return mode_; }

  /// (n-1) log r - phi(r), the unnormalized log density.
  double log_unnormalized(double r) const { return log_weight(r, 0); }

  double log_density(double r) const {
    if (!(r > 0)) throw DomainError("radial density needs r > 0");
    return log_unnormalized(r) - log_z_;
  }

  double log_cdf(double r) const {
    if (r <= 0) return kNegInf;
    if (r >= r_max_) return numeric::log1m_exp(std::min(0.0, log_tail(r)));
    const std::size_t i = panel_of(r);
    const double part = integrate(nodes_[i], r);
    return std::min(0.0, numeric::log_sum_exp(log_lower_[i], part) - log_z_);
  }

  double log_tail(double r) const {
    if (r <= 0) return 0.0;
    if (r >= r_max_) return std::min(0.0, far_tail(r) - log_z_);
    const std::size_t i = panel_of(r);
    const double part = integrate(r, nodes_[i + 1]);
    return std::min(0.0, numeric::log_sum_exp(part, log_upper_[i + 1]) - log_z_);
  }

  double cdf(double r) const {
    if (r < 0) throw DomainError("cdf needs r >= 0");
    return std::exp(log_cdf(r));
  }
  double tail(double r) const {
    if (r < 0) throw DomainError("tail needs r >= 0");
    return std::exp(log_tail(r));
  }

  /// log nu([max(0, c - rho), c + rho]).
  double log_ball_mass(double center, double radius) const {
    const double lo = std::max(0.0, center - radius);
    const double hi = center + radius;
    const double ll = log_cdf(lo);
    const double lt = log_tail(hi);
    const double out = numeric::log_sum_exp(ll, lt);
    if (out < -M_LN2) return std::log1p(-std::exp(out));
    return numeric::log_diff_exp(log_cdf(hi), ll);
  }

  /// r with log cdf(r) = target (target < 0).
  double quantile_log_cdf(double target) const {
    if (!(target < 0)) throw DomainError("quantile target must be a log-probability below 0");
    const auto it = std::upper_bound(log_lower_.begin(), log_lower_.end(), target + log_z_);
    const std::size_t i = static_cast<std::size_t>(it - log_lower_.begin());
    if (i == 0) return 0.0;
    if (i < nodes_.size()) {
      const double lo = nodes_[i - 1];
      const double base = log_lower_[i - 1];
      auto f = [&](double r) { return numeric::log_sum_exp(base, integrate(lo, r)) - log_z_ - target; };
      double bracket_lo = lo;
      if (base == kNegInf) {
        // First panel: the mass vanishes like r^n at 0, so halve towards 0
        // until the bracket has a finite negative end.
        bracket_lo = nodes_[i];
        for (int k = 0; k < 4000 && !(f(bracket_lo) < 0); ++k) bracket_lo *= 0.5;
        if (!(f(bracket_lo) < 0)) return 0.0;
      }
      return numeric::find_root_tabulated(f, bracket_lo, nodes_[i]);
    }
    return quantile_log_tail(numeric::log1m_exp(target));
  }

  /// r with log tail(r) = target (target <= 0); 0 for target >= 0.
  double quantile_log_tail(double target) const {
    if (target >= 0) return 0.0;
    const double t = target + log_z_;
    // log_upper_ is non-increasing along the nodes.
    const auto it = std::lower_bound(log_upper_.begin(), log_upper_.end(), t, std::greater<>());
    const std::size_t i = static_cast<std::size_t>(it - log_upper_.begin());
    if (i == 0) return 0.0;
    if (i < nodes_.size()) {
      const double hi = nodes_[i];
      const double base = log_upper_[i];
      return numeric::find_root_tabulated(
          [&](double r) { return numeric::log_sum_exp(integrate(r, hi), base) - t; },
          nodes_[i - 1], hi);
    }
    const double hi = numeric::expand_until([&](double r) { return far_tail(r) < t; }, 2 * r_max_);
    return numeric::find_root([&](double r) { return far_tail(r) - t; }, r_max_, hi);
  }

  double quantile(double u) const {
    if (!(u > 0 && u < 1)) throw DomainError("quantile needs u in (0, 1)");
    return u <= 0.5 ? quantile_log_cdf(std::log(u)) : quantile_log_tail(std::log1p(-u));
  }

  /// log F_{n,phi}(r) = n (1 + log r - log phi^{-1}(n)) - phi(r), any r > 0.
  double log_tail_bound_formula(double r) const {
    if (!(r > 0)) throw DomainError("tail bound needs r > 0");
    return n_ * (1.0 + std::log(r) - std::log(inv_n_)) - phi_(r);
  }

  /// F_{n,phi}(r), an upper bound on tail(r) valid for r >= phi^{-1}(2n).
  double tail_bound(double r) const {
    if (r < inv_2n_ * (1 - 1e-12)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "tail bound needs r >= phi^-1(2n) = " << inv_2n_ << ", got r = " << r;
      throw PreconditionError(msg.str());
    }
    return std::exp(std::min(0.0, log_tail_bound_formula(r)));
  }

  /// log E[r^k].
  double log_moment(int k) const {
    if (k < 1) throw DomainError("moment order must be >= 1");
    const double peak = weight_peak(k);
    const double hi = cutoff_beyond(std::max(r_max_, peak), k);
    int budget = plan_.max_subdivisions;
    auto breaks = nodes_;
    breaks.push_back(peak);
    const auto res = numeric::log_integrate([&](double r) { return log_weight(r, k); }, 0.0, hi, peak,
                                            breaks, plan_, &budget);
    return res.log_value - log_z_;
  }

  double moment(int k) const { return std::exp(log_moment(k)); }

 private:
  RadialMeasure(int n, Potential p, QuadraturePlan plan)
      : n_(n), phi_(std::move(p)), plan_(plan) {}

  // (n-1+k) log r - phi(r)
  double log_weight(double r, int k) const {
    if (r < 0) return kNegInf;
    const int power = n_ - 1 + k;
    if (r == 0) return power == 0 ? -phi_(0.0) : kNegInf;
    return (power == 0 ? 0.0 : power * std::log(r)) - phi_(r);
  }

  // Maximizer of r^{n-1+k} e^{-phi(r)}.
  double weight_peak(int k) const {
    const double target = n_ - 1 + k;
    if (target <= 0) return 0.0;
    const double hi = numeric::expand_until(
        [&](double r) { return r * phi_.deriv(r) >= target; }, phi_.inverse(target + 1));
    double lo = hi * 1e-12;
    while (lo * phi_.deriv(lo) >= target) lo *= 1e-3;
    return numeric::find_root([&](double r) { return r * phi_.deriv(r) - target; }, lo, hi, 52);
  }

  // Point beyond `from` where the k-weighted integrand fell by e^{40} below
  // the quadrature floor, relative to its value at `from` (from at or past
  // the peak).
  double cutoff_beyond(double from, int k) const {
    const double ref = log_weight(from, k);
    double step = std::max({from, inv_n_, 1e-300});
    double r = from + step;
    while (log_weight(r, k) > ref + plan_.abs_tol_log - 40.0) {
      step *= 2;
      r = from + step;
      if (!std::isfinite(r)) throw NumericError("integrand does not decay: cannot truncate");
    }
    return r;
  }

  double integrate(double lo, double hi) const {
    if (!(hi > lo)) return kNegInf;
    return numeric::log_integrate([&](double r) { return log_unnormalized(r); }, lo, hi, mode_,
                                  std::span<const double>{}, plan_)
        .log_value;
  }

  // log of the integral over [r, inf) for r >= r_max, integrated directly so
  // that relative accuracy survives far below the bulk.
  double far_tail(double r) const {
    const double hi = cutoff_beyond(r, 0);
    std::vector<double> breaks;
    for (int j = 1; j < 16; ++j) breaks.push_back(r + (hi - r) * std::pow(2.0, j - 16));
    return numeric::log_integrate([&](double x) { return log_unnormalized(x); }, r, hi, r, breaks,
                                  plan_)
        .log_value;
  }

  std::size_t panel_of(double r) const {
    const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), r);
    return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(it - nodes_.begin() - 1, 0,
                                                               static_cast<std::ptrdiff_t>(nodes_.size()) - 2));
  }

  void build() {
    inv_n_ = phi_.inverse(n_);
    inv_2n_ = phi_.inverse(2.0 * n_);
    mode_ = n_ == 1 ? 0.0 : weight_peak(0);

    // Smallest r >= phi^{-1}(n) with log F below the truncation level; log F
    // is non-increasing there.
    const double level = kTruncationLog;
    auto g = [&](double r) { return log_tail_bound_formula(r) - level; };
    const double hi = numeric::expand_until([&](double r) { return g(r) < 0; }, 2 * inv_n_);
    r_max_ = std::max(inv_2n_, numeric::find_root(g, inv_n_, hi, 40));

    double width;
    if (n_ >= 2)
      width = 1.0 / std::sqrt((n_ - 1) / (mode_ * mode_) + phi_.deriv2(mode_));
    else
      width = phi_.inverse(1.0);
    std::vector<double> breaks = numeric::linspace(0.0, r_max_, kTablePanels + 1);
    for (double s : {0.5, 1.0, 2.0}) breaks.push_back(s * mode_);
    breaks.push_back(inv_n_);
    breaks.push_back(inv_2n_);
    for (double k : {1.0, 2.0, 4.0, 8.0, 16.0}) {
      breaks.push_back(mode_ - k * width);
      breaks.push_back(mode_ + k * width);
    }
    std::erase_if(breaks, [&](double b) { return !(b >= 0 && b <= r_max_); });
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end(),
                             [&](double a, double b) { return b - a <= 1e-12 * r_max_; }),
                 breaks.end());
    breaks.back() = r_max_;
    nodes_ = breaks;

    int budget = plan_.max_subdivisions;
    std::vector<double> panel(nodes_.size() - 1);
    for (std::size_t i = 0; i + 1 < nodes_.size(); ++i)
      panel[i] = numeric::log_integrate([&](double r) { return log_unnormalized(r); }, nodes_[i],
                                        nodes_[i + 1], mode_, std::span<const double>{}, plan_, &budget)
                     .log_value;
    log_lower_.assign(nodes_.size(), kNegInf);
    for (std::size_t i = 0; i + 1 < nodes_.size(); ++i)
      log_lower_[i + 1] = numeric::log_sum_exp(log_lower_[i], panel[i]);
    log_upper_.assign(nodes_.size(), kNegInf);
    log_upper_.back() = far_tail(r_max_);
    for (std::size_t i = nodes_.size() - 1; i-- > 0;)
      log_upper_[i] = numeric::log_sum_exp(log_upper_[i + 1], panel[i]);
    log_z_ = log_upper_.front();
    // Align the lower table with the complete normalizer.
    log_lower_.push_back(log_z_);
  }

  int n_;
  Potential phi_;
  QuadraturePlan plan_;
  double log_z_ = 0;
  double r_max_ = 0;
  double mode_ = 0;
  double inv_n_ = 0;
  double inv_2n_ = 0;
  std::vector<double> nodes_;
  std::vector<double> log_lower_;  // log integral over [0, node_i]; one extra entry = log Z
  std::vector<double> log_upper_;  // log integral over [node_i, inf)
};

inline RadialMeasure normalize(int n, const Potential& p, const QuadraturePlan& plan = {}) {
  return RadialMeasure::normalize(n, p, plan);
}

/// The scaling lambda* of p's base function making mu_{n, phi_lambda}
/// isotropic, i.e. E|X|^2 = n. Root finding on log lambda, started from the
/// exact scaling relation E_lambda|X|^2 = E_1|X|^2 / lambda^2.
inline double isotropic_lambda(int n, const Potential& p, const QuadraturePlan& plan = {}) {
  if (n < 1) throw DomainError("dimension n must be >= 1");
  auto f = [&](double log_lambda) {
    const auto m = RadialMeasure::normalize(n, p.with_lambda(std::exp(log_lambda)), plan);
    return m.log_moment(2) - std::log(static_cast<double>(n));
  };
  const double l0 = std::log(p.lambda()) + 0.5 * (RadialMeasure::normalize(n, p, plan).log_moment(2) -
                                                  std::log(static_cast<double>(n)));
  double lo = l0 - 0.25;
  double hi = l0 + 0.25;
  while (f(lo) < 0) lo -= 1.0;
  while (f(hi) > 0) hi += 1.0;
  return std::exp(numeric::find_root(f, lo, hi, 52));
}

/// Concentration-around-the-mode envelope p(delta) <= C1 exp(-c1 n delta^2).
struct TailFit {
  double c1_hat = 0;
  double C1_hat = 1;
  std::vector<double> deltas;
  std::vector<double> log_p;
  /// log C1 - c1 n delta^2 - log p(delta); non-negative on the fit grid.
  std::vector<double> residuals;
  /// Off-grid delta where the fitted rate binds, or 0 if it binds on the grid.
  double refined_delta = 0;
  int n = 0;

  double bound(double delta) const { return C1_hat * std::exp(-c1_hat * n * delta * delta); }
};

/// nu{|r - r0| >= delta r0}, computed by quadrature.
inline double mass_outside_mode_window(const RadialMeasure& m, double delta) {
  const double r0 = m.mode();
  const double lo = r0 * (1 - delta);
  const double hi = r0 * (1 + delta);
  return std::exp(numeric::log_sum_exp(m.log_cdf(std::max(lo, 0.0)), m.log_tail(hi)));
}

/// Fits the tightest c1 for C1 pinned at max(1 + 1e-9, max p), over the
/// grid `deltas` and the interval around its binding point.
inline TailFit klartag_fit(const RadialMeasure& m, std::span<const double> deltas) {
  if (m.n() < 2) throw DomainError("concentration fit needs n >= 2");
  if (deltas.empty()) throw DomainError("concentration fit needs a delta grid");
  TailFit fit;
  fit.n = m.n();
  fit.deltas.assign(deltas.begin(), deltas.end());
  double max_p = 0;
  bool any = false;
  for (double d : deltas) {
    if (!(d > 0 && d <= 1)) throw DomainError("delta grid must lie in (0, 1]");
    const double p = mass_outside_mode_window(m, d);
    fit.log_p.push_back(std::log(p));
    max_p = std::max(max_p, p);
    any = any || p > 0;
  }
  if (!any) throw FitError("degenerate concentration fit: all masses vanish numerically");
  fit.C1_hat = std::max(1.0 + 1e-9, max_p);
  const double log_c = std::log(fit.C1_hat);
  auto rate = [&](double d, double log_p) { return -(log_p - log_c) / (fit.n * d * d); };
  double c1 = std::numeric_limits<double>::infinity();
  std::size_t arg = 0;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (fit.log_p[i] == kNegInf) continue;
    const double r = rate(deltas[i], fit.log_p[i]);
    if (r < c1) {
      c1 = r;
      arg = i;
    }
  }
  // The binding rate can dip between grid points; minimize it over the
  // neighbouring interval as well.
  std::vector<double> sorted(deltas.begin(), deltas.end());
  std::sort(sorted.begin(), sorted.end());
  const auto pos = std::lower_bound(sorted.begin(), sorted.end(), deltas[arg]) - sorted.begin();
  const double lo = pos > 0 ? sorted[static_cast<std::size_t>(pos) - 1] : deltas[arg];
  const double hi = static_cast<std::size_t>(pos) + 1 < sorted.size() ? sorted[static_cast<std::size_t>(pos) + 1]
                                                                      : deltas[arg];
  if (hi > lo) {
    const auto best = numeric::golden_max(
        [&](double d) { return -rate(d, std::log(mass_outside_mode_window(m, d))); }, lo, hi, 50);
    if (-best.second < c1) {
      c1 = -best.second;
      fit.refined_delta = best.first;
    }
  }
  fit.c1_hat = c1;
  for (std::size_t i = 0; i < deltas.size(); ++i)
    fit.residuals.push_back(log_c - c1 * fit.n * deltas[i] * deltas[i] - fit.log_p[i]);
  return fit;
}

}  // namespace isoprof
