#pragma once

// One-dimensional isoperimetric profiles: the exact profile I_phi of
// mu_{1,phi} ∝ exp(-phi(|x|)), the comparison shapes L_phi, L_alpha, the
// Gaussian isoperimetric function and the linear Cheeger profile.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "isoprof/errors.hpp"
#include "isoprof/numerics.hpp"
#include "isoprof/potential.hpp"
#include "isoprof/radial.hpp"

namespace isoprof {

namespace detail {

inline double check_probability(double a) {
  if (!(a >= 0 && a <= 1)) throw DomainError("profile argument must lie in [0, 1]");
  return std::min(a, 1.0 - a);
}

}  // namespace detail

/// Standard normal quantile: Acklam's rational approximation followed by a
/// Newton step on the exact CDF.
inline double normal_quantile(double u) {
  if (!(u > 0 && u < 1)) throw DomainError("normal quantile needs u in (0, 1)");
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double lo = 0.02425;
  const double p = std::min(u, 1.0 - u);
  double z;
  if (p < lo) {
    const double q = std::sqrt(-2 * std::log(p));
    z = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  } else {
    const double q = p - 0.5;
    const double r = q * q;
    z = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
  }
  // z <= 0 approximates the p-quantile; refine against the lower tail.
  const double e = 0.5 * std::erfc(-z / M_SQRT2) - p;
  const double density = std::exp(-0.5 * z * z) / std::sqrt(2 * M_PI);
  z -= e / density;
  return u <= 0.5 ? z : -z;
}

inline double normal_density(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2 * M_PI); }

/// The Gaussian isoperimetric function phi_gauss(Phi^{-1}(a)).
inline double gaussian_profile(double a) {
  const double m = detail::check_probability(a);
  if (m == 0) return 0.0;
  return normal_density(normal_quantile(m));
}

/// L_phi(a) = a log(1/a) / phi^{-1}(log 1/a), with a replaced by min(a, 1-a).
inline double l_phi(const Potential& p, double a) {
  const double m = detail::check_probability(a);
  if (m == 0) return 0.0;
  const double l = -std::log(m);
  return m * l / p.inverse(l);
}

/// L_alpha(a) = a (log 1/a)^{1 - 1/alpha}, symmetrized.
inline double l_alpha(double alpha, double a) {
  if (!(alpha >= 1)) throw DomainError("L_alpha needs alpha >= 1");
  const double m = detail::check_probability(a);
  if (m == 0) return 0.0;
  return m * std::pow(-std::log(m), 1.0 - 1.0 / alpha);
}

enum class ProfileKind { i_phi, l_phi, l_alpha, gaussian, cheeger_linear };

inline const char* to_string(ProfileKind k) {
  switch (k) {
    case ProfileKind::i_phi: return "iphi";
    case ProfileKind::l_phi: return "lphi";
    case ProfileKind::l_alpha: return "lalpha";
    case ProfileKind::gaussian: return "gauss";
    case ProfileKind::cheeger_linear: return "cheeger";
  }
  return "?";
}

/// An evaluatable profile J: [0, 1] -> R+. For I_phi the one-sided law of
/// |x| under mu_{1,phi} is built once, so evaluation is a tail inversion.
class ProfileFn {
 public:
  static ProfileFn i_phi(const Potential& p, const QuadraturePlan& plan = {}) {
    ProfileFn f(ProfileKind::i_phi);
    f.potential_ = p;
    f.half_line_.emplace(RadialMeasure::normalize(1, p, plan));
    return f;
  }
  static ProfileFn l_phi(const Potential& p) {
    ProfileFn f(ProfileKind::l_phi);
    f.potential_ = p;
    return f;
  }
  static ProfileFn l_alpha(double alpha) {
    if (!(alpha >= 1)) throw DomainError("L_alpha needs alpha >= 1");
    ProfileFn f(ProfileKind::l_alpha);
    f.alpha_ = alpha;
    return f;
  }
  static ProfileFn gaussian() { return ProfileFn(ProfileKind::gaussian); }
  static ProfileFn cheeger_linear() { return ProfileFn(ProfileKind::cheeger_linear); }

  ProfileKind kind() const noexcept { return kind_; }

  /// log Z_phi with Z_phi = 2 * integral of e^{-phi} over [0, inf); I_phi only.
  double log_normalization() const {
    if (!half_line_) throw DomainError("normalization is defined for I_phi only");
    return M_LN2 + half_line_->log_z_rad();
  }

  /// Point x >= 0 with G_phi(x) = min(a, 1-a); I_phi only.
  double abscissa(double a) const {
    if (!half_line_) throw DomainError("abscissa is defined for I_phi only");
    const double m = detail::check_probability(a);
    if (m == 0) return std::numeric_limits<double>::infinity();
    return half_line_->quantile_log_tail(std::log(2 * m));
  }

  double operator()(double a) const {
    const double m = detail::check_probability(a);
    if (m == 0) return 0.0;
    switch (kind_) {
      case ProfileKind::i_phi: {
        const double x = abscissa(m);
        return std::exp(-potential_->eval(x) - log_normalization());
      }
      case ProfileKind::l_phi: return isoprof::l_phi(*potential_, m);
      case ProfileKind::l_alpha: return isoprof::l_alpha(alpha_, m);
      case ProfileKind::gaussian: return gaussian_profile(m);
      case ProfileKind::cheeger_linear: return m;
    }
    return 0.0;
  }

  std::string describe() const {
    std::string s = to_string(kind_);
    if (potential_) s += "[" + potential_->describe() + "]";
    if (kind_ == ProfileKind::l_alpha) s += "[alpha=" + std::to_string(alpha_) + "]";
    return s;
  }

 private:
  explicit ProfileFn(ProfileKind k) : kind_(k) {}

  ProfileKind kind_;
  std::optional<Potential> potential_;
  std::optional<RadialMeasure> half_line_;
  double alpha_ = 2.0;
};

/// I_phi(a) for a one-off evaluation.
inline double i_phi(const Potential& p, double a) { return ProfileFn::i_phi(p)(a); }

// ---------------------------------------------------------------------------
// Shape properties
// ---------------------------------------------------------------------------

struct ProfileShapeReport {
  double endpoint_max = 0;       // max(|J(0)|, |J(1)|)
  double symmetry_max = 0;       // max |J(a) - J(1-a)|
  double concavity_worst = 0;    // min of J(mid) - (J(lo)+J(hi))/2 over adjacent triples
  double min_interior = 0;       // min J(a), a in (0,1)
  bool endpoints_ok = false;
  bool symmetric = false;
  bool concave = false;
  bool positive = false;
  bool ok() const { return endpoints_ok && symmetric && concave && positive; }
};

/// Checks J(0)=J(1)=0, symmetry, midpoint concavity and positivity on a
/// uniform grid of `points` interior abscissae.
inline ProfileShapeReport check_profile_shape(const ProfileFn& J, int points, double sym_tol = 1e-10,
                                              double concave_tol = 1e-9) {
  ProfileShapeReport r;
  r.endpoint_max = std::max(std::abs(J(0.0)), std::abs(J(1.0)));
  const auto grid = numeric::linspace(0.0, 1.0, points + 2);
  std::vector<double> vals;
  for (double a : grid) vals.push_back(J(a));
  r.min_interior = std::numeric_limits<double>::infinity();
  r.concavity_worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
    r.min_interior = std::min(r.min_interior, vals[i]);
    r.symmetry_max = std::max(r.symmetry_max, std::abs(vals[i] - J(1.0 - grid[i])));
    r.concavity_worst = std::min(r.concavity_worst, vals[i] - 0.5 * (vals[i - 1] + vals[i + 1]));
  }
  r.endpoints_ok = r.endpoint_max == 0.0;
  r.symmetric = r.symmetry_max <= sym_tol;
  r.concave = r.concavity_worst >= -concave_tol;
  r.positive = r.min_interior > 0;
  return r;
}

// ---------------------------------------------------------------------------
// Equivalence constants between L_phi and I_phi
// ---------------------------------------------------------------------------

/// {2^-1, 2^-2, ..., 2^-40}.
inline std::vector<double> default_equivalence_grid() {
  std::vector<double> g;
  for (int k = 1; k <= 40; ++k) g.push_back(std::ldexp(1.0, -k));
  return g;
}

struct EquivalenceEstimate {
  double d1_hat = 0;  // min of L_phi / I_phi on the grid
  double d2_hat = 0;  // max of L_phi / I_phi on the grid
  bool conforming = false;  // potential passed the sqrt-concavity check
  double lambda_used = 1;   // scaling that gives phi(1) = 1
  std::vector<double> grid;
  std::vector<double> ratios;
};

/// Bracketing constants d1 I_phi <= L_phi <= d2 I_phi over `a_grid`, after
/// rescaling phi so that phi(1) = 1 (both profiles scale by lambda).
inline EquivalenceEstimate estimate_d1_d2(const Potential& p,
                                          std::span<const double> a_grid = {},
                                          const QuadraturePlan& plan = {}) {
  EquivalenceEstimate est;
  const auto report = check_hypotheses(p, 64, 4 * std::max(1.0, p.inverse(64.0)));
  est.conforming = report.h1_prime.holds();
  const Potential unit = p.unit_normalized();
  est.lambda_used = unit.lambda();
  est.grid = a_grid.empty() ? default_equivalence_grid()
                            : std::vector<double>(a_grid.begin(), a_grid.end());
  const auto I = ProfileFn::i_phi(unit, plan);
  est.d1_hat = std::numeric_limits<double>::infinity();
  est.d2_hat = 0;
  for (double a : est.grid) {
    if (!(a > 0 && a <= 0.5)) throw DomainError("equivalence grid must lie in (0, 1/2]");
    const double ratio = l_phi(unit, a) / I(a);
    est.ratios.push_back(ratio);
    est.d1_hat = std::min(est.d1_hat, ratio);
    est.d2_hat = std::max(est.d2_hat, ratio);
  }
  return est;
}

}  // namespace isoprof
