#pragma once

// Lower bounds on the isoperimetric profiles of nu_{n,phi} and mu_{n,phi}.
// Each bound comes back as a certificate listing the constants it used and
// the preconditions it checked; a failed precondition zeroes the value.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "isoprof/errors.hpp"
#include "isoprof/ledger.hpp"
#include "isoprof/numerics.hpp"
#include "isoprof/potential.hpp"
#include "isoprof/profile.hpp"
#include "isoprof/radial.hpp"
#include "isoprof/witness.hpp"

namespace isoprof {

enum class Route {
  bobkov_direct,
  prop_nu_big,
  prop_small_h0,
  prop_small_h2,
  tensorized,
  theorem_muphi,
  theorem_mualpha
};

inline const char* to_string(Route r) {
  switch (r) {
    case Route::bobkov_direct: return "bobkov_direct";
    case Route::prop_nu_big: return "prop_nu_big";
    case Route::prop_small_h0: return "prop_small_h0";
    case Route::prop_small_h2: return "prop_small_h2";
    case Route::tensorized: return "tensorized";
    case Route::theorem_muphi: return "theorem_muphi";
    case Route::theorem_mualpha: return "theorem_mualpha";
  }
  return "?";
}

/// Which measure a certificate bounds: the radial law, the full measure, or both.
enum class Target { nu, mu, both };

inline const char* to_string(Target t) {
  switch (t) {
    case Target::nu: return "nu";
    case Target::mu: return "mu";
    case Target::both: return "both";
  }
  return "?";
}

struct ConstantUse {
  std::string name;
  double value = 0;
  Provenance provenance = Provenance::derived;
};

struct BoundCertificate {
  double a = 0;
  double value = 0;
  Route route = Route::bobkov_direct;
  Target target = Target::nu;
  std::vector<ConstantUse> constants_used;
  std::vector<ValidityCheck> validity;

  bool valid() const { return all_pass(validity); }

  void use(std::string name, double v, Provenance p) { constants_used.push_back({std::move(name), v, p}); }
  void use(const ConstantsLedger& ledger, const std::string& name) {
    const auto& e = ledger.entry(name);
    use(name, e.value, e.provenance);
  }
  void check(ValidityCheck c) { validity.push_back(std::move(c)); }

  /// Zeroes the value when a precondition failed; keeps it non-negative.
  BoundCertificate& finalize() {
    if (!valid() || !(value > 0)) value = 0;
    return *this;
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["a"] = a;
    j["value"] = value;
    j["route"] = to_string(route);
    j["target"] = to_string(target);
    j["constants_used"] = nlohmann::ordered_json::array();
    for (const auto& c : constants_used)
      j["constants_used"].push_back({{"name", c.name}, {"value", c.value}, {"provenance", to_string(c.provenance)}});
    j["validity"] = nlohmann::ordered_json::array();
    for (const auto& v : validity)
      j["validity"].push_back({{"condition", v.condition}, {"pass", v.pass}, {"slack", v.slack}});
    return j;
  }
};

namespace detail {

inline bool in_half_range(double a) { return a > 0 && a <= 0.5; }

inline ValidityCheck half_range_check(double a) {
  return ValidityCheck::flag("0 < a <= 1/2", in_half_range(a));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Bobkov's inequality for log-concave measures
// ---------------------------------------------------------------------------

/// max(0, [a log(1/a) + (1-a) log(1/(1-a)) + log_ball] / (2r)).
inline double bobkov_bound(double a, double r, double log_ball) {
  if (!(a >= 0 && a <= 1)) throw DomainError("bobkov bound needs a in [0, 1]");
  if (!(r > 0)) throw DomainError("bobkov bound needs r > 0");
  const double bracket = numeric::binary_entropy(a) + log_ball;
  return bracket > 0 ? bracket / (2 * r) : 0.0;
}

/// Best Bobkov bound over balls centered at 0 (and at the mode, for nu):
/// 40 log-spaced radii in [max(r0/n, phi^-1(1)/1000), 4 phi^-1(2n)] followed
/// by a golden-section refinement around the best radius.
inline BoundCertificate bobkov_optimize(const RadialMeasure& m, double a, Target target = Target::nu) {
  BoundCertificate cert;
  cert.a = a;
  cert.route = Route::bobkov_direct;
  cert.target = target;
  cert.check(detail::half_range_check(a));
  if (!detail::in_half_range(a)) return cert.finalize();

  const double r0 = m.mode();
  std::vector<double> centers{0.0};
  if (target == Target::nu && r0 > 0) centers.push_back(r0);
  const double lo = std::max(r0 / m.n(), 1e-3 * m.potential().inverse(1.0));
  const double hi = std::max(4 * m.inv_2n(), 2 * lo);
  const auto grid = numeric::geomspace(lo, hi, 40);

  double best = 0, best_r = hi, best_center = 0, best_log_ball = kNegInf;
  for (double x0 : centers) {
    auto log_ball = [&](double r) { return x0 == 0 ? m.log_cdf(r) : m.log_ball_mass(x0, r); };
    auto objective = [&](double log_r) {
      const double r = std::exp(log_r);
      return bobkov_bound(a, r, log_ball(r));
    };
    std::size_t arg = 0;
    double local = -1;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double v = objective(std::log(grid[i]));
      if (v > local) {
        local = v;
        arg = i;
      }
    }
    if (local > 0) {
      const double l = std::log(grid[arg > 0 ? arg - 1 : 0]);
      const double h = std::log(grid[std::min(arg + 1, grid.size() - 1)]);
      const auto refined = numeric::golden_max(objective, l, h, 40);
      double r = grid[arg];
      if (refined.second > local) {
        local = refined.second;
        r = std::exp(refined.first);
      }
      if (local > best) {
        best = local;
        best_r = r;
        best_center = x0;
        best_log_ball = log_ball(r);
      }
    }
  }
  cert.value = best;
  cert.use("r", best_r, Provenance::derived);
  cert.use("center", best_center, Provenance::derived);
  cert.use("log_ball", best_log_ball, Provenance::derived);
  return cert.finalize();
}

// ---------------------------------------------------------------------------
// Radial bounds for large and small sets
// ---------------------------------------------------------------------------

/// Large sets, a in [e^{-cn}, 1/2]: Bobkov's inequality on the window
/// |r - r0| <= delta r0 with delta^2 = K log(1/a)/(c1 n). Bound on Is_nu.
inline BoundCertificate prop_nu_big(const RadialMeasure& m, double a, const ConstantsLedger& ledger) {
  BoundCertificate cert;
  cert.a = a;
  cert.route = Route::prop_nu_big;
  cert.target = Target::nu;
  const int n = m.n();
  const double c1 = ledger.value("c1");
  const double C1 = ledger.value("C1");
  const double K = ledger.value("K_big");
  const double c = ledger.value("c_split");
  for (const char* name : {"c1", "C1", "K_big", "c_split", "C_big"}) cert.use(ledger, name);

  const double threshold = std::exp(-c * n);
  cert.check(ValidityCheck::at_most("e^{-cn} < 1/2", threshold, 0.5 * (1 - 1e-15)));
  cert.check(ValidityCheck::at_most("e^{-cn} <= a", threshold, a));
  cert.check(detail::half_range_check(a));
  if (!cert.valid()) return cert.finalize();

  const double log_inv_a = -std::log(a);
  const double delta = std::sqrt(K * log_inv_a / (c1 * n));
  cert.use("delta", delta, Provenance::derived);
  cert.check(ValidityCheck::at_most("delta <= 1", delta, 1.0));
  // The concentration envelope at the window actually used.
  const double outside = mass_outside_mode_window(m, std::min(delta, 1.0));
  cert.check(ValidityCheck::at_most("nu{|r-r0| >= delta r0} <= C1 a^K", outside, C1 * std::pow(a, K)));
  cert.check(ValidityCheck::at_most("r0 <= phi^-1(n)", m.mode(), m.inv_n()));
  cert.value = 0.5 * std::sqrt(c1 * n / K) / m.inv_n() * a * std::sqrt(log_inv_a);
  return cert.finalize();
}

/// Small sets, a <= min(e^{-cn}, 1/2): Bobkov's inequality on a centered ball
/// whose mass is controlled by the tail bound F_{n,phi}. Bounds both nu and mu.
inline BoundCertificate prop_small(const RadialMeasure& m, double a, double c, SmallRegime regime,
                                   const ConstantsLedger& ledger,
                                   const HypothesisReport* report = nullptr) {
  BoundCertificate cert;
  cert.a = a;
  cert.route = regime == SmallRegime::h0 ? Route::prop_small_h0 : Route::prop_small_h2;
  cert.target = Target::both;
  const int n = m.n();
  const Potential& phi = m.potential();
  (void)ledger;

  std::optional<HypothesisReport> own;
  if (!report) {
    own = check_hypotheses(phi, 64, 4 * std::max({1.0, m.r_max(), phi.inverse(64.0)}));
    report = &*own;
  }
  if (regime == SmallRegime::h0)
    cert.check(ValidityCheck::flag("phi satisfies H0", report->h0.holds()));
  else
    cert.check(ValidityCheck::flag("phi satisfies H2", report->h2.holds()));
  cert.check(ValidityCheck::flag("c > 0", c > 0));
  cert.check(ValidityCheck::flag("0 < a", a > 0));
  if (!cert.valid()) return cert.finalize();
  cert.check(ValidityCheck::at_most("a <= min(e^{-cn}, 1/2)", a, std::min(std::exp(-c * n), 0.5)));
  if (!cert.valid()) return cert.finalize();

  const auto sel = select_K_small(c, regime);
  const double K = sel.K;
  cert.use("c", c, Provenance::derived);
  cert.use("K", K, Provenance::derived);
  for (const auto& k : sel.constraints) cert.check(k);
  cert.check(ValidityCheck::flag("K - 1 violates a K constraint", sel.minimal));

  const double L = -std::log(a);
  double r;
  if (regime == SmallRegime::h0) {
    r = phi.inverse(K * L);
    cert.check(ValidityCheck::at_most("r <= K phi^-1(log 1/a)", r, K * phi.inverse(L) * (1 + 1e-12)));
    cert.value = a * L / (2 * K * phi.inverse(L));
  } else {
    r = std::sqrt(K * L / n) * m.inv_n();
    cert.value = a * std::sqrt(L) * std::sqrt(static_cast<double>(n)) / (2 * std::sqrt(K) * m.inv_n());
  }
  cert.use("r", r, Provenance::derived);
  cert.check(ValidityCheck::at_most("r >= phi^-1(2n)", m.inv_2n() * (1 - 1e-12), r));
  if (r >= m.inv_2n() * (1 - 1e-12))
    cert.check(ValidityCheck::at_most("F(r) <= a/2", m.tail_bound(std::max(r, m.inv_2n())), a / 2));
  return cert.finalize();
}

// ---------------------------------------------------------------------------
// Tensorization
// ---------------------------------------------------------------------------

/// Is_mu(a) >= kappa2 min(C_nu, C_sigma/(max(kappa,1) r2)) J(a) given
/// Is_nu >= C_nu J and Is_sigma >= C_sigma J, with cut-off radii
/// r1 = phi^{-1}(c1' n) and r2 = r1 + 1/(C_nu J(1/2)).
inline BoundCertificate tensorize(double C_nu, double C_sigma, const ProfileFn& J,
                                  const RadialMeasure& nu, double a, const ConstantsLedger& ledger) {
  BoundCertificate cert;
  cert.a = a;
  cert.route = Route::tensorized;
  cert.target = Target::mu;
  for (const char* name : {"kappa", "kappa1", "kappa2", "c_split", "c1_cutoff"}) cert.use(ledger, name);
  cert.use("C_nu", C_nu, Provenance::estimated);
  cert.use("C_sigma", C_sigma, Provenance::estimated);
  const int n = nu.n();
  cert.check(ValidityCheck::flag("n >= 2", n >= 2));
  cert.check(ValidityCheck::flag("C_nu > 0", C_nu > 0));
  cert.check(ValidityCheck::flag("C_sigma > 0", C_sigma > 0));
  cert.check(detail::half_range_check(a));
  if (!cert.valid()) return cert.finalize();

  const double kappa = ledger.value("kappa");
  const double kappa1 = ledger.value("kappa1");
  const double kappa2 = ledger.value("kappa2");
  const double c1p = ledger.value("c1_cutoff");
  const double r1 = nu.potential().inverse(c1p * n);
  const double j_half = J(0.5);
  const double gap = 1.0 / (C_nu * j_half);
  double r2 = r1 + gap;
  while (r2 - r1 < gap) r2 = std::nextafter(r2, HUGE_VAL);
  cert.use("r1", r1, Provenance::derived);
  cert.use("r2", r2, Provenance::derived);
  cert.check(ValidityCheck::at_most("r2 - r1 >= 1/(C_nu J(1/2))", gap, r2 - r1));
  cert.check(ValidityCheck::at_most("r1 >= phi^-1(2n)", nu.inv_2n() * (1 - 1e-12), r1));
  if (!cert.valid()) return cert.finalize();
  cert.check(ValidityCheck::at_most("kappa1 F(r1) <= a", kappa1 * nu.tail_bound(std::max(r1, nu.inv_2n())), a));
  cert.value = kappa2 * std::min(C_nu, C_sigma / (std::max(kappa, 1.0) * r2)) * J(a);
  return cert.finalize();
}

// ---------------------------------------------------------------------------
// Assembly for mu_{n,phi}
// ---------------------------------------------------------------------------

/// The best radial certificate at a among the direct Bobkov optimum and the
/// large/small-set bounds that apply.
inline BoundCertificate best_radial_bound(const RadialMeasure& m, double a, const ConstantsLedger& ledger,
                                          const HypothesisReport& report) {
  std::vector<BoundCertificate> certs;
  certs.push_back(bobkov_optimize(m, a, Target::nu));
  certs.push_back(prop_nu_big(m, a, ledger));
  const double c = ledger.value("c_split");
  if (report.h0.holds()) certs.push_back(prop_small(m, a, c, SmallRegime::h0, ledger, &report));
  if (report.h2.holds()) certs.push_back(prop_small(m, a, c, SmallRegime::h2, ledger, &report));
  std::size_t best = 0;
  for (std::size_t i = 1; i < certs.size(); ++i)
    if (certs[i].value > certs[best].value) best = i;
  return certs[best];
}

/// {2^-1, ..., 2^-40} plus a few points between 1/4 and 1/2.
inline std::vector<double> default_constant_grid() {
  auto g = default_equivalence_grid();
  for (double a : {0.3, 0.35, 0.4, 0.45}) g.push_back(a);
  std::sort(g.begin(), g.end());
  return g;
}

/// min over the grid of the best radial certificate divided by J.
inline double estimate_C_nu(const RadialMeasure& m, const ProfileFn& J, const ConstantsLedger& ledger,
                            const HypothesisReport& report, std::span<const double> grid = {}) {
  const auto g = grid.empty() ? default_constant_grid() : std::vector<double>(grid.begin(), grid.end());
  double out = std::numeric_limits<double>::infinity();
  for (double a : g) out = std::min(out, best_radial_bound(m, a, ledger, report).value / J(a));
  return out;
}

/// sphere_coeff times min over the grid of the exact cap profile divided by J.
inline double estimate_C_sigma(int n, const ProfileFn& J, const ConstantsLedger& ledger,
                               std::span<const double> grid = {}) {
  if (n < 2) return 0.0;
  const auto g = grid.empty() ? default_constant_grid() : std::vector<double>(grid.begin(), grid.end());
  double out = std::numeric_limits<double>::infinity();
  for (double a : g) out = std::min(out, sphere_profile(n, a) / J(a));
  return ledger.value("sphere_coeff") * out;
}

/// Everything the assembled bound needs that does not depend on a: the
/// measure rescaled to phi(1) = 1, its hypothesis class, the comparison
/// profile J and the constants C_nu, C_sigma.
struct TheoremSetup {
  int n = 0;
  Potential original;
  double scale = 1;  // phi^{-1}(1) of the original potential
  RadialMeasure unit_nu;
  HypothesisReport report;
  bool h2_route = false;
  bool applicable = false;
  ProfileFn J;
  double C_nu = 0;
  double C_sigma = 0;
};

inline TheoremSetup prepare_theorem(int n, const Potential& p, const ConstantsLedger& ledger,
                                    const QuadraturePlan& plan = {}) {
  const Potential unit = p.unit_normalized();
  auto nu = RadialMeasure::normalize(n, unit, plan);
  const auto report = check_hypotheses(unit, 64, 4 * std::max({1.0, nu.r_max(), unit.inverse(64.0)}));
  const bool h2 = report.h2.holds();
  const bool h1p = report.h1_prime.holds();
  ProfileFn J = h2 ? ProfileFn::gaussian() : ProfileFn::i_phi(unit, plan);
  TheoremSetup s{n, p, p.inverse(1.0), std::move(nu), report, h2, h2 || h1p, std::move(J), 0, 0};
  if (s.applicable) {
    s.C_nu = estimate_C_nu(s.unit_nu, s.J, ledger, s.report);
    s.C_sigma = estimate_C_sigma(n, s.J, ledger);
  }
  return s;
}

/// Lower bound on Is_{mu_{n,phi}}(a): tensorized for a >= e^{-cn}, small-set
/// bound below, both on the phi(1) = 1 rescaling and mapped back by the
/// homogeneity Is_{mu_{phi_s}} = s Is_{mu_phi}.
inline BoundCertificate theorem_muphi(const TheoremSetup& s, double a, const ConstantsLedger& ledger) {
  BoundCertificate cert;
  cert.a = a;
  cert.route = Route::theorem_muphi;
  cert.target = Target::mu;
  cert.check(ValidityCheck::flag("0 < a < 1", a > 0 && a < 1));
  cert.check(ValidityCheck::flag("phi satisfies H1' or H2", s.applicable));
  if (!cert.valid()) return cert.finalize();

  const double m = std::min(a, 1.0 - a);
  const double c = ledger.value("c_split");
  const double threshold = std::exp(-c * s.n);
  cert.use("scale phi^-1(1)", s.scale, Provenance::derived);
  cert.use("c_split", c, ledger.entry("c_split").provenance);
  cert.use(s.h2_route ? "profile gauss" : "profile iphi", s.J(0.5), Provenance::derived);

  BoundCertificate inner;
  if (m >= threshold && s.n >= 2) {
    inner = tensorize(s.C_nu, s.C_sigma, s.J, s.unit_nu, m, ledger);
  } else {
    inner = prop_small(s.unit_nu, m, c, s.h2_route ? SmallRegime::h2 : SmallRegime::h0, ledger, &s.report);
  }
  cert.use(std::string("via ") + to_string(inner.route), inner.value, Provenance::derived);
  for (auto& k : inner.constants_used) cert.constants_used.push_back(k);
  for (auto& v : inner.validity) cert.validity.push_back(v);
  cert.value = inner.value / s.scale;
  return cert.finalize();
}

inline BoundCertificate theorem_muphi(int n, const Potential& p, double a, const ConstantsLedger& ledger,
                                      const QuadraturePlan& plan = {}) {
  return theorem_muphi(prepare_theorem(n, p, ledger, plan), a, ledger);
}

/// The power-potential form: also reports the implied constant against
/// n^{1/2 - 1/alpha} a log(1/a)^{1 - 1/min(alpha, 2)}.
inline BoundCertificate theorem_mualpha(const TheoremSetup& s, double a, const ConstantsLedger& ledger) {
  if (!s.original.is_power()) throw DomainError("theorem_mualpha needs a power potential");
  auto cert = theorem_muphi(s, a, ledger);
  cert.route = Route::theorem_mualpha;
  const double alpha = s.original.alpha();
  const double prefactor_exp = 0.5 - 1.0 / alpha;
  const double profile_exp = 1.0 - 1.0 / std::min(alpha, 2.0);
  cert.use("prefactor exponent", prefactor_exp, Provenance::paper);
  cert.use("profile exponent", profile_exp, Provenance::paper);
  if (a > 0 && a < 1) {
    const double m = std::min(a, 1.0 - a);
    const double shape = std::pow(s.n, prefactor_exp) * m * std::pow(-std::log(m), profile_exp);
    cert.use("implied C", cert.value / shape, Provenance::derived);
  }
  return cert;
}

inline BoundCertificate theorem_mualpha(int n, double alpha, double a, const ConstantsLedger& ledger,
                                        const QuadraturePlan& plan = {}) {
  return theorem_mualpha(prepare_theorem(n, Potential::power(alpha), ledger, plan), a, ledger);
}

// ---------------------------------------------------------------------------
// Dimension-free coefficient in the isotropic position
// ---------------------------------------------------------------------------

struct DimensionFreeRow {
  int n = 0;
  double lambda = 0;       // isotropic scaling lambda*(n)
  double inv_n = 0;        // phi_{lambda*}^{-1}(n)
  double coefficient = 0;  // sqrt(n) / phi_{lambda*}^{-1}(n)
  double coefficient_with_scale = 0;  // coefficient * phi_{lambda*}^{-1}(1)
  std::vector<double> bound;  // coefficient * base profile at each a
};

struct DimensionFreeTable {
  std::string hypothesis;  // "h2_prime", "h1_prime" or "none"
  bool conforming = false;
  std::vector<double> a_grid;
  std::vector<DimensionFreeRow> rows;
  double min_coefficient = 0;
  double max_coefficient = 0;
  double ratio() const { return max_coefficient / min_coefficient; }
};

/// For each n, rescales p isotropically and tabulates the n-dependent
/// coefficient of the bound against a fixed profile of the unscaled p:
/// a sqrt(log 1/a) under H2', phi^{-1}(1) L_phi(a) under H1'.
inline DimensionFreeTable dimension_free_check(const Potential& p, std::span<const int> n_list,
                                               std::span<const double> a_grid,
                                               const QuadraturePlan& plan = {}) {
  if (n_list.empty()) throw DomainError("dimension list is empty");
  DimensionFreeTable t;
  const auto report = check_hypotheses(p, 64, 4 * std::max(1.0, p.inverse(64.0)));
  if (report.h2_prime.holds())
    t.hypothesis = "h2_prime";
  else if (report.h1_prime.holds())
    t.hypothesis = "h1_prime";
  else
    t.hypothesis = "none";
  t.conforming = t.hypothesis != "none";
  t.a_grid.assign(a_grid.begin(), a_grid.end());
  const bool h2 = t.hypothesis == "h2_prime";
  t.min_coefficient = std::numeric_limits<double>::infinity();
  t.max_coefficient = 0;
  for (int n : n_list) {
    DimensionFreeRow row;
    row.n = n;
    row.lambda = isotropic_lambda(n, p, plan);
    const Potential iso = p.with_lambda(row.lambda);
    row.inv_n = iso.inverse(n);
    row.coefficient = std::sqrt(static_cast<double>(n)) / row.inv_n;
    row.coefficient_with_scale = row.coefficient * iso.inverse(1.0);
    for (double a : a_grid) {
      const double m = std::min(a, 1.0 - a);
      const double profile = h2 ? m * std::sqrt(-std::log(m)) : p.inverse(1.0) * l_phi(p, m);
      row.bound.push_back(row.coefficient * profile);
    }
    t.min_coefficient = std::min(t.min_coefficient, row.coefficient);
    t.max_coefficient = std::max(t.max_coefficient, row.coefficient);
    t.rows.push_back(std::move(row));
  }
  return t;
}

// ---------------------------------------------------------------------------
// Sandwich against achievable boundary measures
// ---------------------------------------------------------------------------

/// Upper bound matching the certificate's target: the exact profile of nu
/// for radial certificates, min(ball, half-space) for mu.
inline double witness_for(const BoundCertificate& cert, const RadialMeasure& m) {
  switch (cert.target) {
    case Target::nu: return radial_upper_bound(m, cert.a);
    case Target::mu: return upper_bound(m, cert.a);
    case Target::both: return std::min(radial_upper_bound(m, cert.a), upper_bound(m, cert.a));
  }
  return 0.0;
}

}  // namespace isoprof
