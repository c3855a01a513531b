#pragma once

// Batch experiments: the bound sweep over (alpha, n, a) with its invariant
// checks, and the statement-by-statement verification report.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "isoprof/bounds.hpp"
#include "isoprof/config.hpp"
#include "isoprof/ledger.hpp"
#include "isoprof/potential.hpp"
#include "isoprof/profile.hpp"
#include "isoprof/radial.hpp"
#include "isoprof/witness.hpp"

namespace isoprof {

// ---------------------------------------------------------------------------
// Cell setup shared by sweep and verification
// ---------------------------------------------------------------------------

/// The potential of one (alpha, n) cell, with lambda resolved.
inline Potential cell_potential(const ExperimentConfig& cfg, double alpha, int n) {
  if (!cfg.isotropic) return Potential::power(alpha, cfg.lambda);
  return Potential::power(alpha).with_lambda(isotropic_lambda(n, Potential::power(alpha), cfg.plan()));
}

/// Fit grid and held-out grid (the fit grid's midpoints) for the
/// concentration envelope.
inline std::pair<std::vector<double>, std::vector<double>> concentration_grids() {
  auto fit = numeric::linspace(0.02, 1.0, 50);
  std::vector<double> held;
  for (std::size_t i = 0; i + 1 < fit.size(); ++i) held.push_back(0.5 * (fit[i] + fit[i + 1]));
  return {fit, held};
}

/// min over `deltas` of log C1 - c1 n delta^2 - log p(delta).
inline double concentration_slack(const RadialMeasure& m, double c1, double C1, std::span<const double> deltas) {
  double worst = std::numeric_limits<double>::infinity();
  for (double d : deltas) {
    const double log_p = std::log(mass_outside_mode_window(m, d));
    worst = std::min(worst, std::log(C1) - c1 * m.n() * d * d - log_p);
  }
  return worst;
}

/// Ledger for one cell: inputs from the config, "fit" entries estimated from
/// the measure. The concentration fit needs n >= 2; below that the assumed
/// defaults stay.
inline ConstantsLedger resolve_ledger(const ExperimentConfig& cfg, const RadialMeasure& m, const Potential& p,
                                      std::optional<TailFit>* fit_out = nullptr) {
  ConstantsLedger ledger;
  ledger.set("kappa", cfg.kappa, Provenance::assumed);
  ledger.set("sphere_coeff", cfg.sphere_coeff, Provenance::assumed);
  std::optional<TailFit> fit;
  if (m.n() >= 2 && (cfg.c1.fit || cfg.C1.fit)) fit = klartag_fit(m, concentration_grids().first);
  if (cfg.C1.fit) {
    if (fit) ledger.set("C1", fit->C1_hat, Provenance::estimated, "fitted concentration prefactor");
  } else {
    ledger.set("C1", cfg.C1.value, Provenance::assumed);
  }
  if (cfg.c1.fit) {
    if (fit) ledger.set("c1", fit->c1_hat, Provenance::estimated, "fitted concentration rate");
  } else {
    ledger.set("c1", cfg.c1.value, Provenance::assumed);
  }
  if (cfg.d1.fit || cfg.d2.fit) {
    const auto est = estimate_d1_d2(p, {}, cfg.plan());
    if (cfg.d1.fit) ledger.set("d1", est.d1_hat, Provenance::estimated, "min of L_phi/I_phi on 2^-1..2^-40");
    if (cfg.d2.fit) ledger.set("d2", est.d2_hat, Provenance::estimated, "max of L_phi/I_phi on 2^-1..2^-40");
  }
  if (!cfg.d1.fit) ledger.set("d1", cfg.d1.value, Provenance::assumed);
  if (!cfg.d2.fit) ledger.set("d2", cfg.d2.value, Provenance::assumed);
  if (fit_out) *fit_out = fit;
  return ledger;
}

/// The tensorized bound computed on the phi(1) = 1 rescaling and mapped back
/// to the original potential.
inline BoundCertificate tensorized_original(const TheoremSetup& s, double a, const ConstantsLedger& ledger) {
  auto cert = tensorize(s.C_nu, s.C_sigma, s.J, s.unit_nu, a, ledger);
  cert.use("scale phi^-1(1)", s.scale, Provenance::derived);
  cert.value /= s.scale;
  return cert.finalize();
}

// ---------------------------------------------------------------------------
// Sweep
// ---------------------------------------------------------------------------

struct BoundRow {
  double alpha = 0;
  int n = 0;
  double lambda = 0;
  double a = 0;
  std::string route;
  std::string target;
  bool valid = false;
  double lower_bound = 0;
  double upper_bound = 0;
  double ratio = 0;
};

struct CheckRow {
  std::string check;
  double alpha = 0;
  int n = 0;
  std::optional<double> a;
  bool pass = false;
  double slack = 0;
};

struct SweepResult {
  std::vector<BoundRow> bounds;
  std::vector<CheckRow> checks;
  nlohmann::ordered_json constants;

  bool ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
  }
  std::size_t failures() const {
    return static_cast<std::size_t>(std::count_if(checks.begin(), checks.end(), [](const auto& c) { return !c.pass; }));
  }
};

namespace detail {

inline CheckRow check_row(std::string name, double alpha, int n, std::optional<double> a, double slack,
                          double tol = 0.0) {
  return {std::move(name), alpha, n, a, slack >= -tol, slack};
}

// min over r in [phi^-1(2n), max(r_max, 4 phi^-1(2n))] of F(r) - nu(r, inf).
inline double tail_domination_slack(const RadialMeasure& m, int points = 200) {
  const double lo = m.inv_2n();
  const double hi = std::max(m.r_max(), 4 * lo);
  double worst = std::numeric_limits<double>::infinity();
  for (double r : numeric::linspace(lo, hi, points)) worst = std::min(worst, m.tail_bound(r) - m.tail(r));
  return worst;
}

// log n + log Z_rad - n (log phi^-1(n) - 1), scaled by max(1, |rhs|).
inline double normalizer_slack(const RadialMeasure& m) {
  const double n = m.n();
  const double lhs = std::log(n) + m.log_z_rad();
  const double rhs = n * (std::log(m.inv_n()) - 1);
  return (lhs - rhs) / std::max({1.0, std::abs(lhs), std::abs(rhs)});
}

inline double relative_error(double x, double ref) { return std::abs(x - ref) / std::max(std::abs(ref), 1e-300); }

}  // namespace detail

/// Runs every route over the config grid. Sandwich rows compare each valid
/// certificate with the witness upper bound for its target.
inline SweepResult run_sweep(const ExperimentConfig& cfg) {
  if (cfg.n_list.empty()) throw ConfigError("grid.n is empty");
  if (cfg.alphas.empty()) throw ConfigError("potential.alpha is empty");
  SweepResult out;
  out.constants = nlohmann::ordered_json::object();
  out.constants["config"] = cfg.resolved_text();
  out.constants["cells"] = nlohmann::ordered_json::array();
  const auto a_grid = cfg.a_grid.values();
  const auto plan = cfg.plan();
  const bool need_setup = std::any_of(cfg.routes.begin(), cfg.routes.end(),
                                      [](const std::string& r) { return r == "tensor" || r == "theorem"; });

  for (double alpha : cfg.alphas) {
    for (int n : cfg.n_list) {
      const Potential p = cell_potential(cfg, alpha, n);
      const auto m = RadialMeasure::normalize(n, p, plan);
      std::optional<TailFit> fit;
      const auto ledger = resolve_ledger(cfg, m, p, &fit);
      const auto report = check_hypotheses(p, 64, 4 * std::max({1.0, m.r_max(), p.inverse(64.0)}));
      std::optional<TheoremSetup> setup;
      if (need_setup) setup = prepare_theorem(n, p, ledger, plan);

      nlohmann::ordered_json cell;
      cell["alpha"] = alpha;
      cell["n"] = n;
      cell["lambda"] = p.lambda();
      cell["potential"] = p.describe();
      cell["hypotheses"] = {{"h0", to_string(report.h0.verdict)},
                            {"h1", to_string(report.h1.verdict)},
                            {"h1_prime", to_string(report.h1_prime.verdict)},
                            {"h2", to_string(report.h2.verdict)},
                            {"h2_prime", to_string(report.h2_prime.verdict)}};
      cell["ledger"] = ledger.to_json();
      if (fit)
        cell["concentration_fit"] = {{"c1_hat", fit->c1_hat}, {"C1_hat", fit->C1_hat},
                                     {"refined_delta", fit->refined_delta}};
      if (setup) {
        cell["theorem"] = {{"scale", setup->scale},
                           {"applicable", setup->applicable},
                           {"profile", setup->J.describe()},
                           {"C_nu", setup->C_nu},
                           {"C_sigma", setup->C_sigma}};
      }
      out.constants["cells"].push_back(cell);

      // Invariants of the cell.
      out.checks.push_back(detail::check_row("tail_bound", alpha, n, {}, detail::tail_domination_slack(m), 1e-12));
      out.checks.push_back(detail::check_row("normalizer", alpha, n, {}, detail::normalizer_slack(m), 1e-12));
      const double mode_ref = std::pow((n - 1) / alpha, 1 / alpha) / p.lambda();
      out.checks.push_back(detail::check_row("mode_identity", alpha, n, {},
                                             1e-10 - detail::relative_error(m.mode(), mode_ref)));
      out.checks.push_back(detail::check_row("mode_upper", alpha, n, {}, (m.inv_n() - m.mode()) / m.inv_n()));
      if (n >= 2) {
        const double c1 = fit ? fit->c1_hat : ledger.value("c1");
        const double C1 = fit ? fit->C1_hat : ledger.value("C1");
        const auto held = concentration_grids().second;
        out.checks.push_back(
            detail::check_row("concentration_heldout", alpha, n, {}, concentration_slack(m, c1, C1, held), 1e-9));
      }
      {
        const auto kb = select_K_big(ledger.value("C1"));
        const auto k0 = select_K_small(ledger.value("c_split"), SmallRegime::h0);
        const auto k2 = select_K_small(ledger.value("c_split"), SmallRegime::h2);
        const bool ok = kb.satisfied() && kb.minimal && k0.satisfied() && k0.minimal && k2.satisfied() && k2.minimal;
        out.checks.push_back(detail::check_row("K_minimality", alpha, n, {}, ok ? 0.0 : -1.0));
      }

      for (double a : a_grid) {
        const double am = std::min(a, 1.0 - a);
        const double up_nu = radial_upper_bound(m, a);
        const double up_mu = upper_bound(m, a);
        for (const auto& route : cfg.routes) {
          BoundCertificate cert;
          if (route == "bobkov") {
            cert = bobkov_optimize(m, am, Target::nu);
          } else if (route == "big") {
            cert = prop_nu_big(m, am, ledger);
          } else if (route == "small") {
            const auto regime = report.h2.holds() ? SmallRegime::h2 : SmallRegime::h0;
            cert = prop_small(m, am, ledger.value("c_split"), regime, ledger, &report);
          } else if (route == "tensor") {
            cert = tensorized_original(*setup, am, ledger);
          } else {
            cert = theorem_mualpha(*setup, a, ledger);
          }
          const double upper = cert.target == Target::nu   ? up_nu
                               : cert.target == Target::mu ? up_mu
                                                           : std::min(up_nu, up_mu);
          BoundRow row{alpha, n, p.lambda(), a, to_string(cert.route), to_string(cert.target), cert.valid(),
                       cert.value, upper, upper > 0 ? cert.value / upper : 0.0};
          out.bounds.push_back(row);
          if (cert.valid()) {
            const double slack = (upper * (1 + 1e-6) - cert.value) / upper;
            out.checks.push_back(detail::check_row("sandwich:" + route, alpha, n, a, slack));
          }
        }
      }
    }
  }
  return out;
}

inline std::string bounds_csv(const SweepResult& r) {
  std::ostringstream o;
  o << "alpha,n,lambda,a,route,target,valid,lower_bound,upper_bound,ratio\n";
  for (const auto& b : r.bounds)
    o << format_fixed17(b.alpha) << ',' << b.n << ',' << format_fixed17(b.lambda) << ',' << format_fixed17(b.a)
      << ',' << b.route << ',' << b.target << ',' << (b.valid ? "pass" : "fail") << ','
      << format_fixed17(b.lower_bound) << ',' << format_fixed17(b.upper_bound) << ',' << format_fixed17(b.ratio)
      << '\n';
  return o.str();
}

inline std::string checks_csv(const SweepResult& r) {
  std::ostringstream o;
  o << "check,alpha,n,a,pass,slack\n";
  for (const auto& c : r.checks)
    o << c.check << ',' << format_fixed17(c.alpha) << ',' << c.n << ',' << (c.a ? format_fixed17(*c.a) : "")
      << ',' << (c.pass ? "pass" : "fail") << ',' << format_fixed17(c.slack) << '\n';
  return o.str();
}

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
  f << text;
  if (!f) throw std::runtime_error("write to '" + path.string() + "' failed");
}

}  // namespace detail

/// Writes bounds.csv, checks.csv, constants.json and config.resolved.ini.
inline void write_sweep(const SweepResult& r, const ExperimentConfig& cfg, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  detail::write_file(dir / "bounds.csv", bounds_csv(r));
  detail::write_file(dir / "checks.csv", checks_csv(r));
  detail::write_file(dir / "constants.json", r.constants.dump(2) + "\n");
  detail::write_file(dir / "config.resolved.ini", cfg.resolved_text());
}

// ---------------------------------------------------------------------------
// Statement-by-statement verification
// ---------------------------------------------------------------------------

enum class RowStatus { pass, fail, not_applicable };

inline const char* to_string(RowStatus s) {
  switch (s) {
    case RowStatus::pass: return "pass";
    case RowStatus::fail: return "fail";
    case RowStatus::not_applicable: return "n/a";
  }
  return "?";
}

struct ReportRow {
  double alpha = 0;
  std::string id;
  std::string statement;
  RowStatus status = RowStatus::not_applicable;
  double worst_slack = 0;  // NaN when not applicable
  std::string detail;
};

struct VerifyReport {
  std::vector<ReportRow> rows;

  std::size_t count(RowStatus s) const {
    return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [&](const auto& r) { return r.status == s; }));
  }
  bool ok() const { return count(RowStatus::fail) == 0; }

  std::string csv() const {
    std::ostringstream o;
    o << "alpha,id,status,worst_slack,statement,detail\n";
    for (const auto& r : rows)
      o << format_fixed17(r.alpha) << ',' << r.id << ',' << to_string(r.status) << ','
        << (std::isnan(r.worst_slack) ? "" : format_fixed17(r.worst_slack)) << ",\"" << r.statement << "\",\""
        << r.detail << "\"\n";
    return o.str();
  }

  std::string markdown() const {
    std::ostringstream o;
    o << "| alpha | id | statement | status | worst slack | detail |\n";
    o << "|---|---|---|---|---|---|\n";
    for (const auto& r : rows)
      o << "| " << format_double(r.alpha) << " | " << r.id << " | " << r.statement << " | " << to_string(r.status)
        << " | " << (std::isnan(r.worst_slack) ? "" : format_double(r.worst_slack)) << " | " << r.detail << " |\n";
    o << "\n" << count(RowStatus::pass) << " pass, " << count(RowStatus::fail) << " fail, "
      << count(RowStatus::not_applicable) << " n/a\n";
    return o.str();
  }
};

namespace detail {

// Accumulates the worst slack of a family of inequalities.
struct SlackTracker {
  double worst = std::numeric_limits<double>::infinity();
  double tol = 0;
  int count = 0;
  void add(double slack) {
    worst = std::min(worst, slack);
    ++count;
  }
  void add_at_most(double lhs, double rhs) { add((rhs - lhs) / std::max({1.0, std::abs(lhs), std::abs(rhs)})); }
  bool empty() const { return count == 0; }
};

inline ReportRow make_row(double alpha, std::string id, std::string statement, const SlackTracker& t,
                          std::string detail = {}) {
  ReportRow r{alpha, std::move(id), std::move(statement), RowStatus::not_applicable,
              std::numeric_limits<double>::quiet_NaN(), std::move(detail)};
  if (t.empty()) return r;
  r.worst_slack = t.worst;
  r.status = t.worst >= -t.tol ? RowStatus::pass : RowStatus::fail;
  if (r.detail.empty()) r.detail = std::to_string(t.count) + " evaluations";
  return r;
}

inline ReportRow na_row(double alpha, std::string id, std::string statement, std::string why) {
  return {alpha, std::move(id), std::move(statement), RowStatus::not_applicable,
          std::numeric_limits<double>::quiet_NaN(), std::move(why)};
}

}  // namespace detail

/// x-grid and t-values of the scaling-inequality suite.
inline std::vector<double> scaling_x_grid() { return numeric::geomspace(1e-2, 1e2, 64); }
inline std::vector<double> scaling_t_values() { return {1.0, 1.5, 2.0, 4.0}; }

/// Evaluates each statement for every alpha in the config over its n grid.
/// Rows whose hypothesis the potential does not satisfy are marked n/a.
inline VerifyReport verify_paper(const ExperimentConfig& cfg) {
  using detail::SlackTracker;
  VerifyReport rep;
  const auto plan = cfg.plan();
  const auto a_half = numeric::geomspace(1e-12, 0.5, 60);

  for (double alpha : cfg.alphas) {
    const Potential base = Potential::power(alpha, cfg.isotropic ? 1.0 : cfg.lambda);
    const auto hyp = check_hypotheses(base, 64, 4 * std::max(1.0, base.inverse(64.0)));
    auto add = [&](ReportRow r) { rep.rows.push_back(std::move(r)); };

    // Scaling inequalities of each class.
    {
      SlackTracker h0{.tol = 1e-9}, h1{.tol = 1e-9}, h2{.tol = 1e-9};
      const auto xs = scaling_x_grid();
      const auto report = check_hypotheses(base, 64, 4 * 4 * xs.back());
      for (double t : scaling_t_values())
        for (double x : xs)
          for (const auto& c : lemma21_check(base, t, x, report).checks)
            (c.hypothesis == "H0" ? h0 : c.hypothesis == "H1" ? h1 : h2).add(c.slack);
      add(detail::make_row(alpha, "scaling.h0", "H0: t phi(x) <= phi(tx), phi^-1(ty) <= t phi^-1(y), phi <= x phi'", h0));
      add(report.h1.holds()
              ? detail::make_row(alpha, "scaling.h1", "H1: t phi(x) <= phi(tx) <= t^2 phi(x) and companions", h1)
              : detail::na_row(alpha, "scaling.h1", "H1: t phi(x) <= phi(tx) <= t^2 phi(x) and companions",
                               "phi does not satisfy H1"));
      add(report.h2.holds()
              ? detail::make_row(alpha, "scaling.h2", "H2: t^2 phi(x) <= phi(tx), 2 phi <= x phi'", h2)
              : detail::na_row(alpha, "scaling.h2", "H2: t^2 phi(x) <= phi(tx), 2 phi <= x phi'",
                               "phi does not satisfy H2"));
    }
    {
      SlackTracker t;
      if (hyp.h1_prime.holds()) t.add(hyp.h1.holds() ? 0.0 : -1.0);
      add(t.empty() ? detail::na_row(alpha, "hyp.h1prime_h1", "H1' implies H1", "phi does not satisfy H1'")
                    : detail::make_row(alpha, "hyp.h1prime_h1", "H1' implies H1", t, "grid verdicts"));
    }
    {
      SlackTracker t;
      if (hyp.h2_prime.holds()) t.add(hyp.h2.holds() ? 0.0 : -1.0);
      add(t.empty() ? detail::na_row(alpha, "hyp.h2prime_h2", "H2' implies H2", "phi does not satisfy H2'")
                    : detail::make_row(alpha, "hyp.h2prime_h2", "H2' implies H2", t, "grid verdicts"));
    }

    // Radial law over the n grid.
    SlackTracker tail{.tol = 1e-12}, tail_one, normalizer{.tol = 1e-12}, mode_id{.tol = 0}, mode_up, mode_low,
        mode_low_fixed{.tol = 1e-12}, variance{.tol = 1e-10}, mode_moment, conc{.tol = 1e-9}, iso;
    double worst_c1 = std::numeric_limits<double>::infinity();
    for (int n : cfg.n_list) {
      const Potential p = cell_potential(cfg, alpha, n);
      const auto m = RadialMeasure::normalize(n, p, plan);
      tail.add(detail::tail_domination_slack(m));
      for (double r : numeric::linspace(m.inv_2n(), std::max(m.r_max(), 4 * m.inv_2n()), 50))
        tail_one.add_at_most(m.tail_bound(r), 1.0);
      normalizer.add(detail::normalizer_slack(m));
      const double r0 = m.mode();
      if (n >= 2) mode_id.add(1e-10 - detail::relative_error(r0 * p.deriv(r0), n - 1.0));
      mode_up.add_at_most(r0, m.inv_n());
      if (n >= 2 * alpha + 1) mode_low.add_at_most(std::exp(-1 / M_E) * m.inv_n(), r0);
      if (n >= 2) {
        // x phi'(x) <= alpha phi(x) gives phi(r0) >= (n-1)/alpha, then phi^-1(s y) >= s^{1/alpha} phi^-1(y).
        mode_low_fixed.add_at_most(p.inverse((n - 1) / alpha), r0);
        mode_low_fixed.add_at_most(std::exp(-2 / M_E) * m.inv_n(), r0);
      }
      const double m1 = m.moment(1), m2 = m.moment(2);
      variance.add_at_most(n * m2, (n + 1) * m1 * m1);
      if (n >= 100) mode_moment.add(0.15 - std::abs(r0 / std::sqrt(m2) - 1));
      if (n >= 2) {
        const auto [fit_grid, held] = concentration_grids();
        const auto fit = klartag_fit(m, fit_grid);
        worst_c1 = std::min(worst_c1, fit.c1_hat);
        conc.add(fit.c1_hat > 0 ? concentration_slack(m, fit.c1_hat, fit.C1_hat, held) : -1.0);
      }
      const double lam = isotropic_lambda(n, base, plan);
      const auto iso_m = RadialMeasure::normalize(n, base.with_lambda(lam), plan);
      iso.add(1e-8 - detail::relative_error(iso_m.moment(2), n));
    }
    add(detail::make_row(alpha, "tail.domination", "nu(r, inf) <= F(r) for r >= phi^-1(2n)", tail));
    add(detail::make_row(alpha, "tail.at_most_one", "F(r) <= 1 for r >= phi^-1(2n)", tail_one));
    add(detail::make_row(alpha, "radial.normalizer", "log n + log Z_rad >= n (log phi^-1(n) - 1)", normalizer));
    add(detail::make_row(alpha, "radial.mode_identity", "r0 phi'(r0) = n - 1", mode_id));
    add(detail::make_row(alpha, "radial.mode_upper", "r0 <= phi^-1(n)", mode_up));
    add(mode_low.empty() ? detail::na_row(alpha, "radial.mode_lower", "r0 >= e^{-1/e} phi^-1(n)", "no n >= 2 alpha + 1")
                         : detail::make_row(alpha, "radial.mode_lower", "r0 >= e^{-1/e} phi^-1(n), n >= 2 alpha + 1",
                                            mode_low));
    add(mode_low_fixed.empty()
            ? detail::na_row(alpha, "radial.mode_lower_chain", "r0 >= phi^-1((n-1)/alpha) >= e^{-2/e} phi^-1(n)",
                             "no n >= 2")
            : detail::make_row(alpha, "radial.mode_lower_chain",
                               "r0 >= phi^-1((n-1)/alpha) >= e^{-2/e} phi^-1(n), n >= 2", mode_low_fixed));
    add(detail::make_row(alpha, "radial.variance", "n E|X|^2 <= (n + 1) (E|X|)^2", variance));
    add(mode_moment.empty()
            ? detail::na_row(alpha, "radial.mode_moment", "|r0 / sqrt(E|X|^2) - 1| <= 0.15", "no n >= 100")
            : detail::make_row(alpha, "radial.mode_moment", "|r0 / sqrt(E|X|^2) - 1| <= 0.15 for n >= 100",
                               mode_moment));
    add(conc.empty() ? detail::na_row(alpha, "concentration.fit", "nu{|r - r0| >= delta r0} <= C1 e^{-c1 n delta^2}",
                                      "no n >= 2")
                     : detail::make_row(alpha, "concentration.fit",
                                        "nu{|r - r0| >= delta r0} <= C1 e^{-c1 n delta^2} on held-out delta", conc,
                                        "min fitted c1 = " + format_double(worst_c1)));

    // One-dimensional profile, on phi(1) = 1.
    const Potential unit = base.unit_normalized();
    {
      SlackTracker t{.tol = 1e-12};
      if (hyp.h1.holds()) {
        for (double a : a_half) {
          const double L = -std::log(a);
          t.add_at_most(std::sqrt(M_LN2) * base.inverse(1.0) * L / base.inverse(L), std::sqrt(L));
        }
      }
      const char* s = "sqrt(log 1/a) >= sqrt(log 2) phi^-1(1) log(1/a) / phi^-1(log 1/a)";
      add(t.empty() ? detail::na_row(alpha, "profile.h1_remark", s, "phi does not satisfy H1")
                    : detail::make_row(alpha, "profile.h1_remark", s, t));
    }
    {
      SlackTracker t{.tol = 1e-12};
      double prev = 0;
      for (double a : a_half) {
        const double v = l_phi(base, a);
        t.add_at_most(prev, v);
        prev = v;
      }
      add(detail::make_row(alpha, "profile.lphi_monotone", "L_phi non-decreasing on (0, 1/2]", t));
    }
    {
      SlackTracker t{.tol = 1e-12};
      if (hyp.h1.holds()) {
        double prev = 0;
        for (double a : a_half) {
          const double v = l_phi(base, a) / l_alpha(2.0, a);
          t.add_at_most(prev, v);
          prev = v;
        }
      }
      const char* s = "L_phi / L_2 non-decreasing on (0, 1/2]";
      add(t.empty() ? detail::na_row(alpha, "profile.lphi_over_l2", s, "phi does not satisfy H1")
                    : detail::make_row(alpha, "profile.lphi_over_l2", s, t));
    }
    const auto one = RadialMeasure::normalize(1, unit, plan);
    {
      SlackTracker t{.tol = 1e-12};
      if (hyp.h1_prime.holds()) {
        const double z = std::exp(M_LN2 + one.log_z_rad());
        t.add_at_most(2 * (1 - 1 / M_E), z);
        t.add_at_most(z, 2 * (1 + 1 / M_E));
      }
      const char* s = "2(1 - 1/e) <= Z_phi <= 2(1 + 1/e) when phi(1) = 1";
      add(t.empty() ? detail::na_row(alpha, "profile.z_phi", s, "phi does not satisfy H1'")
                    : detail::make_row(alpha, "profile.z_phi", s, t));
    }
    {
      SlackTracker t{.tol = 1e-10};
      if (hyp.h1_prime.holds()) {
        for (double r : numeric::geomspace(1.0, unit.inverse(600.0), 60)) {
          const double log_int = one.log_tail(r) + one.log_z_rad();
          const double log_up = -unit(r) - std::log(unit.deriv(r));
          // Compared in log space: log(lower) <= log_int <= log_up.
          t.add(log_int - (log_up - M_LN2));
          t.add(log_up - log_int);
        }
      }
      const char* s = "e^{-phi(r)} / (2 phi'(r)) <= int_r^inf e^{-phi} <= e^{-phi(r)} / phi'(r), r >= 1";
      add(t.empty() ? detail::na_row(alpha, "profile.tail_sandwich", s, "phi does not satisfy H1'")
                    : detail::make_row(alpha, "profile.tail_sandwich", s, t));
    }
    {
      const auto shape = check_profile_shape(ProfileFn::i_phi(base, plan), 200);
      SlackTracker t{.tol = 1e-9};
      t.add(shape.concavity_worst);
      t.add(1e-10 - shape.symmetry_max);
      t.add(-shape.endpoint_max);
      t.add(shape.positive ? 0.0 : -1.0);
      add(detail::make_row(alpha, "profile.iphi_shape", "I_phi concave, symmetric, zero at 0 and 1", t));
    }
    {
      const auto est = estimate_d1_d2(base, {}, plan);
      const std::string detail = "d1_hat = " + format_double(est.d1_hat) + ", d2_hat = " + format_double(est.d2_hat);
      SlackTracker t;
      if (hyp.h1_prime.holds()) t.add(std::isfinite(est.d2_hat) && est.d1_hat > 0 ? 0.0 : -1.0);
      const char* s = "d1 I_phi <= L_phi <= d2 I_phi with finite d1 > 0, d2";
      add(t.empty() ? detail::na_row(alpha, "profile.d1_d2", s, "phi does not satisfy H1'; " + detail)
                    : detail::make_row(alpha, "profile.d1_d2", s, t, detail));
    }

    // Isotropic position.
    add(detail::make_row(alpha, "isotropy.lambda", "E|X|^2 = n at the isotropic scaling", iso));
    {
      std::vector<int> ns;
      for (int n : cfg.n_list)
        if (n >= 5) ns.push_back(n);
      const char* s = "isotropic coefficient sqrt(n) / phi_lambda^-1(n) within a factor 2 across n >= 5";
      if (ns.size() < 2) {
        add(detail::na_row(alpha, "isotropy.dimension_free", s, "fewer than two n >= 5"));
      } else {
        const auto table = dimension_free_check(base, ns, std::vector<double>{0.01}, plan);
        SlackTracker t;
        if (table.conforming) t.add(2.0 - table.ratio());
        const std::string detail = table.hypothesis + ", max/min = " + format_double(table.ratio());
        add(t.empty() ? detail::na_row(alpha, "isotropy.dimension_free", s, "phi satisfies neither H1' nor H2'")
                      : detail::make_row(alpha, "isotropy.dimension_free", s, t, detail));
      }
    }

    // Assembled bound against witnesses, and the constant selections.
    {
      SlackTracker sand;
      SlackTracker kmin;
      int valid = 0;
      for (int n : cfg.n_list) {
        const Potential p = cell_potential(cfg, alpha, n);
        const auto m = RadialMeasure::normalize(n, p, plan);
        const auto ledger = resolve_ledger(cfg, m, p);
        const auto setup = prepare_theorem(n, p, ledger, plan);
        for (double a : {1e-8, 1e-3, 0.1, 0.4}) {
          const auto cert = theorem_muphi(setup, a, ledger);
          if (!cert.valid()) continue;
          ++valid;
          const double up = upper_bound(m, a);
          sand.add((up * (1 + 1e-6) - cert.value) / up);
        }
        const auto kb = select_K_big(ledger.value("C1"));
        const auto k0 = select_K_small(ledger.value("c_split"), SmallRegime::h0);
        const auto k2 = select_K_small(ledger.value("c_split"), SmallRegime::h2);
        for (const auto* k : {&kb, &k0, &k2}) kmin.add(k->satisfied() && k->minimal ? 0.0 : -1.0);
      }
      const char* s = "valid assembled bound <= min(ball, half-space) perimeter";
      add(sand.empty() ? detail::na_row(alpha, "sandwich.theorem", s, "no valid certificate")
                       : detail::make_row(alpha, "sandwich.theorem", s, sand,
                                          std::to_string(valid) + " valid certificates"));
      add(detail::make_row(alpha, "constants.K_minimal", "selected K satisfy their constraints and K - 1 does not",
                           kmin));
    }
  }
  return rep;
}

}  // namespace isoprof
