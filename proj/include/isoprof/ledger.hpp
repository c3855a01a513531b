#pragma once

// Named constants with provenance, and the constant-selection rules that
// turn the existential constants of the bounds into concrete numbers.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "isoprof/errors.hpp"
#include "isoprof/numerics.hpp"

namespace isoprof {

enum class Provenance { assumed, estimated, derived, paper };

inline const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::assumed: return "assumed";
    case Provenance::estimated: return "estimated";
    case Provenance::derived: return "derived";
    case Provenance::paper: return "paper";
  }
  return "?";
}

/// One evaluated precondition. `slack` >= 0 exactly when it passes; it is
/// scaled by max(1, |lhs|, |rhs|) for inequalities.
struct ValidityCheck {
  std::string condition;
  bool pass = false;
  double slack = 0;

  /// lhs <= rhs
  static ValidityCheck at_most(std::string condition, double lhs, double rhs) {
    const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
    const double slack = (rhs - lhs) / scale;
    return {std::move(condition), lhs <= rhs, std::isnan(slack) ? -1.0 : slack};
  }
  static ValidityCheck flag(std::string condition, bool ok) {
    return {std::move(condition), ok, ok ? 0.0 : -1.0};
  }
};

inline bool all_pass(const std::vector<ValidityCheck>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
}

// ---------------------------------------------------------------------------
// Constant selection
// ---------------------------------------------------------------------------

/// A selected constant together with its defining constraints, evaluated at
/// the selection and at selection - 1.
struct KSelection {
  double K = 0;
  std::vector<ValidityCheck> constraints;
  /// K - 1 violates at least one constraint.
  bool minimal = false;
  bool satisfied() const { return all_pass(constraints); }
};

namespace detail {

// Smallest x >= lo with f(x) <= 0 for f decreasing past lo.
template <class F>
double first_nonpositive(const F& f, double lo) {
  if (f(lo) <= 0) return lo;
  const double hi = numeric::expand_until([&](double x) { return f(x) <= 0; }, std::max(2 * lo, 1.0));
  double x = numeric::find_root(f, lo, hi, 52);
  while (f(x) > 0) x = std::nextafter(x, HUGE_VAL);
  if (!std::isfinite(x)) throw NumericError("constant selection failed to converge");
  return x;
}

}  // namespace detail

/// K for the large-set radial bound: K >= 1, K > log C1 / log 2 and
/// (1/2) log 2 + log(1 - C1 2^{-K}) >= 0, the concave bracket at a = 1/2.
inline KSelection select_K_big(double C1) {
  if (!(C1 >= 1)) throw DomainError("C1 must be >= 1");
  auto bracket = [&](double K) {
    const double q = C1 * std::exp2(-K);
    return q < 1 ? 0.5 * M_LN2 + std::log1p(-q) : kNegInf;
  };
  auto checks = [&](double K) {
    std::vector<ValidityCheck> c;
    c.push_back(ValidityCheck::at_most("K >= 1", 1.0, K));
    const double lb = std::log(C1) / M_LN2;
    c.push_back({"K > log C1 / log 2", K > lb, (K - lb) / std::max(1.0, K)});
    c.push_back(ValidityCheck::at_most("(1/2)log 2 + log(1 - C1 2^-K) >= 0", 0.0, bracket(K)));
    return c;
  };
  const double floor_k = std::max(1.0, std::log2(C1));
  // At K = log2(C1) + 1 the bracket is (1/2)log 2 - log 2 < 0, so K* lies beyond.
  const double k_star =
      detail::first_nonpositive([&](double K) { return -bracket(K); }, std::log2(C1) + 1.0);
  KSelection s;
  s.K = std::max(floor_k, k_star);
  s.constraints = checks(s.K);
  s.minimal = !all_pass(checks(s.K - 1));
  return s;
}

enum class SmallRegime { h0, h2 };

inline const char* to_string(SmallRegime r) { return r == SmallRegime::h0 ? "h0" : "h2"; }

/// K for the small-set bounds at split constant c.
///  h0: Kc >= 2, K - 1 >= 1/c, e K c exp(-(K-1)c) <= 1/2;
///  h2: Kc >= 2, K - 1 >= 1/(2c), e sqrt(Kc) exp(-(K-1)c) <= 1/2.
inline KSelection select_K_small(double c, SmallRegime regime) {
  if (!(c > 0)) throw DomainError("split constant c must be positive");
  const bool h2 = regime == SmallRegime::h2;
  const double gap = h2 ? 0.5 / c : 1.0 / c;
  auto log_decay = [&](double K) {
    return 1.0 + (h2 ? 0.5 : 1.0) * std::log(K * c) - (K - 1) * c + M_LN2;
  };
  auto checks = [&](double K) {
    std::vector<ValidityCheck> v;
    v.push_back(ValidityCheck::at_most("K c >= 2", 2.0, K * c));
    v.push_back(ValidityCheck::at_most(h2 ? "K - 1 >= 1/(2c)" : "K - 1 >= 1/c", gap, K - 1));
    v.push_back(ValidityCheck::at_most(
        h2 ? "e sqrt(Kc) exp(-(K-1)c) <= 1/2" : "e K c exp(-(K-1)c) <= 1/2", log_decay(K), 0.0));
    return v;
  };
  // log_decay is decreasing once K >= gap.
  const double k3 = detail::first_nonpositive(log_decay, gap);
  KSelection s;
  s.K = std::max({2.0 / c, 1.0 + gap, k3});
  s.constraints = checks(s.K);
  s.minimal = !all_pass(checks(s.K - 1));
  return s;
}

/// Smallest c1' >= 2 with max(kappa1, 1) e c1' exp(-c1') <= exp(-c); sets the
/// cut-off radius phi^{-1}(c1' n) of the tensorized bound.
inline double select_cutoff_constant(double kappa1, double c) {
  const double lm = std::log(std::max(kappa1, 1.0));
  return detail::first_nonpositive([&](double x) { return lm + 1.0 + std::log(x) - x + c; }, 2.0);
}

// ---------------------------------------------------------------------------
// Ledger
// ---------------------------------------------------------------------------

struct LedgerEntry {
  std::string name;
  double value = 0;
  Provenance provenance = Provenance::assumed;
  std::string note;
};

/// Every numeric constant a bound depends on. Inputs can be overridden;
/// derived entries are recomputed from them on every change.
class ConstantsLedger {
 public:
  static constexpr const char* kInputs[] = {"c1", "C1", "kappa", "d1", "d2", "sphere_coeff"};

  ConstantsLedger() {
    entries_ = {
        {"c1", 0.3, Provenance::assumed, "concentration rate around the radial mode"},
        {"C1", 2.0, Provenance::assumed, "concentration prefactor"},
        {"kappa", 0.5, Provenance::assumed, "functional form constant of the comparison profile"},
        {"d1", 0.5, Provenance::assumed, "lower equivalence constant L_phi >= d1 I_phi"},
        {"d2", 3.0, Provenance::assumed, "upper equivalence constant L_phi <= d2 I_phi"},
        {"sphere_coeff", 1.0, Provenance::assumed, "multiplier on the exact cap profile of the sphere"},
    };
    recompute();
  }

  /// Overrides an input constant; derived entries cannot be set.
  void set(const std::string& name, double value, Provenance provenance, std::string note = {}) {
    if (std::find(std::begin(kInputs), std::end(kInputs), name) == std::end(kInputs))
      throw DomainError("ledger entry '" + name + "' is derived or unknown and cannot be set");
    if (!(value > 0) || !std::isfinite(value))
      throw DomainError("ledger entry '" + name + "' must be positive and finite");
    if (name == "C1" && value < 1) throw DomainError("ledger entry 'C1' must be >= 1");
    if (provenance == Provenance::derived)
      throw DomainError("input entries cannot carry derived provenance");
    auto& e = mutable_entry(name);
    e.value = value;
    e.provenance = provenance;
    if (!note.empty()) e.note = std::move(note);
    recompute();
  }

  bool contains(const std::string& name) const {
    return std::any_of(entries_.begin(), entries_.end(), [&](const auto& e) { return e.name == name; });
  }

  const LedgerEntry& entry(const std::string& name) const {
    for (const auto& e : entries_)
      if (e.name == name) return e;
    throw DomainError("no ledger entry named '" + name + "'");
  }

  double value(const std::string& name) const { return entry(name).value; }

  const std::vector<LedgerEntry>& entries() const noexcept { return entries_; }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json out = nlohmann::ordered_json::object();
    for (const auto& e : entries_)
      out[e.name] = {{"value", e.value}, {"provenance", to_string(e.provenance)}, {"note", e.note}};
    return out;
  }

 private:
  LedgerEntry& mutable_entry(const std::string& name) {
    for (auto& e : entries_)
      if (e.name == name) return e;
    entries_.push_back({name, 0, Provenance::derived, {}});
    return entries_.back();
  }

  void put_derived(const std::string& name, double value, const std::string& note) {
    auto& e = mutable_entry(name);
    e.value = value;
    e.provenance = Provenance::derived;
    e.note = note;
  }

  void recompute() {
    const double kappa = value("kappa");
    const double k2 = kappa * kappa;
    put_derived("kappa1", 2 * (k2 + 1) / k2, "2(kappa^2+1)/kappa^2");
    put_derived("kappa2", k2 / (2 * M_SQRT2), "kappa^2/(2 sqrt 2)");
    const double c1 = value("c1");
    const auto big = select_K_big(value("C1"));
    put_derived("K_big", big.K, "large-set K selection from C1");
    const double c = c1 / big.K;
    put_derived("c_split", c, "c1/K_big, the small/large set threshold exp(-c n)");
    put_derived("C_big", 0.5 * std::sqrt(c1 / big.K), "(1/2)sqrt(c1/K_big)");
    const double kh0 = select_K_small(c, SmallRegime::h0).K;
    const double kh2 = select_K_small(c, SmallRegime::h2).K;
    put_derived("K_small_h0", kh0, "small-set K selection at c_split");
    put_derived("C_small_h0", 0.5 / kh0, "1/(2 K_small_h0)");
    put_derived("K_small_h2", kh2, "small-set K selection at c_split, H2 regime");
    put_derived("C_small_h2", 0.5 / std::sqrt(kh2), "1/(2 sqrt K_small_h2)");
    put_derived("c1_cutoff", select_cutoff_constant(value("kappa1"), c),
                "cut-off radius phi^-1(c1_cutoff n)");
  }

  std::vector<LedgerEntry> entries_;
};

}  // namespace isoprof
