// isoprof: command-line driver for the radial measures, profiles, bounds,
// witnesses, sampler, sweep and verification report.
//
// Exit codes: 0 success, 1 check failure, 2 usage or config error,
// 3 numeric failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "isoprof/isoprof.hpp"

namespace {

using namespace isoprof;

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kUsage = 2;
constexpr int kNumeric = 3;

struct MeasureArgs {
  int n = 2;
  double alpha = 2.0;
  std::string lambda = "1";
};

void add_measure_options(CLI::App* cmd, MeasureArgs& m) {
  cmd->add_option("--n", m.n, "dimension")->check(CLI::Range(1, 100000));
  cmd->add_option("--alpha", m.alpha, "exponent of the power potential")->check(CLI::Range(1.0, 1e6));
  cmd->add_option("--lambda", m.lambda, "scaling lambda, or 'isotropic'");
}

Potential measure_potential(const MeasureArgs& m, const QuadraturePlan& plan) {
  if (m.lambda == "isotropic")
    return Potential::power(m.alpha).with_lambda(isotropic_lambda(m.n, Potential::power(m.alpha), plan));
  return Potential::power(m.alpha, detail::parse_number(m.lambda, "--lambda", 0));
}

std::string csv_number(double x) { return format_fixed17(x); }

int run_radial(const MeasureArgs& ma, const std::string& op, const std::vector<double>& at,
               const QuadraturePlan& plan) {
  const auto m = RadialMeasure::normalize(ma.n, measure_potential(ma, plan), plan);
  std::cout << "input,value,log_value\n";
  auto row = [](double input, double log_value) {
    std::cout << csv_number(input) << ',' << csv_number(std::exp(log_value)) << ',' << csv_number(log_value) << '\n';
  };
  if (op == "mode") {
    row(0, std::log(m.mode()));
    return kOk;
  }
  if (at.empty()) throw CLI::ValidationError("--at", "operation '" + op + "' needs --at");
  for (double x : at) {
    if (op == "cdf") {
      row(x, m.log_cdf(x));
    } else if (op == "tail") {
      row(x, m.log_tail(x));
    } else if (op == "density") {
      row(x, m.log_density(x));
    } else if (op == "moment") {
      if (x != std::floor(x) || x < 0) throw DomainError("moment order must be a non-negative integer");
      row(x, m.log_moment(static_cast<int>(x)));
    } else if (op == "tailbound") {
      if (x < m.inv_2n()) throw PreconditionError("tail bound needs r >= phi^-1(2n)");
      row(x, m.log_tail_bound_formula(x));
    } else {  // quantile
      row(x, std::log(m.quantile(x)));
    }
  }
  return kOk;
}

ProfileFn make_profile(const std::string& kind, double alpha, const Potential& p, const QuadraturePlan& plan) {
  if (kind == "iphi") return ProfileFn::i_phi(p, plan);
  if (kind == "lphi") return ProfileFn::l_phi(p);
  if (kind == "lalpha") return ProfileFn::l_alpha(alpha);
  if (kind == "gauss") return ProfileFn::gaussian();
  return ProfileFn::cheeger_linear();
}

// lo:hi:steps, evenly spaced.
std::vector<double> parse_linear_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(text);
  while (std::getline(in, part, ':')) parts.push_back(detail::trim(part));
  if (parts.size() != 3) throw CLI::ValidationError("--a-grid", "expected lo:hi:steps");
  const double lo = detail::parse_number(parts[0], "--a-grid", 0);
  const double hi = detail::parse_number(parts[1], "--a-grid", 0);
  const auto steps = detail::parse_integer(parts[2], "--a-grid", 0);
  if (!(lo >= 0 && lo <= hi && hi <= 1) || steps < 1 || (steps == 1 && lo != hi))
    throw CLI::ValidationError("--a-grid", "needs 0 <= lo <= hi <= 1 and steps >= 1");
  return steps == 1 ? std::vector<double>{lo} : numeric::linspace(lo, hi, static_cast<int>(steps));
}

int run_profile(const std::string& kind, double alpha, const std::string& lambda, const std::string& grid,
                const QuadraturePlan& plan) {
  const Potential p = Potential::power(alpha, detail::parse_number(lambda, "--lambda", 0));
  const auto J = make_profile(kind, alpha, p, plan);
  std::cout << "a,J(a)\n";
  for (double a : parse_linear_grid(grid)) std::cout << csv_number(a) << ',' << csv_number(J(a)) << '\n';
  return kOk;
}

int run_bound(const MeasureArgs& ma, const std::vector<double>& as, const std::string& route,
              const ExperimentConfig& cfg) {
  const auto plan = cfg.plan();
  const Potential p = measure_potential(ma, plan);
  const auto m = RadialMeasure::normalize(ma.n, p, plan);
  const auto ledger = resolve_ledger(cfg, m, p);
  const auto report = check_hypotheses(p, 64, 4 * std::max({1.0, m.r_max(), p.inverse(64.0)}));
  std::optional<TheoremSetup> setup;
  if (route == "auto" || route == "tensor") setup = prepare_theorem(ma.n, p, ledger, plan);
  for (double a : as) {
    const double am = std::min(a, 1.0 - a);
    BoundCertificate cert;
    if (route == "bobkov") {
      cert = bobkov_optimize(m, am, Target::nu);
    } else if (route == "big") {
      cert = prop_nu_big(m, am, ledger);
    } else if (route == "small") {
      cert = prop_small(m, am, ledger.value("c_split"), report.h2.holds() ? SmallRegime::h2 : SmallRegime::h0,
                        ledger, &report);
    } else if (route == "tensor") {
      cert = tensorized_original(*setup, am, ledger);
    } else {
      cert = theorem_mualpha(*setup, a, ledger);
    }
    cert.a = a;
    std::cout << cert.to_json().dump() << '\n';
  }
  return kOk;
}

int run_witness(const MeasureArgs& ma, const std::vector<double>& as, const QuadraturePlan& plan) {
  const auto m = RadialMeasure::normalize(ma.n, measure_potential(ma, plan), plan);
  std::cout << "family,parameter,perimeter\n";
  for (double a : as) {
    for (const auto& w : {ball_witness(m, a), halfspace_witness(m, a)})
      std::cout << to_string(w.family) << ',' << csv_number(w.parameter) << ',' << csv_number(w.perimeter) << '\n';
  }
  return kOk;
}

int run_sample(const MeasureArgs& ma, std::size_t count, std::uint64_t seed, const std::string& out,
               const QuadraturePlan& plan) {
  const auto m = RadialMeasure::normalize(ma.n, measure_potential(ma, plan), plan);
  const auto s = sample(m, count, seed);
  std::ofstream file;
  if (!out.empty() && out != "-") {
    file.open(out);
    if (!file) throw std::runtime_error("cannot write '" + out + "'");
  }
  std::ostream& o = file.is_open() ? file : std::cout;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto x = s.point(i);
    for (std::size_t k = 0; k < x.size(); ++k) o << (k ? " " : "") << csv_number(x[k]);
    o << '\n';
  }
  return kOk;
}

int run_sweep_cmd(const ExperimentConfig& cfg, bool quiet) {
  const auto result = run_sweep(cfg);
  write_sweep(result, cfg, cfg.output_dir);
  if (!quiet) {
    std::size_t valid = 0;
    for (const auto& b : result.bounds) valid += b.valid;
    std::cout << "wrote " << result.bounds.size() << " bound rows (" << valid << " valid) and "
              << result.checks.size() << " checks to " << cfg.output_dir << "\n";
    for (const auto& c : result.checks)
      if (!c.pass)
        std::cout << "FAIL " << c.check << " alpha=" << format_double(c.alpha) << " n=" << c.n
                  << (c.a ? " a=" + format_double(*c.a) : std::string()) << " slack=" << format_double(c.slack)
                  << "\n";
  }
  return result.ok() ? kOk : kCheckFailed;
}

int run_verify_cmd(const ExperimentConfig& cfg, bool quiet) {
  const auto report = verify_paper(cfg);
  std::filesystem::create_directories(cfg.output_dir);
  const std::filesystem::path dir(cfg.output_dir);
  std::ofstream(dir / "report.md") << report.markdown();
  std::ofstream(dir / "report.csv") << report.csv();
  if (!quiet) std::cout << report.markdown();
  return report.ok() ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"isoperimetric profile bounds for spherically symmetric log-concave measures"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir;
  bool quiet = false;
  app.add_option("--config", config_path, "experiment config file")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory (overrides output.dir)");
  app.add_flag("--quiet", quiet, "suppress progress output");

  MeasureArgs radial_args, bound_args, witness_args, sample_args;
  std::string radial_op = "cdf";
  std::vector<double> radial_at;
  auto* radial = app.add_subcommand("radial", "radial law nu_{n,phi}");
  add_measure_options(radial, radial_args);
  radial->add_option("--op", radial_op, "operation")
      ->check(CLI::IsMember({"cdf", "tail", "density", "mode", "moment", "tailbound", "quantile"}));
  radial->add_option("--at", radial_at, "evaluation points (moment order for --op moment)");

  std::string profile_kind = "iphi";
  double profile_alpha = 2.0;
  std::string profile_lambda = "1";
  std::string profile_grid = "0:1:101";
  auto* profile = app.add_subcommand("profile", "one-dimensional profiles J(a)");
  profile->add_option("--kind", profile_kind)->check(CLI::IsMember({"iphi", "lphi", "lalpha", "gauss", "cheeger"}));
  profile->add_option("--alpha", profile_alpha)->check(CLI::Range(1.0, 1e6));
  profile->add_option("--lambda", profile_lambda);
  profile->add_option("--a-grid", profile_grid, "lo:hi:steps, evenly spaced");

  std::vector<double> bound_a{0.1};
  std::string bound_route = "auto";
  auto* bound = app.add_subcommand("bound", "lower-bound certificates as JSON lines");
  add_measure_options(bound, bound_args);
  bound->add_option("--a", bound_a, "probabilities in (0, 1)")->check(CLI::Range(0.0, 1.0));
  bound->add_option("--route", bound_route)->check(CLI::IsMember({"auto", "bobkov", "big", "small", "tensor"}));

  std::vector<double> witness_a{0.1};
  auto* witness = app.add_subcommand("witness", "ball and half-space upper bounds");
  add_measure_options(witness, witness_args);
  witness->add_option("--a", witness_a, "probabilities in (0, 1)")->check(CLI::Range(0.0, 1.0));

  std::size_t sample_count = 1000;
  std::uint64_t sample_seed = 12345;
  std::string sample_out;
  auto* sampler = app.add_subcommand("sample", "draw points of mu_{n,phi}");
  add_measure_options(sampler, sample_args);
  sampler->add_option("--count", sample_count)->check(CLI::PositiveNumber);
  sampler->add_option("--seed", sample_seed);
  sampler->add_option("--out", sample_out, "output file (default stdout)");

  auto* sweep = app.add_subcommand("sweep", "run the config grid and write bounds/checks/constants");
  auto* verify = app.add_subcommand("verify-paper", "statement-by-statement verification report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    ExperimentConfig cfg = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    const auto plan = cfg.plan();
    if (*radial) return run_radial(radial_args, radial_op, radial_at, plan);
    if (*profile) return run_profile(profile_kind, profile_alpha, profile_lambda, profile_grid, plan);
    if (*bound) return run_bound(bound_args, bound_a, bound_route, cfg);
    if (*witness) return run_witness(witness_args, witness_a, plan);
    if (*sampler) return run_sample(sample_args, sample_count, sample_seed, sample_out, plan);
    if (*sweep) return run_sweep_cmd(cfg, quiet);
    if (*verify) return run_verify_cmd(cfg, quiet);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const CLI::Error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const DomainError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const PreconditionError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumeric;
  }
  return kUsage;
}
