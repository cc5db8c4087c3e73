// Command-line front end: solve / verify / sweep / kernel-table / evaluate.
// Exit codes: 0 success, 1 validation error, 2 numerical failure,
// 3 check failure.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "fhslab/config.hpp"
#include "fhslab/kernel_table.hpp"
#include "fhslab/optimizer.hpp"
#include "fhslab/serialize.hpp"
#include "fhslab/verify.hpp"
#include "fhslab/version.hpp"

namespace fs = std::filesystem;
using namespace fhslab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitCheckFailed = 3;

struct CliState {
  std::string config_path;
  std::vector<std::string> overrides;  // section.key=value
  std::string output_dir;
};

RunConfig build_config(const CliState& st) {
  RunConfig cfg;
  if (!st.config_path.empty()) cfg = load_config(st.config_path);
  if (const char* env = std::getenv("FHSLAB_OUT"); env && cfg.output_dir == "out")
    cfg.output_dir = env;
  for (const auto& ov : st.overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos)
      throw ConfigError("override must look like section.key=value: " + ov);
    apply_override(cfg, ov.substr(0, eq), ov.substr(eq + 1));
  }
  if (!st.output_dir.empty()) cfg.output_dir = st.output_dir;
  cfg.validate();
  return cfg;
}

EngineOptions engine_of(const RunConfig& cfg) {
  EngineOptions eng;
  eng.threads = cfg.threads;
  return eng;
}

int cmd_solve(const CliState& st) {
  const RunConfig cfg = build_config(st);
  const ProblemParams pp = cfg.params();
  if (pp.evaluation_only) {
    std::cerr << "solve: alpha = p*s is evaluation-only mode (q = p admits no "
                 "minimizer); adjust [params]\n";
    return kExitValidation;
  }
  const std::string digest = config_digest(cfg);
  OptimizerOptions opt;
  opt.max_iter = cfg.max_iter;
  opt.tol = cfg.tol;
  opt.init = cfg.init;
  opt.lambda = cfg.lambda;
  opt.seed = cfg.seed;
  opt.engine = engine_of(cfg);

  const MinimizerResult res = minimize(pp, cfg.grid(), opt);
  fs::create_directories(cfg.output_dir);
  save_profile(cfg.output_dir + "/profile.json", res.profile, pp, digest);
  write_text_file(cfg.output_dir + "/trace.csv", trace_to_csv(res.trace, digest));
  write_text_file(cfg.output_dir + "/summary.json",
                  minimizer_summary_json(res, pp, digest));
  std::cout << "I1 estimate " << res.I1_estimate << " after " << res.iterations
            << " iterations (" << (res.converged ? "converged" : "not converged")
            << "); outputs in " << cfg.output_dir << "\n";
  return res.converged ? kExitOk : kExitNumerical;
}

int cmd_verify(const CliState& st, const std::string& profile_arg) {
  const RunConfig cfg = build_config(st);
  const ProblemParams pp = cfg.params();
  const std::string digest = config_digest(cfg);
  const EngineOptions eng = engine_of(cfg);

  RadialProfile u;
  if (profile_arg == "extremal") {
    u = candidate_extremal(pp, cfg.grid());
  } else {
    u = load_profile(profile_arg);
  }

  const auto override_or = [&](const std::string& key, const std::string& dflt) {
    auto it = cfg.overrides.find(key);
    return it == cfg.overrides.end() ? dflt : it->second;
  };

  std::vector<VerificationReport> reports;
  for (const auto& name : cfg.checks) {
    try {
      if (name == "monotonicity") {
        reports.push_back(monotonicity_check(u));
      } else if (name == "decay") {
        const double lo = std::stod(override_or("decay.r_lo",
                                                std::to_string(cfg.r_max / 100.0)));
        const double hi = std::stod(override_or("decay.r_hi",
                                                std::to_string(cfg.r_max)));
        const double tol = std::stod(override_or("decay.rel_tol", "0.05"));
        reports.push_back(check_decay(u, pp, lo, hi, tol, eng));
      } else if (name == "gamma_sweep") {
        const auto gammas = parse_double_list(
            override_or("gamma_sweep.gammas", "0.8,1.0,1.5,2.0"));
        std::vector<double> radii;
        for (const auto& tok :
             parse_double_list(override_or("gamma_sweep.radii",
                                           "10,31.6,100,316,1000,3160,10000")))
          if (tok < cfg.r_max * (1.0 + 1e-12)) radii.push_back(tok);
        reports.push_back(gamma_sweep(u, pp, gammas, radii, eng));
      } else if (name == "dyadic_layers") {
        const auto gammas =
            parse_double_list(override_or("dyadic_layers.gammas", "1.5,2.0"));
        for (double g : gammas)
          reports.push_back(dyadic_layer_check(u, pp, g, 0.1, eng));
      } else if (name == "hardy_chain") {
        reports.push_back(hardy_chain_check(u, pp));
      } else if (name == "summability_scaling") {
        const double r = std::stod(override_or("summability_scaling.r", "1.2"));
        reports.push_back(summability_scale_check(u, pp, r, eng));
      } else if (name == "besov_regularity") {
        reports.push_back(besov_regularity_check(u, pp, eng));
      } else if (name == "interpolation_scaling") {
        const double tau = std::stod(override_or("interpolation_scaling.tau",
                                                 std::to_string(pp.s + 0.1)));
        const double mu = std::stod(override_or("interpolation_scaling.mu", "0.3"));
        const double g = std::stod(override_or("interpolation_scaling.gamma",
                                               std::to_string(0.75 * pp.p)));
        const RadialProfile trunc = u.truncated_above(1.0);
        reports.push_back(interpolation_scaling_check(trunc, pp, tau, mu, g, eng));
      } else if (name == "cutoff_bounds") {
        const double g = std::stod(override_or("cutoff_bounds.gamma",
                                               std::to_string(pp.p)));
        reports.push_back(cutoff_bound_check(pp.N, g, pp.s, 1.0, cfg.grid(),
                                             false, eng));
      }
    } catch (const std::exception& e) {
      VerificationReport rep;
      rep.name = name;
      rep.verdict = "fail";
      rep.notes = std::string("check aborted: ") + e.what();
      reports.push_back(std::move(rep));
    }
  }

  fs::create_directories(cfg.output_dir);
  write_text_file(cfg.output_dir + "/reports.json",
                  reports_to_json(reports, digest));
  bool any_fail = false;
  for (const auto& rep : reports) {
    if (!rep.rows.empty())
      write_text_file(cfg.output_dir + "/check_" + rep.name + ".csv",
                      report_rows_to_csv(rep, digest));
    std::cout << rep.name << ": " << rep.verdict;
    if (!rep.notes.empty()) std::cout << "  (" << rep.notes << ")";
    std::cout << "\n";
    any_fail |= rep.failed();
  }
  return any_fail ? kExitCheckFailed : kExitOk;
}

int cmd_sweep(const CliState& st, const std::string& profile_arg) {
  CliState st2 = st;
  RunConfig cfg = build_config(st);
  cfg.checks = {"gamma_sweep"};
  // forward through the verify runner with only the sweep enabled
  st2.overrides.push_back("checks.names=gamma_sweep");
  return cmd_verify(st2, profile_arg);
}

int cmd_kernel_table(const CliState& st, double beta, const std::string& out) {
  const RunConfig cfg = build_config(st);
  if (!(beta > 0.0 && beta < 2.0)) {
    std::cerr << "kernel-table: beta must lie in ]0,2[\n";
    return kExitValidation;
  }
  const KernelTable table(cfg.N, beta, cfg.grid());
  fs::create_directories(fs::path(out).parent_path().empty()
                             ? "."
                             : fs::path(out).parent_path().string());
  table.save(out);
  std::cout << "kernel table " << table.size() << "^2 entries (N=" << cfg.N
            << ", beta=" << beta << ") written to " << out << "\n";
  return kExitOk;
}

int cmd_evaluate(const CliState& st, const std::string& profile_arg) {
  const RunConfig cfg = build_config(st);
  const ProblemParams pp = cfg.params();
  const std::string digest = config_digest(cfg);
  RadialProfile u = profile_arg == "extremal" ? candidate_extremal(pp, cfg.grid())
                                              : load_profile(profile_arg);
  const FunctionalReport rep = functional_report(u, pp, engine_of(cfg));
  double weak = 0.0;
  try {
    weak = weak_lq_quasinorm(u, pp.N, pp.pstar / (pp.p / (pp.p - 1.0)));
  } catch (const std::exception&) {
  }
  fs::create_directories(cfg.output_dir);
  const std::string text = functional_report_to_json(rep, digest, weak);
  write_text_file(cfg.output_dir + "/functionals.json", text);
  std::cout << text;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for fractional Hardy-Sobolev optimizers"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  CliState st;
  app.add_option("--config,-c", st.config_path, "experiment config file");
  app.add_option("--set", st.overrides,
                 "override a config value (section.key=value)");
  app.add_option("--out,-o", st.output_dir, "output directory");

  auto* solve = app.add_subcommand("solve", "minimize the Rayleigh quotient");

  std::string profile_arg = "extremal";
  auto* verify = app.add_subcommand("verify", "run verification checks");
  verify->add_option("profile", profile_arg,
                     "profile JSON path or 'extremal'");

  std::string sweep_profile = "extremal";
  auto* sweep = app.add_subcommand("sweep", "gamma threshold sweep");
  sweep->add_option("profile", sweep_profile, "profile JSON path or 'extremal'");

  double beta = 1.0;
  std::string table_out = "kernel_table.bin";
  auto* ktab = app.add_subcommand("kernel-table", "precompute a kernel table");
  ktab->add_option("--beta", beta, "kernel exponent in ]0,2[")->required();
  ktab->add_option("--table-out", table_out, "output file");

  std::string eval_profile = "extremal";
  auto* eval = app.add_subcommand("evaluate", "one-shot functional report");
  eval->add_option("profile", eval_profile, "profile JSON path or 'extremal'");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return cmd_solve(st);
    if (verify->parsed()) return cmd_verify(st, profile_arg);
    if (sweep->parsed()) return cmd_sweep(st, sweep_profile);
    if (ktab->parsed()) return cmd_kernel_table(st, beta, table_out);
    if (eval->parsed()) return cmd_evaluate(st, eval_profile);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ParamError& e) {
    std::cerr << "parameter error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}
