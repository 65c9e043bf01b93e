#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "kslog/run_config.hpp"
#include "kslog/semigroup.hpp"
#include "kslog/sweep.hpp"
#include "verify_suites.hpp"

namespace {

using namespace kslog;

std::filesystem::path resolve_out_dir(const std::string& flag_value,
                                      const RunConfig& cfg) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("KSLOG_OUTPUT_DIR")) return env;
  return cfg.out_dir;
}

int cmd_region(double chi, double k, int dim) {
  ModelParams params;
  params.chi = chi;
  params.k = k;
  params.dim = dim;
  params.validate_analysis();

  const Thresholds t = thresholds(dim, k);
  const RegionVerdict v = classify_region(params);
  std::printf("chi = %g, k = %g, N = %d\n", chi, k, dim);
  std::printf("thresholds: k1 = %.12g, k2 = %.12g, chi1 = %.12g, chi2 = %.12g\n",
              t.k1, t.k2, t.chi1, t.chi2);
  std::printf("verdict: %s (I+(N/2): %s, I+(N): %s, hypotheses hold: %s)\n",
              to_string(v.label), v.in_iplus_half_n ? "yes" : "no",
              v.in_iplus_n ? "yes" : "no", v.theorem_applies ? "yes" : "no");
  if (v.in_iplus_half_n) {
    const PInterval iv = admissible_p_interval(params);
    std::printf("admissible p interval: (%.12g, %s)\n", iv.lo, iv.hi.str().c_str());
    const ExtReal q_up = gradv_q_upper(params);
    std::printf("grad-v exponent bound: %s\n", q_up.str().c_str());
    if (v.label == RegionLabel::BorderRegion) {
      const double n = static_cast<double>(dim);
      const double shift = chi - (k - 1.0) / 2.0;
      const double gap = 2.0 / n - shift * shift / k;
      const double mu1 = 0.5 * (n / 2.0 + 1.0 / gap);
      std::printf("bootstrap demo (mu1 = %.6g):", mu1);
      for (const ExtReal& mu : bootstrap_sequence(mu1, params))
        std::printf(" %s", mu.str().c_str());
      std::printf("\n");
    }
  } else {
    std::printf("admissible p interval: empty\n");
  }
  return 0;
}

void apply_overrides(const CLI::App* cmd, RunConfig& cfg) {
  auto set = [&](const char* flag, auto fn) {
    const CLI::Option* opt = cmd->get_option_no_throw(flag);
    if (opt && opt->count() > 0) fn(opt->as<double>());
  };
  set("--chi", [&](double v) { cfg.model.chi = v; cfg.use_raw = false; });
  set("--k", [&](double v) { cfg.model.k = v; cfg.use_raw = false; });
  set("--alpha", [&](double v) { cfg.model.alpha = v; cfg.use_raw = false; });
  set("--beta", [&](double v) { cfg.model.beta = v; cfg.use_raw = false; });
  set("--t-end", [&](double v) { cfg.stepper.t_end = v; });
  set("--dt0", [&](double v) { cfg.stepper.dt0 = v; });
  const CLI::Option* nx = cmd->get_option_no_throw("--nx");
  if (nx && nx->count() > 0) cfg.nx = cfg.ny = nx->as<int>();
  const CLI::Option* seed = cmd->get_option_no_throw("--seed");
  if (seed && seed->count() > 0) cfg.seed = seed->as<std::uint64_t>();
}

int cmd_simulate(const std::string& config_path, const CLI::App* cmd,
                 const std::string& out_flag) {
  RunConfig cfg = RunConfig::parse_file(config_path);
  apply_overrides(cmd, cfg);
  const std::filesystem::path out = resolve_out_dir(out_flag, cfg);
  const RunResult result = execute_run(cfg, out);
  std::printf("termination: %s at t = %.6g (%lld steps, peak sup u %.6g)\n",
              to_string(result.termination), result.t_final,
              result.accepted_steps, result.peak_sup_u);
  std::printf("outputs in %s\n", out.string().c_str());
  switch (result.termination) {
    case Termination::Completed: return 0;
    case Termination::BlowUpDetected: return 2;
    case Termination::DtUnderflow: return 3;
  }
  return 0;
}

int cmd_sweep(const std::string& spec_path, const CLI::App* cmd,
              const std::string& out_flag) {
  RunConfig cfg = RunConfig::parse_file(spec_path);
  const CLI::Option* par = cmd->get_option_no_throw("--parallelism");
  if (par && par->count() > 0) cfg.parallelism = par->as<int>();
  const std::filesystem::path out = resolve_out_dir(out_flag, cfg);

  const SweepResult sweep = run_sweep(cfg.make_sweep_spec());
  emit_region_map(sweep, out);

  int counts[5] = {0, 0, 0, 0, 0};
  for (const SweepEntry& e : sweep.entries) {
    if (!e.ok) ++counts[4];
    else ++counts[static_cast<int>(e.outcome)];
  }
  std::printf("sweep: %zu points (%d bounded, %d growing, %d blowup, "
              "%d underflow, %d errors)\n",
              sweep.entries.size(), counts[0], counts[1], counts[2], counts[3],
              counts[4]);
  std::printf("map written to %s\n", out.string().c_str());
  return 0;
}

int cmd_picard(const std::string& config_path, double T, int iters,
               const std::string& out_flag) {
  RunConfig cfg = RunConfig::parse_file(config_path);
  const ModelParams params = cfg.effective_params();
  const Grid grid = cfg.make_grid();
  auto [u0, v0] = make_initial_conditions(cfg.ic, grid, params);

  const PicardResult res = picard_solve(u0, v0, params, T, iters);

  nlohmann::json report;
  report["T"] = T;
  report["iterations"] = res.diffs.size();
  report["params"] = {{"chi", params.chi}, {"k", params.k},
                      {"alpha", params.alpha}, {"beta", params.beta},
                      {"c", params.c}, {"dim", params.dim}};
  report["grid"] = {{"nx", grid.nx()}, {"ny", grid.ny()}, {"lx", grid.lx()}};
  report["diffs"] = res.diffs;
  report["ratios"] = res.ratios;

  const std::filesystem::path out = resolve_out_dir(out_flag, cfg);
  std::filesystem::create_directories(out);
  std::ofstream js(out / "picard.json");
  js << report.dump(2) << '\n';

  std::printf("picard: %zu iterations on [0, %g]\n", res.diffs.size(), T);
  for (size_t i = 0; i < res.ratios.size(); ++i)
    std::printf("  d%zu = %.3e, ratio %.3f\n", i + 2, res.diffs[i + 1],
                res.ratios[i]);
  std::printf("report in %s\n", (out / "picard.json").string().c_str());
  return 0;
}

int cmd_verify(const std::string& suite, std::uint64_t seed,
               const std::string& out_flag) {
  std::vector<std::string> names;
  if (suite == "all") names = verify::suite_names();
  else names.push_back(suite);

  bool all_pass = true;
  nlohmann::json report;
  std::printf("%-12s %-6s %s\n", "suite", "result", "detail");
  for (const std::string& name : names) {
    const verify::SuiteResult res = verify::run_suite(name, seed);
    all_pass = all_pass && res.pass;
    std::printf("%-12s %-6s %s\n", res.name.c_str(), res.pass ? "PASS" : "FAIL",
                res.detail.c_str());
    report[res.name] = {{"pass", res.pass}, {"measurements", res.measurements}};
  }
  std::string out = out_flag;
  if (out.empty())
    if (const char* env = std::getenv("KSLOG_OUTPUT_DIR")) out = env;
  if (!out.empty()) {
    std::filesystem::create_directories(out);
    std::ofstream js(std::filesystem::path(out) / "verify_report.json");
    js << report.dump(2) << '\n';
  }
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "kslog: finite-volume simulator and analysis toolkit for a chemotaxis "
      "system with saturated logarithmic sensitivity"};
  app.require_subcommand(1);
  app.footer(
      "Config file keys (flat key = value under section headers):\n"
      "  [model]   chi, k, alpha, beta, c, dim, use_raw, d1, d2, chi0, c1, c2\n"
      "  [grid]    lx, ly, nx, ny\n"
      "  [stepper] dt0, t_end, cfl_safety, dt_min, blowup_factor,\n"
      "            snapshot_every, scheme (imex|explicit)\n"
      "  [ic]      kind (constant|gaussian_bump|cosine_mode|from_file),\n"
      "            value, amplitude, width, mode, u_file, v_file\n"
      "  [diagnostics] p_list, q_list (comma lists, 'inf' allowed, or 'auto')\n"
      "  [output]  dir (overridden by --out, then KSLOG_OUTPUT_DIR)\n"
      "  [run]     seed\n"
      "  [sweep]   chi_grid, k_grid, parallelism, window\n"
      "Exit codes for simulate: 0 completed, 2 numerical blow-up indicator,\n"
      "3 time-step underflow, 1 validation or usage error.");

  double chi = 0.5, k = 1.0;
  int dim = 2;
  CLI::App* region = app.add_subcommand(
      "region", "Classify (chi, k, N) against the global-existence region");
  region->add_option("--chi", chi, "chemotactic coefficient")->required();
  region->add_option("--k", k, "chemical diffusion ratio")->required();
  region->add_option("--dim", dim, "spatial dimension N");

  std::string config_path, out_flag;
  CLI::App* simulate = app.add_subcommand("simulate", "Run one simulation");
  simulate->add_option("--config", config_path, "run configuration file")
      ->required()->check(CLI::ExistingFile);
  simulate->add_option("--out", out_flag,
                       "output directory (overrides config and KSLOG_OUTPUT_DIR)");
  simulate->add_option("--chi", "override model chi");
  simulate->add_option("--k", "override model k");
  simulate->add_option("--alpha", "override model alpha");
  simulate->add_option("--beta", "override model beta");
  simulate->add_option("--t-end", "override stepper t_end");
  simulate->add_option("--dt0", "override stepper dt0");
  simulate->add_option("--nx", "override grid resolution (both axes)");
  simulate->add_option("--seed", "override run seed");

  std::string spec_path, sweep_out;
  CLI::App* sweep = app.add_subcommand("sweep", "Run a (chi, k) parameter sweep");
  sweep->add_option("--spec", spec_path, "sweep specification file")
      ->required()->check(CLI::ExistingFile);
  sweep->add_option("--out", sweep_out, "output directory");
  sweep->add_option("--parallelism", "override worker count");

  std::string picard_config, picard_out;
  double picard_T = 0.01;
  int picard_iters = 8;
  CLI::App* picard = app.add_subcommand(
      "picard", "Fixed-point iteration of the integral formulation");
  picard->add_option("--config", picard_config, "run configuration file")
      ->required()->check(CLI::ExistingFile);
  picard->add_option("--T", picard_T, "slab length");
  picard->add_option("--iters", picard_iters, "iteration count");
  picard->add_option("--out", picard_out, "output directory");

  std::string suite = "all", verify_out;
  std::uint64_t seed = 20240801;
  CLI::App* verify_cmd =
      app.add_subcommand("verify", "Run named property suites");
  verify_cmd->add_option("--suite", suite,
                         "suite name (mass|positivity|mms|smoothing|holder|all)");
  verify_cmd->add_option("--seed", seed, "seed for randomized suites");
  verify_cmd->add_option("--out", verify_out,
                         "directory for verify_report.json (measured values)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // 0 for --help/--version
    return code == 0 ? 0 : 1;
  }

  try {
    if (region->parsed()) return cmd_region(chi, k, dim);
    if (simulate->parsed()) return cmd_simulate(config_path, simulate, out_flag);
    if (sweep->parsed()) return cmd_sweep(spec_path, sweep, sweep_out);
    if (picard->parsed())
      return cmd_picard(picard_config, picard_T, picard_iters, picard_out);
    if (verify_cmd->parsed()) return cmd_verify(suite, seed, verify_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
