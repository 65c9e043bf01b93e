#include "verify_suites.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "kslog/diagnostics.hpp"
#include "kslog/semigroup.hpp"
#include "kslog/stepper.hpp"
#include "kslog/sweep.hpp"

namespace kslog::verify {

namespace {

RunResult desk_run() {
  ModelParams params;  // chi=0.5, k=alpha=beta=c=1, dim=2
  const Grid grid = Grid::rectangle(1.0, 1.0, 48, 48);
  IcRecipe ic;  // default gaussian bump
  auto [u0, v0] = make_initial_conditions(ic, grid, params);
  StepperConfig config;
  config.t_end = 1.0;
  config.snapshot_every = 0.05;
  return simulate(u0, v0, params, config);
}

SuiteResult suite_mass(std::uint64_t) {
  const RunResult run = desk_run();
  const double m0 = run.series.front().mass;
  const double drift = std::abs(run.series.back().mass - m0) / m0;
  std::ostringstream os;
  os << "relative mass drift " << drift << " over t=" << run.t_final;
  nlohmann::json data = {{"mass_drift", drift}, {"t_final", run.t_final}};
  return {"mass", run.termination == Termination::Completed && drift < 1e-10,
          os.str(), std::move(data)};
}

SuiteResult suite_positivity(std::uint64_t seed) {
  const RunResult run = desk_run();
  bool pass = run.min_u_seen >= 0.0 && run.min_v_seen >= 0.0;

  // upwinding never drains an empty cell
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const Grid g = Grid::interval(1.0, 16);
  for (int trial = 0; trial < 200 && pass; ++trial) {
    Field u(g), v(g);
    for (int i = 0; i < g.nx(); ++i) {
      u[i] = unif(rng);
      v[i] = unif(rng);
    }
    const int hole = static_cast<int>(unif(rng) * g.nx()) % g.nx();
    u[hole] = 0.0;
    const Field div = chemotaxis_divergence(u, v, 0.7, 0.5);
    if (-div[hole] < -1e-14) pass = false;
  }
  std::ostringstream os;
  os << "min u " << run.min_u_seen << ", min v " << run.min_v_seen
     << ", empty-cell upwind trials ok";
  nlohmann::json data = {{"min_u", run.min_u_seen}, {"min_v", run.min_v_seen}};
  return {"positivity", pass, os.str(), std::move(data)};
}

SuiteResult suite_mms(std::uint64_t) {
  ModelParams params;
  params.chi = 0.0;
  params.dim = 1;
  const std::vector<int> levels = {32, 64, 128};
  const MmsReport rep = mms_convergence(levels, params, 0.05, 5e-7);
  const double worst =
      std::min({rep.order_u.front(), rep.order_u.back(), rep.order_v.front(),
                rep.order_v.back()});
  std::ostringstream os;
  os << "observed orders u=[" << rep.order_u[0] << "," << rep.order_u[1]
     << "] v=[" << rep.order_v[0] << "," << rep.order_v[1] << "]";
  nlohmann::json data = {{"levels", levels},
                         {"orders_u", rep.order_u},
                         {"orders_v", rep.order_v},
                         {"errors_u", rep.err_u}};
  return {"mms", worst >= 1.9, os.str(), std::move(data)};
}

SuiteResult suite_smoothing(std::uint64_t) {
  const Grid g = Grid::interval(1.0, 128);
  const std::vector<Field> modes = smoothing_test_set(g, 0, 4, false, 0);
  const std::vector<double> ts = log_time_grid(1e-3, 10.0, 40);
  const double inf = std::numeric_limits<double>::infinity();
  const SmoothingReport rep = measure_smoothing_constant(
      SmoothingEstimate::GradientDecay, inf, inf, 0.0, 1.0, modes, ts);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const bool nu_ok = std::abs(rep.nu - pi2) < 1e-12;
  std::ostringstream os;
  os << "measured constant " << rep.constant << ", refinement ratio "
     << rep.ratio << ", nu " << rep.nu;
  nlohmann::json data = {{"estimate", "gradient_decay"},
                         {"p", "inf"},
                         {"q", "inf"},
                         {"k", 1.0},
                         {"grid_cells", g.nx()},
                         {"modes", 4},
                         {"t_range", {1e-3, 10.0}},
                         {"constant", rep.constant},
                         {"refined", rep.refined},
                         {"refinement_ratio", rep.ratio},
                         {"nu", rep.nu}};
  return {"smoothing", rep.pass && nu_ok, os.str(), std::move(data)};
}

SuiteResult suite_holder(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 4.0);
  const Grid g = Grid::rectangle(1.0, 1.0, 16, 16);
  bool pass = true;
  for (int trial = 0; trial < 200 && pass; ++trial) {
    Field u(g), v(g);
    for (int i = 0; i < u.size(); ++i) {
      u[i] = unif(rng);
      v[i] = unif(rng);
    }
    const double p = 1.0 + unif(rng);
    if (!holder_interpolation_check(u, v, p, 1.0).pass) pass = false;
  }
  const HolderCheck eq = holder_interpolation_check(Field(g, 2.0), Field(g, 3.0), 2.0, 1.0);
  const bool equality = std::abs(eq.lhs - eq.rhs) <= 1e-12 * eq.rhs;
  std::ostringstream os;
  os << "200 random pairs pass, constant-field equality gap "
     << std::abs(eq.lhs - eq.rhs);
  nlohmann::json data = {{"trials", 200},
                         {"constant_field_gap", std::abs(eq.lhs - eq.rhs)},
                         {"seed", seed}};
  return {"holder", pass && equality, os.str(), std::move(data)};
}

}  // namespace

std::vector<std::string> suite_names() {
  return {"mass", "positivity", "mms", "smoothing", "holder"};
}

SuiteResult run_suite(const std::string& name, std::uint64_t seed) {
  if (name == "mass") return suite_mass(seed);
  if (name == "positivity") return suite_positivity(seed);
  if (name == "mms") return suite_mms(seed);
  if (name == "smoothing") return suite_smoothing(seed);
  if (name == "holder") return suite_holder(seed);
  throw std::invalid_argument("unknown verify suite '" + name + "'");
}

}  // namespace kslog::verify
