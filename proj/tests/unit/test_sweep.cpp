#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "kslog/sweep.hpp"

using namespace kslog;
namespace fs = std::filesystem;

namespace {

RunResult synthetic_run(std::vector<double> sup_u, Termination term) {
  RunResult run;
  run.termination = term;
  run.t_final = static_cast<double>(sup_u.size() - 1);
  const Grid g = Grid::interval(1.0, 4);
  for (size_t i = 0; i < sup_u.size(); ++i) {
    DiagRecord rec;
    rec.t = static_cast<double>(i);
    rec.sup_u = sup_u[i];
    run.series.push_back(rec);
  }
  run.final_state = SimState{Field(g, 1.0), Field(g, 1.0), run.t_final};
  return run;
}

SweepSpec small_spec() {
  SweepSpec spec;
  spec.chi_grid = {0.4, 0.9};
  spec.k_grid = {1.0};
  spec.base.dim = 2;
  spec.grid = Grid::rectangle(1.0, 1.0, 16, 16);
  spec.config.t_end = 0.3;
  spec.config.snapshot_every = 0.05;
  spec.parallelism = 2;
  return spec;
}

}  // namespace

TEST_SUITE_BEGIN("sweep");

TEST_CASE("initial condition recipes") {
  ModelParams params;
  params.beta = 2.0;  // v level 2
  const Grid g = Grid::rectangle(1.0, 1.0, 32, 32);

  IcRecipe bump;
  auto [u_bump, v_bump] = make_initial_conditions(bump, g, params);
  CHECK(integrate(u_bump) == doctest::Approx(g.volume()).epsilon(1e-12));
  CHECK(u_bump.min() >= 0.0);
  CHECK(v_bump.max() == doctest::Approx(2.0));
  CHECK(v_bump.min() == doctest::Approx(2.0));

  IcRecipe constant;
  constant.kind = IcKind::Constant;
  constant.value = 1.5;
  auto [u_const, v_const] = make_initial_conditions(constant, g, params);
  CHECK(u_const.max() == 1.5);
  CHECK(u_const.min() == 1.5);

  IcRecipe cosine;
  cosine.kind = IcKind::CosineMode;
  cosine.amplitude = 0.5;
  cosine.mode = 2;
  auto [u_cos, v_cos] = make_initial_conditions(cosine, g, params);
  CHECK(u_cos.min() >= 0.0);
  CHECK(integrate(u_cos) == doctest::Approx(g.volume()).epsilon(1e-10));

  IcRecipe overdriven = cosine;
  overdriven.amplitude = 1.5;
  CHECK_THROWS(make_initial_conditions(overdriven, g, params));

  const fs::path dir = fs::temp_directory_path() / "kslog_sweep_ic";
  fs::create_directories(dir);
  write_binary(u_bump, dir / "u.bin");
  write_binary(v_bump, dir / "v.bin");
  IcRecipe from_file;
  from_file.kind = IcKind::FromFile;
  from_file.u_file = (dir / "u.bin").string();
  from_file.v_file = (dir / "v.bin").string();
  auto [u_file, v_file] = make_initial_conditions(from_file, g, params);
  for (int i = 0; i < u_file.size(); ++i) CHECK(u_file[i] == u_bump[i]);
  fs::remove_all(dir);
}

TEST_CASE("outcome classification") {
  CHECK(classify_outcome(synthetic_run({1, 1, 1, 1, 1}, Termination::Completed), 0.5) ==
        Outcome::Bounded);
  CHECK(classify_outcome(synthetic_run({1, 2, 4, 8, 16}, Termination::Completed), 0.5) ==
        Outcome::Growing);
  CHECK(classify_outcome(synthetic_run({1, 2, 2, 2.05, 2.02}, Termination::Completed),
                         0.5) == Outcome::Bounded);
  CHECK(classify_outcome(synthetic_run({1, 5}, Termination::BlowUpDetected), 0.5) ==
        Outcome::NumericalBlowup);
  CHECK(classify_outcome(synthetic_run({1, 5}, Termination::DtUnderflow), 0.5) ==
        Outcome::DtUnderflow);
  CHECK_THROWS(classify_outcome(synthetic_run({1, 1}, Termination::Completed), 0.0));
}

TEST_CASE("single-point sweep lands in the strong region") {
  SweepSpec spec = small_spec();
  spec.chi_grid = {0.5};
  const SweepResult res = run_sweep(spec);
  REQUIRE(res.entries.size() == 1);
  const SweepEntry& e = res.entries[0];
  CHECK(e.ok);
  CHECK(e.outcome == Outcome::Bounded);
  CHECK(e.verdict.label == RegionLabel::StrongRegion);
  CHECK(e.verdict.theorem_applies);
  CHECK(e.peak_sup_u > 0.0);
}

TEST_CASE("sweep reproducibility and verdict consistency at k = 1") {
  const SweepSpec spec = small_spec();
  const SweepResult a = run_sweep(spec);
  const SweepResult b = run_sweep(spec);
  REQUIRE(a.entries.size() == b.entries.size());
  for (size_t i = 0; i < a.entries.size(); ++i) {
    CHECK(a.entries[i].outcome == b.entries[i].outcome);
    CHECK(a.entries[i].peak_sup_u == b.entries[i].peak_sup_u);
    CHECK(a.entries[i].t_final == b.entries[i].t_final);
  }
  // chi < 1 = chi2(k=1) marks the predicted region at N = 2
  for (const SweepEntry& e : a.entries)
    CHECK(e.verdict.theorem_applies == (e.chi < 1.0));
}

TEST_CASE("sweep spec validation") {
  SweepSpec spec = small_spec();
  spec.chi_grid.clear();
  CHECK_THROWS_AS(run_sweep(spec), std::domain_error);
  spec = small_spec();
  spec.chi_grid = {0.5, 0.5};
  CHECK_THROWS_AS(run_sweep(spec), std::domain_error);
  spec = small_spec();
  spec.chi_grid = {-0.5, 0.5};
  CHECK_THROWS_AS(run_sweep(spec), std::domain_error);
}

TEST_CASE("region map emission") {
  SweepSpec spec = small_spec();
  const SweepResult res = run_sweep(spec);
  const fs::path dir = fs::temp_directory_path() / "kslog_sweep_map";
  emit_region_map(res, dir);

  std::ifstream csv(dir / "region_map.csv");
  REQUIRE(csv.good());
  std::string line;
  std::getline(csv, line);
  CHECK(line == "chi,k,outcome,theorem_applies,label,peak_sup_u");
  int rows = 0;
  while (std::getline(csv, line)) ++rows;
  CHECK(rows == static_cast<int>(spec.chi_grid.size() * spec.k_grid.size()));

  std::ifstream svg_file(dir / "region_map.svg");
  REQUIRE(svg_file.good());
  std::stringstream buffer;
  buffer << svg_file.rdbuf();
  const std::string svg = buffer.str();
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("polyline") != std::string::npos);
  CHECK(svg.find("observations only") != std::string::npos);
  fs::remove_all(dir);
}

TEST_SUITE_END();
