#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "kslog/run_config.hpp"

using namespace kslog;
namespace fs = std::filesystem;

namespace {

const char* kSampleConfig = R"(# sample run
[model]
chi = 0.5
k = 1.0
alpha = 1.0
beta = 1.0
c = 1.0
dim = 2

[grid]
lx = 1.0
ly = 1.0
nx = 24
ny = 24

[stepper]
dt0 = 1e-3
t_end = 0.4
snapshot_every = 0.1
scheme = imex

[ic]
kind = gaussian_bump
amplitude = 4
width = 0.15

[output]
dir = out_test

[run]
seed = 31
)";

}  // namespace

TEST_SUITE_BEGIN("config");

TEST_CASE("parse and round trip") {
  const RunConfig cfg = RunConfig::parse_string(kSampleConfig);
  CHECK(cfg.model.chi == 0.5);
  CHECK(cfg.nx == 24);
  CHECK(cfg.stepper.t_end == 0.4);
  CHECK(cfg.ic.kind == IcKind::GaussianBump);
  CHECK(cfg.ic.amplitude == 4.0);
  CHECK(cfg.out_dir == "out_test");
  CHECK(cfg.seed == 31);
  CHECK(cfg.auto_diags);

  const RunConfig again = RunConfig::parse_string(cfg.serialize());
  CHECK(again == cfg);

  // round trip with explicit diagnostics and a sweep block
  RunConfig custom = cfg;
  custom.auto_diags = false;
  custom.diags.p_list = {2.0, 3.5};
  custom.diags.q_list = {2.0, std::numeric_limits<double>::infinity()};
  custom.chi_grid = {0.2, 0.4};
  custom.k_grid = {1.0, 2.0};
  custom.parallelism = 4;
  const RunConfig custom_back = RunConfig::parse_string(custom.serialize());
  CHECK(custom_back == custom);
}

TEST_CASE("parse errors carry line context") {
  try {
    RunConfig::parse_string("[model]\nchi = 0.5\nbogus_key = 1\n");
    FAIL("expected a parse error");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find(":3:") != std::string::npos);
    CHECK(msg.find("bogus_key") != std::string::npos);
  }
  CHECK_THROWS_AS(RunConfig::parse_string("chi = 0.5\n"), std::invalid_argument);
  CHECK_THROWS_AS(RunConfig::parse_string("[model]\nchi = abc\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(RunConfig::parse_string("[model\nchi = 1\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(RunConfig::parse_file("/nonexistent/kslog.cfg"),
                  std::invalid_argument);
}

TEST_CASE("validation rejects bad runs before they start") {
  RunConfig cfg = RunConfig::parse_string(kSampleConfig);
  cfg.stepper.t_end = 0.0;
  CHECK_THROWS(cfg.validate());

  cfg = RunConfig::parse_string(kSampleConfig);
  cfg.model.chi = -1.0;
  CHECK_THROWS(cfg.validate());

  cfg = RunConfig::parse_string(kSampleConfig);
  cfg.nx = 2;
  CHECK_THROWS(cfg.validate());

  cfg = RunConfig::parse_string(kSampleConfig);
  cfg.ic.kind = IcKind::FromFile;
  CHECK_THROWS(cfg.validate());
}

TEST_CASE("raw coefficients scale before running") {
  RunConfig cfg = RunConfig::parse_string(
      "[model]\nuse_raw = true\nd1 = 2\nd2 = 4\nchi0 = 1\nc1 = 2\nc2 = 6\nc = "
      "0.5\ndim = 2\n");
  const ModelParams p = cfg.effective_params();
  CHECK(p.chi == doctest::Approx(0.5));
  CHECK(p.k == doctest::Approx(2.0));
  CHECK(p.alpha == doctest::Approx(1.0));
  CHECK(p.beta == doctest::Approx(3.0));
  CHECK(p.c == doctest::Approx(0.5));
}

TEST_CASE("execute_run writes the full output set") {
  RunConfig cfg = RunConfig::parse_string(kSampleConfig);
  const fs::path dir = fs::temp_directory_path() / "kslog_run_out";
  fs::remove_all(dir);
  const RunResult result = execute_run(cfg, dir);
  CHECK(result.termination == Termination::Completed);

  CHECK(fs::exists(dir / "diagnostics.csv"));
  CHECK(fs::exists(dir / "summary.json"));
  CHECK(fs::exists(dir / "snapshots" / "u_final.bin"));
  CHECK(fs::exists(dir / "snapshots" / "v_final.csv"));

  std::ifstream js(dir / "summary.json");
  nlohmann::json summary;
  js >> summary;
  CHECK(summary["termination"] == "Completed");
  CHECK(summary["params"]["chi"] == 0.5);
  CHECK(summary["extremes"].contains("peak_sup_u"));
  CHECK(double(summary["t_final"]) >= 0.4);

  const Field u_back = read_binary(dir / "snapshots" / "u_final.bin");
  CHECK(u_back.grid() == result.final_state.u.grid());
  fs::remove_all(dir);
}

TEST_SUITE_END();
