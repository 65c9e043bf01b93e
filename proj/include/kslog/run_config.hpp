#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "kslog/diagnostics.hpp"
#include "kslog/params.hpp"
#include "kslog/stepper.hpp"
#include "kslog/sweep.hpp"

namespace kslog {

/// Full description of a run, parsed from a flat key = value file with
/// [model], [grid], [stepper], [ic], [diagnostics], [output], [run] and
/// (for sweeps) [sweep] sections. Unknown keys are rejected with the line
/// number; every module precondition is checked before a run starts.
struct RunConfig {
  // [model]
  bool use_raw = false;  // derive scaled coefficients from the raw ones
  RawParams raw;
  ModelParams model;

  // [grid]
  double lx = 1.0, ly = 1.0;
  int nx = 64, ny = 64;

  // [stepper]
  StepperConfig stepper;

  // [ic]
  IcRecipe ic;

  // [diagnostics]; when auto_diags, the monitored exponents derive from the
  // parameter region at run time
  bool auto_diags = true;
  DiagSelection diags;

  // [output]
  std::string out_dir = "out";

  // [run]
  std::uint64_t seed = 0;

  // [sweep]
  std::vector<double> chi_grid;
  std::vector<double> k_grid;
  int parallelism = 1;
  double window = 0.5;

  ModelParams effective_params() const;
  Grid make_grid() const;
  SweepSpec make_sweep_spec() const;
  void validate() const;

  static RunConfig parse(std::istream& is, const std::string& name = "config");
  static RunConfig parse_file(const std::filesystem::path& path);
  static RunConfig parse_string(const std::string& text);
  std::string serialize() const;

  bool operator==(const RunConfig&) const;
};

/// Runs simulate() per the config and writes diagnostics.csv, summary.json
/// and snapshots/(u|v)_final.(bin|csv) under out_dir.
RunResult execute_run(const RunConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace kslog
