#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "kslog/params.hpp"
#include "kslog/stepper.hpp"

namespace kslog {

enum class IcKind { Constant, GaussianBump, CosineMode, FromFile };

/// Named initial-condition recipes. GaussianBump places
/// u0 = 1 + amplitude * exp(-|x - center|^2 / (width * Lx)^2), normalized so
/// the total mass equals the box volume; v0 is the balanced level beta/alpha.
struct IcRecipe {
  IcKind kind = IcKind::GaussianBump;
  double value = 1.0;      // Constant level for u0
  double amplitude = 9.0;  // bump or cosine amplitude
  double width = 0.1;      // bump width as a fraction of Lx
  int mode = 1;            // cosine mode number
  std::string u_file;      // FromFile: binary snapshots
  std::string v_file;
};

std::pair<Field, Field> make_initial_conditions(const IcRecipe& recipe,
                                                const Grid& grid,
                                                const ModelParams& params);

enum class Outcome { Bounded, Growing, NumericalBlowup, DtUnderflow };

const char* to_string(Outcome o);

struct SweepSpec {
  std::vector<double> chi_grid;  // strictly increasing, positive
  std::vector<double> k_grid;    // strictly increasing, positive
  ModelParams base;              // alpha, beta, c, dim template
  Grid grid = Grid::rectangle(1.0, 1.0, 64, 64);
  IcRecipe ic;
  StepperConfig config;
  int parallelism = 1;
  double window = 0.5;  // last-fraction window for Bounded vs Growing

  void validate() const;
};

struct SweepEntry {
  double chi = 0.0;
  double k = 0.0;
  bool ok = false;
  std::string error;  // set when the point failed; outcome then meaningless
  Outcome outcome = Outcome::Bounded;
  RegionVerdict verdict;
  double peak_sup_u = 0.0;
  double t_final = 0.0;
};

struct SweepResult {
  std::vector<double> chi_grid;
  std::vector<double> k_grid;
  int dim = 2;
  std::vector<SweepEntry> entries;  // chi-major: index = ci * |k_grid| + ki
};

/// Bounded when the sup-norm plateau holds over the trailing window
/// (5 percent slack); Growing otherwise; blow-up and underflow verdicts
/// pass through from the run.
Outcome classify_outcome(const RunResult& result, double window);

/// One simulation per (chi, k) point, parallel over points, deterministic
/// aggregation. Per-point failures land in the entry, never abort the sweep.
SweepResult run_sweep(const SweepSpec& spec);

/// Writes region_map.csv and region_map.svg under dir. The SVG colors each
/// cell by outcome and overlays the predicted-region boundary curves.
void emit_region_map(const SweepResult& sweep, const std::filesystem::path& dir);

}  // namespace kslog
