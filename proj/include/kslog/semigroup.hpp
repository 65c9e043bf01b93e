#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "kslog/grid.hpp"
#include "kslog/params.hpp"

namespace kslog {

/// Cosine-basis representation of a Field on a box grid. Mode (mx, my) has
/// eigenvalue (mx pi / Lx)^2 + (my pi / Ly)^2 under the Neumann Laplacian.
class SpectralField {
 public:
  SpectralField(const Grid& grid, std::vector<double> coeffs);

  const Grid& grid() const { return grid_; }
  std::span<const double> coeffs() const { return coeffs_; }
  std::vector<double>& data() { return coeffs_; }
  int size() const { return static_cast<int>(coeffs_.size()); }

  /// Eigenvalue of the mode stored at flat index (my * nx + mx).
  double eigenvalue(int idx) const;

 private:
  Grid grid_;
  std::vector<double> coeffs_;
};

/// Forward/backward cell-centered cosine transform pair (exact inverse of
/// each other up to round-off).
SpectralField to_spectral(const Field& f);
Field from_spectral(const SpectralField& s);

/// Mode-wise damping exp(-(k lambda + shift) t). Heat semigroup e^(t lap)
/// is (k = 1, shift = 0); e^(-A t) with A = -lap + 1 is (1, 1); e^(-A_k t)
/// is (k, 1).
SpectralField apply_semigroup(const SpectralField& s, double t, double k,
                              double shift);

/// Fractional power (lambda + shift)^theta applied mode-wise.
SpectralField apply_fractional_power(const SpectralField& s, double theta,
                                     double shift = 1.0);

/// Exact gradient of the cosine interpolant, sampled at cell centers.
/// Returns (d/dx, d/dy); the second component is zero in 1D.
std::pair<Field, Field> spectral_gradient(const Field& f);
std::pair<Field, Field> spectral_gradient(const SpectralField& s);

/// First nonzero Neumann eigenvalue of -lap on the box (pi/L)^2, smallest
/// axis value in 2D.
double first_neumann_eigenvalue(const Grid& g);

enum class SmoothingEstimate {
  OperatorDecay,   // ||A^theta e^(-At) w||_q vs t^(-theta - (N/2)(1/p-1/q)) e^(-nu t)
  MeanZeroDecay,   // same rate for e^(t lap) on mean-free data
  GradientDecay,   // ||grad e^(t lap) w||_q vs (1 + t^(-1/2 - (N/2)(1/p-1/q))) e^(-nu t)
};

struct SmoothingReport {
  double constant = 0.0;  // sup of measured/rate over the test set and t grid
  double refined = 0.0;   // same with geometric midpoints inserted in t
  double ratio = 0.0;     // refined / constant
  double nu = 0.0;
  bool pass = false;      // finite and ratio < 1.05
};

SmoothingReport measure_smoothing_constant(SmoothingEstimate estimate, double p,
                                           double q, double theta, double k,
                                           std::span<const Field> test_set,
                                           std::span<const double> t_grid);

/// Deterministic test fields: axis eigenmodes 1..max_mode plus n_random
/// uniform fields (mean-removed when mean_zero is set).
std::vector<Field> smoothing_test_set(const Grid& g, int n_random, int max_mode,
                                      bool mean_zero, std::uint64_t seed);

/// Log-spaced time grid in [t_min, t_max].
std::vector<double> log_time_grid(double t_min, double t_max, int count);

struct PicardResult {
  std::vector<double> times;   // interpolation nodes in [0, T]
  std::vector<Field> u_slab;   // final iterate at each node
  std::vector<Field> v_slab;
  std::vector<double> diffs;   // successive-iterate distances d_n
  std::vector<double> ratios;  // d_(n+1) / d_n
};

/// Fixed-point iteration of the mild (Duhamel) formulation on one time slab
/// [0, T]. Stops early once the iterates agree to round-off. Throws when the
/// distances grow three times in a row (slab too long to contract).
PicardResult picard_solve(const Field& u0, const Field& v0,
                          const ModelParams& params, double T, int n_iter);

struct CrossValidation {
  double u_discrepancy = 0.0;  // relative sup-norm gaps at t = T
  double v_discrepancy = 0.0;
  bool pass = false;
  double tolerance = 0.0;
};

/// Compares the Picard solution against the finite-volume stepper run at a
/// fixed step dt up to time T.
CrossValidation cross_validate(const Field& u0, const Field& v0,
                               const ModelParams& params, double T,
                               double dt = 1e-4, double tolerance = 1e-2);

}  // namespace kslog
