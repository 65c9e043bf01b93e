#pragma once

#include <span>
#include <vector>

#include "kslog/ext_real.hpp"

namespace kslog {

/// Coefficients of the unscaled chemotaxis system
///   u_t = div(d1 grad u - chi0 u / (v + c) grad v)
///   v_t = d2 lap v - c1 v + c2 u
struct RawParams {
  double d1 = 1.0;    // cell motility
  double d2 = 1.0;    // chemical diffusion
  double chi0 = 1.0;  // chemotactic coefficient
  double c1 = 1.0;    // chemical degradation
  double c2 = 1.0;    // chemical production
  double c = 1.0;     // sensitivity saturation offset

  void validate() const;
};

/// Coefficients after rescaling time by d1:
///   u_t = div(grad u - chi u / (v + c) grad v)
///   v_t = k lap v - alpha v + beta u
struct ModelParams {
  double chi = 0.5;
  double k = 1.0;
  double alpha = 1.0;
  double beta = 1.0;
  double c = 1.0;
  int dim = 2;  // spatial dimension N

  /// k, alpha, beta, c > 0 and dim >= 1; chi unrestricted (analysis ops).
  void validate_analysis() const;
  /// Additionally chi > 0 (chemoattraction) and dim in {1, 2}.
  void validate_simulation() const;

  bool operator==(const ModelParams&) const = default;
};

struct ScaledSystem {
  ModelParams params;
  double time_scale;  // t_scaled = time_scale * t_raw
};

/// The diffusion-ratio and chemotaxis thresholds attached to dimension N:
/// chi1, chi2 are the roots of f(N/2) = 0 and k1 < 1 < k2 always.
struct Thresholds {
  double k1, k2;
  double chi1, chi2;
};

enum class RegionLabel { StrongRegion, BorderRegion, Outside };

struct RegionVerdict {
  bool in_iplus_half_n = false;  // chi in I+(N/2)
  bool in_iplus_n = false;       // chi in I+(N)
  bool theorem_applies = false;  // global-existence hypotheses hold
  RegionLabel label = RegionLabel::Outside;
};

const char* to_string(RegionLabel label);

/// Admissible exponent window (N/2, hi) for the weighted functional.
struct PInterval {
  double lo;
  ExtReal hi;
};

/// Result of the quadratic-sign consistency check between the weighted
/// functional inequality and the indicator f(p), sampled over v values.
struct Eq16Check {
  bool consistent = false;
  double f_value = 0.0;
  std::vector<double> lhs_values;
};

/// Rescale raw coefficients; time_scale is d1 (t_scaled = d1 * t).
ScaledSystem scale_parameters(const RawParams& raw, int dim = 2);

/// Inverse of scale_parameters for a given time scale d1.
RawParams unscale_parameters(const ModelParams& p, double time_scale);

/// f(p) = (chi - (k-1)/2)^2 - k/p. Negative f marks the good region.
double f_indicator(double p, double chi, double k);

Thresholds thresholds(int dim, double k);

RegionVerdict classify_region(const ModelParams& p);

/// (N/2, k/(chi-(k-1)/2)^2), upper endpoint +inf when chi = (k-1)/2.
/// Requires chi in I+(N/2); otherwise the interval is empty and this throws.
PInterval admissible_p_interval(const ModelParams& p);

/// Upper bound on gradient-norm exponents q: k / f(N) when
/// chi in I+(N/2) \ I+(N), +inf when chi in I+(N).
ExtReal gradv_q_upper(const ModelParams& p);

/// Exponent lifting sequence mu_1, mu_2, ..., terminating with +inf.
/// Requires chi in I+(N/2) \ I+(N) and N/2 < mu1 < 1/(2/N - f-gap).
std::vector<ExtReal> bootstrap_sequence(double mu1, const ModelParams& p,
                                        int max_iters = 10000);

/// Substitutes the weight (v+c)^((1-p)/2) and its derivatives into the
/// quadratic-form coefficient of |grad v|^2 at each sampled v and checks
/// that its sign agrees with sign(f(p)) everywhere (1e-10 zero band).
Eq16Check verify_eq16_equivalence(double p, const ModelParams& params,
                                  std::span<const double> v_samples);

}  // namespace kslog
