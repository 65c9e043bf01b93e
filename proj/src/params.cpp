#include "kslog/params.hpp"

#include <cmath>
#include <stdexcept>

namespace kslog {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::domain_error(msg);
}

}  // namespace

void RawParams::validate() const {
  require(d1 > 0 && d2 > 0 && chi0 > 0 && c1 > 0 && c2 > 0 && c > 0,
          "RawParams: all coefficients must be strictly positive");
}

void ModelParams::validate_analysis() const {
  require(k > 0, "ModelParams: k must be positive");
  require(alpha > 0, "ModelParams: alpha must be positive");
  require(beta > 0, "ModelParams: beta must be positive");
  require(c > 0, "ModelParams: c must be positive");
  require(dim >= 1, "ModelParams: dim must be >= 1");
}

void ModelParams::validate_simulation() const {
  validate_analysis();
  require(chi > 0, "ModelParams: chi must be positive for simulation");
  require(dim == 1 || dim == 2, "ModelParams: simulation supports dim 1 or 2");
}

const char* to_string(RegionLabel label) {
  switch (label) {
    case RegionLabel::StrongRegion: return "StrongRegion";
    case RegionLabel::BorderRegion: return "BorderRegion";
    case RegionLabel::Outside: return "Outside";
  }
  return "Outside";
}

ScaledSystem scale_parameters(const RawParams& raw, int dim) {
  raw.validate();
  require(dim >= 1, "scale_parameters: dim must be >= 1");
  ModelParams p;
  p.chi = raw.chi0 / raw.d1;
  p.k = raw.d2 / raw.d1;
  p.alpha = raw.c1 / raw.d1;
  p.beta = raw.c2 / raw.d1;
  p.c = raw.c;
  p.dim = dim;
  return ScaledSystem{p, raw.d1};
}

RawParams unscale_parameters(const ModelParams& p, double time_scale) {
  p.validate_analysis();
  require(time_scale > 0, "unscale_parameters: time_scale must be positive");
  RawParams raw;
  raw.d1 = time_scale;
  raw.d2 = p.k * time_scale;
  raw.chi0 = p.chi * time_scale;
  raw.c1 = p.alpha * time_scale;
  raw.c2 = p.beta * time_scale;
  raw.c = p.c;
  return raw;
}

double f_indicator(double p, double chi, double k) {
  require(p > 0, "f_indicator: p must be positive");
  require(k > 0, "f_indicator: k must be positive");
  const double shift = chi - (k - 1.0) / 2.0;
  return shift * shift - k / p;
}

Thresholds thresholds(int dim, double k) {
  require(dim >= 1, "thresholds: dim must be >= 1");
  require(k > 0, "thresholds: k must be positive");
  const double n = static_cast<double>(dim);
  const double root = 2.0 * std::sqrt(2.0 / n + 4.0 / (n * n));
  Thresholds t;
  t.k1 = (1.0 + 4.0 / n) - root;
  t.k2 = (1.0 + 4.0 / n) + root;
  const double chi_root = std::sqrt(2.0 * k / n);
  t.chi1 = (k - 1.0) / 2.0 - chi_root;
  t.chi2 = (k - 1.0) / 2.0 + chi_root;
  return t;
}

RegionVerdict classify_region(const ModelParams& p) {
  require(p.k > 0, "classify_region: k must be positive");
  require(p.dim >= 1, "classify_region: dim must be >= 1");
  const double n = static_cast<double>(p.dim);

  RegionVerdict v;
  v.in_iplus_half_n = p.chi > 0 && f_indicator(n / 2.0, p.chi, p.k) < 0;
  v.in_iplus_n = p.chi > 0 && f_indicator(n, p.chi, p.k) < 0;

  const Thresholds t = thresholds(p.dim, p.k);
  if (p.k > t.k1 && p.k < t.k2) {
    v.theorem_applies = p.chi > 0 && p.chi < t.chi2;
  } else if (p.k >= t.k2) {
    v.theorem_applies = p.chi > t.chi1 && p.chi < t.chi2;
  } else {
    v.theorem_applies = false;
  }

  if (v.in_iplus_n) {
    v.label = RegionLabel::StrongRegion;
  } else if (v.in_iplus_half_n) {
    v.label = RegionLabel::BorderRegion;
  } else {
    v.label = RegionLabel::Outside;
  }
  return v;
}

PInterval admissible_p_interval(const ModelParams& p) {
  const RegionVerdict v = classify_region(p);
  if (!v.in_iplus_half_n) {
    throw std::domain_error(
        "admissible_p_interval: chi outside I+(N/2), interval is empty");
  }
  const double n = static_cast<double>(p.dim);
  const double shift = p.chi - (p.k - 1.0) / 2.0;
  if (shift == 0.0) return PInterval{n / 2.0, ExtReal::infinity()};
  return PInterval{n / 2.0, ExtReal(p.k / (shift * shift))};
}

ExtReal gradv_q_upper(const ModelParams& p) {
  const RegionVerdict v = classify_region(p);
  if (!v.in_iplus_half_n) {
    throw std::domain_error("gradv_q_upper: chi outside I+(N/2)");
  }
  const double fn = f_indicator(static_cast<double>(p.dim), p.chi, p.k);
  if (fn <= 0.0) return ExtReal::infinity();
  return ExtReal(p.k / fn);
}

std::vector<ExtReal> bootstrap_sequence(double mu1, const ModelParams& p,
                                        int max_iters) {
  const RegionVerdict v = classify_region(p);
  if (!v.in_iplus_half_n || v.in_iplus_n) {
    throw std::domain_error(
        "bootstrap_sequence: requires chi in I+(N/2) \\ I+(N)");
  }
  const double n = static_cast<double>(p.dim);
  const double shift = p.chi - (p.k - 1.0) / 2.0;
  const double gap = 2.0 / n - shift * shift / p.k;
  // gap > 0 exactly when f(N/2) < 0, which the region check guarantees.
  const double cutoff = 1.0 / gap;
  if (!(mu1 > n / 2.0 && mu1 < cutoff)) {
    throw std::domain_error("bootstrap_sequence: mu1 outside (N/2, 1/gap)");
  }

  std::vector<ExtReal> seq;
  seq.push_back(ExtReal(mu1));
  double mu = mu1;
  for (int i = 0; i < max_iters; ++i) {
    if (mu >= cutoff) {
      seq.push_back(ExtReal::infinity());
      return seq;
    }
    mu = 1.0 / (1.0 / mu - gap);
    seq.push_back(ExtReal(mu));
  }
  throw std::runtime_error(
      "bootstrap_sequence: did not reach infinity within max_iters");
}

Eq16Check verify_eq16_equivalence(double p, const ModelParams& params,
                                  std::span<const double> v_samples) {
  require(p > 1.0, "verify_eq16_equivalence: p must exceed 1");
  params.validate_analysis();
  constexpr double kSignTol = 1e-10;

  Eq16Check out;
  out.f_value = f_indicator(p, params.chi, params.k);
  out.lhs_values.reserve(v_samples.size());

  auto sign_band = [](double x) { return x > kSignTol ? 1 : (x < -kSignTol ? -1 : 0); };
  const int f_sign = sign_band(out.f_value);

  out.consistent = true;
  for (double v : v_samples) {
    require(v >= 0.0, "verify_eq16_equivalence: v samples must be nonnegative");
    const double w = v + params.c;
    const double phi = std::pow(w, (1.0 - p) / 2.0);
    const double dphi = (1.0 - p) / 2.0 * std::pow(w, -(p + 1.0) / 2.0);
    const double d2phi = (p * p - 1.0) / 4.0 * std::pow(w, -(p + 3.0) / 2.0);
    const double chi_v = params.chi / w;
    const double cross = (p - 1.0) * phi * chi_v - (params.k + 1.0) * dphi;
    const double lhs = cross * cross / (4.0 * (p - 1.0) * phi) + dphi * chi_v -
                       (params.k / p) * d2phi;
    out.lhs_values.push_back(lhs);
    if (sign_band(lhs) != f_sign) out.consistent = false;
  }
  return out;
}

}  // namespace kslog
