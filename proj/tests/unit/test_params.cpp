#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "kslog/params.hpp"

using namespace kslog;

namespace {

ModelParams make_params(double chi, double k, int dim) {
  ModelParams p;
  p.chi = chi;
  p.k = k;
  p.dim = dim;
  return p;
}

}  // namespace

TEST_SUITE_BEGIN("params");

TEST_CASE("scale_parameters identity and ratio cases") {
  const ScaledSystem id = scale_parameters({1, 1, 0.5, 1, 1, 1});
  CHECK(id.params.chi == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(id.params.k == doctest::Approx(1.0));
  CHECK(id.params.alpha == doctest::Approx(1.0));
  CHECK(id.params.beta == doctest::Approx(1.0));
  CHECK(id.params.c == doctest::Approx(1.0));
  CHECK(id.time_scale == doctest::Approx(1.0));

  const ScaledSystem s = scale_parameters({2, 4, 1, 2, 6, 0.5});
  CHECK(s.params.chi == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(s.params.k == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(s.params.alpha == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(s.params.beta == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(s.params.c == doctest::Approx(0.5));
  CHECK(s.time_scale == doctest::Approx(2.0));

  CHECK_THROWS_AS(scale_parameters({0, 1, 1, 1, 1, 1}), std::domain_error);
  CHECK_THROWS_AS(scale_parameters({1, 1, 1, -2, 1, 1}), std::domain_error);
}

TEST_CASE("scaling round trip recovers the raw coefficients") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(0.1, 10.0);
  for (int trial = 0; trial < 100; ++trial) {
    const RawParams raw{unif(rng), unif(rng), unif(rng),
                        unif(rng), unif(rng), unif(rng)};
    const ScaledSystem s = scale_parameters(raw);
    const RawParams back = unscale_parameters(s.params, s.time_scale);
    CHECK(back.d1 == doctest::Approx(raw.d1).epsilon(1e-14));
    CHECK(back.d2 == doctest::Approx(raw.d2).epsilon(1e-14));
    CHECK(back.chi0 == doctest::Approx(raw.chi0).epsilon(1e-14));
    CHECK(back.c1 == doctest::Approx(raw.c1).epsilon(1e-14));
    CHECK(back.c2 == doctest::Approx(raw.c2).epsilon(1e-14));
    CHECK(back.c == raw.c);
  }
}

TEST_CASE("f_indicator closed-form values") {
  CHECK(f_indicator(2.0, (3.0 - 1.0) / 2.0, 3.0) == doctest::Approx(-1.5).epsilon(1e-15));
  CHECK(f_indicator(2.0, 0.5, 1.0) == doctest::Approx(-0.25).epsilon(1e-15));

  // chi2 is a root of f(N/2) by construction
  for (int dim : {1, 2, 3, 5}) {
    for (double k : {0.3, 1.0, 2.5, 7.0}) {
      const Thresholds t = thresholds(dim, k);
      CHECK(std::abs(f_indicator(dim / 2.0, t.chi2, k)) < 1e-12);
      CHECK(std::abs(f_indicator(dim / 2.0, t.chi1, k)) < 1e-12);
    }
  }

  CHECK_THROWS_AS(f_indicator(0.0, 0.5, 1.0), std::domain_error);
  CHECK_THROWS_AS(f_indicator(2.0, 0.5, -1.0), std::domain_error);
}

TEST_CASE("f_indicator is monotone increasing in p") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> chi_dist(-2.0, 3.0);
  std::uniform_real_distribution<double> k_dist(0.1, 8.0);
  std::uniform_real_distribution<double> p_dist(0.1, 20.0);
  for (int trial = 0; trial < 500; ++trial) {
    const double chi = chi_dist(rng), k = k_dist(rng);
    double p1 = p_dist(rng), p2 = p_dist(rng);
    if (p1 > p2) std::swap(p1, p2);
    const double lhs = f_indicator(p1, chi, k);
    const double rhs = f_indicator(p2, chi, k) + (k / p2 - k / p1);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    CHECK(f_indicator(p1, chi, k) <= f_indicator(p2, chi, k) + 1e-15);
  }
}

TEST_CASE("thresholds anchors") {
  const Thresholds t = thresholds(2, 1.0);
  CHECK(std::abs(t.chi2 - std::sqrt(2.0 / 2.0)) <= 1e-14);
  CHECK(std::abs(t.chi2 - 1.0) <= 1e-14);
  CHECK(t.chi1 == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(t.k1 == doctest::Approx(3.0 - 2.0 * std::sqrt(2.0)).epsilon(1e-14));
  CHECK(t.k2 == doctest::Approx(3.0 + 2.0 * std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("threshold ordering across dimensions") {
  for (int dim = 1; dim <= 10; ++dim) {
    const Thresholds t = thresholds(dim, 1.7);
    CHECK(t.k1 < 1.0);
    CHECK(1.0 < t.k2);
    CHECK(t.k1 > 0.0);
    CHECK(t.chi1 < t.chi2);
  }
  // chi1 < 0 < chi2 whenever k lies between k1 and k2
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const int dim = 1 + static_cast<int>(rng() % 6);
    const Thresholds edges = thresholds(dim, 1.0);
    std::uniform_real_distribution<double> k_dist(edges.k1 * 1.0001, edges.k2 * 0.9999);
    const double k = k_dist(rng);
    const Thresholds t = thresholds(dim, k);
    CHECK(t.chi1 < 0.0);
    CHECK(t.chi2 > 0.0);
  }
}

TEST_CASE("classify_region on the reference points") {
  const RegionVerdict strong = classify_region(make_params(0.5, 1.0, 2));
  CHECK(strong.in_iplus_half_n);
  CHECK(strong.in_iplus_n);
  CHECK(strong.theorem_applies);
  CHECK(strong.label == RegionLabel::StrongRegion);

  const RegionVerdict border = classify_region(make_params(0.8, 1.0, 2));
  CHECK(border.in_iplus_half_n);
  CHECK_FALSE(border.in_iplus_n);
  CHECK(border.theorem_applies);
  CHECK(border.label == RegionLabel::BorderRegion);

  const RegionVerdict outside = classify_region(make_params(1.5, 1.0, 2));
  CHECK_FALSE(outside.in_iplus_half_n);
  CHECK_FALSE(outside.theorem_applies);
  CHECK(outside.label == RegionLabel::Outside);
}

TEST_CASE("I+ membership is nested over a parameter grid") {
  for (int ci = 0; ci < 50; ++ci) {
    for (int ki = 0; ki < 50; ++ki) {
      const double chi = 0.02 + 0.06 * ci;
      const double k = 0.05 + 0.15 * ki;
      const RegionVerdict v = classify_region(make_params(chi, k, 2));
      if (v.in_iplus_n) CHECK(v.in_iplus_half_n);
      CHECK((v.label == RegionLabel::StrongRegion) == v.in_iplus_n);
    }
  }
}

TEST_CASE("admissible_p_interval") {
  const PInterval iv = admissible_p_interval(make_params(0.5, 1.0, 2));
  CHECK(iv.lo == doctest::Approx(1.0));
  REQUIRE(iv.hi.finite());
  CHECK(iv.hi.value() == doctest::Approx(4.0).epsilon(1e-14));

  // chi = (k-1)/2 lands in the unbounded branch
  const PInterval unbounded = admissible_p_interval(make_params(1.0, 3.0, 2));
  CHECK(unbounded.lo == doctest::Approx(1.0));
  CHECK(unbounded.hi.infinite());

  CHECK_THROWS_AS(admissible_p_interval(make_params(1.5, 1.0, 2)), std::domain_error);
}

TEST_CASE("gradv_q_upper branches") {
  const ExtReal border = gradv_q_upper(make_params(0.8, 1.0, 2));
  REQUIRE(border.finite());
  CHECK(border.value() == doctest::Approx(1.0 / (0.8 * 0.8 - 0.5)).epsilon(1e-13));

  CHECK(gradv_q_upper(make_params(0.5, 1.0, 2)).infinite());
  CHECK_THROWS_AS(gradv_q_upper(make_params(1.5, 1.0, 2)), std::domain_error);
}

TEST_CASE("bootstrap_sequence reference run") {
  const std::vector<ExtReal> seq = bootstrap_sequence(1.5, make_params(0.8, 1.0, 2));
  REQUIRE(seq.size() == 3);
  CHECK(seq[0].value() == doctest::Approx(1.5));
  CHECK(seq[1].value() == doctest::Approx(75.0 / 23.0).epsilon(1e-14));
  CHECK(seq[2].infinite());
}

TEST_CASE("bootstrap_sequence preconditions and monotonicity") {
  const ModelParams p = make_params(0.8, 1.0, 2);
  const double cutoff = 1.0 / (2.0 / 2.0 - (0.8 * 0.8) / 1.0);
  CHECK_THROWS_AS(bootstrap_sequence(cutoff, p), std::domain_error);
  CHECK_THROWS_AS(bootstrap_sequence(cutoff + 1.0, p), std::domain_error);
  CHECK_THROWS_AS(bootstrap_sequence(1.0, p), std::domain_error);
  // strong region has no bootstrap gap to lift through
  CHECK_THROWS_AS(bootstrap_sequence(1.5, make_params(0.5, 1.0, 2)),
                  std::domain_error);

  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> mu_dist(1.0 + 1e-6, cutoff - 1e-6);
  for (int trial = 0; trial < 100; ++trial) {
    const std::vector<ExtReal> seq = bootstrap_sequence(mu_dist(rng), p);
    REQUIRE(seq.size() >= 2);
    CHECK(seq.back().infinite());
    for (size_t i = 0; i + 1 < seq.size(); ++i) CHECK(seq[i] < seq[i + 1]);
  }

  const std::vector<ExtReal> slow = bootstrap_sequence(1.01, p);
  CHECK(slow.back().infinite());
  CHECK(slow.size() >= 3);
}

TEST_CASE("quadratic-form sign check at k = 1") {
  const std::vector<double> samples = {0.0, 1.0, 10.0, 100.0};

  const Eq16Check neg = verify_eq16_equivalence(2.0, make_params(0.5, 1.0, 2), samples);
  CHECK(neg.consistent);
  CHECK(neg.f_value == doctest::Approx(-0.25));
  for (double lhs : neg.lhs_values) CHECK(lhs < 0.0);

  const Eq16Check pos = verify_eq16_equivalence(2.0, make_params(1.5, 1.0, 2), samples);
  CHECK(pos.consistent);
  CHECK(pos.f_value == doctest::Approx(1.75));
  for (double lhs : pos.lhs_values) CHECK(lhs > 0.0);

  // boundary root: both sides sit inside the zero band
  const double chi_boundary = std::sqrt(0.5);
  const Eq16Check zero =
      verify_eq16_equivalence(2.0, make_params(chi_boundary, 1.0, 2), samples);
  CHECK(zero.consistent);
  for (double lhs : zero.lhs_values) CHECK(std::abs(lhs) < 1e-10);

  CHECK_THROWS_AS(verify_eq16_equivalence(1.0, make_params(0.5, 1.0, 2), samples),
                  std::domain_error);
}

TEST_CASE("quadratic-form sign check reports mismatches away from k = 1") {
  // At k = 3, chi = 1, p = 2 the indicator is negative while the substituted
  // quadratic form is positive; the checker must flag the disagreement.
  const std::vector<double> samples = {0.0, 1.0, 10.0};
  const Eq16Check mismatch = verify_eq16_equivalence(2.0, make_params(1.0, 3.0, 2), samples);
  CHECK(mismatch.f_value == doctest::Approx(-1.5));
  for (double lhs : mismatch.lhs_values) CHECK(lhs > 0.0);
  CHECK_FALSE(mismatch.consistent);
}

TEST_SUITE_END();
