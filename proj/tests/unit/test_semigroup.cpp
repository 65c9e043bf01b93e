#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "kslog/diagnostics.hpp"
#include "kslog/semigroup.hpp"
#include "kslog/sweep.hpp"

using namespace kslog;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;

Field random_field(const Grid& g, std::mt19937_64& rng, double lo = 0.0,
                   double hi = 1.0) {
  std::uniform_real_distribution<double> unif(lo, hi);
  Field f(g);
  for (int i = 0; i < f.size(); ++i) f[i] = unif(rng);
  return f;
}

}  // namespace

TEST_SUITE_BEGIN("semigroup");

TEST_CASE("transform round trip and mode isolation") {
  std::mt19937_64 rng(41);
  for (const Grid& g : {Grid::interval(1.0, 64), Grid::rectangle(1.0, 2.0, 16, 24)}) {
    const Field f = random_field(g, rng, -1.0, 1.0);
    const Field back = from_spectral(to_spectral(f));
    double err = 0.0;
    for (int i = 0; i < f.size(); ++i) err = std::max(err, std::abs(back[i] - f[i]));
    CHECK(err < 1e-12 * std::max(1.0, f.max_abs()));
  }

  const Grid g = Grid::interval(1.0, 32);
  const SpectralField constant = to_spectral(Field(g, 2.5));
  CHECK(constant.coeffs()[0] == doctest::Approx(2.5).epsilon(1e-14));
  for (int m = 1; m < constant.size(); ++m)
    CHECK(std::abs(constant.coeffs()[m]) < 1e-13);

  const Field mode1 = make_field(g, [&](double x) { return std::cos(kPi * x); });
  const SpectralField spec = to_spectral(mode1);
  CHECK(spec.coeffs()[1] == doctest::Approx(1.0).epsilon(1e-13));
  for (int m = 0; m < spec.size(); ++m)
    if (m != 1) CHECK(std::abs(spec.coeffs()[m]) < 1e-13);
  CHECK(spec.eigenvalue(1) == doctest::Approx(kPi * kPi).epsilon(1e-15));
}

TEST_CASE("semigroup damping anchors") {
  const Grid g = Grid::interval(1.0, 64);
  const Field mode1 = make_field(g, [&](double x) { return std::cos(kPi * x); });
  const SpectralField spec = to_spectral(mode1);

  // identity at t = 0
  const SpectralField id = apply_semigroup(spec, 0.0, 1.0, 0.0);
  for (int m = 0; m < spec.size(); ++m)
    CHECK(id.coeffs()[m] == doctest::Approx(spec.coeffs()[m]));

  // heat flow damps the first mode by exp(-pi^2 t)
  const SpectralField heat = apply_semigroup(spec, 0.1, 1.0, 0.0);
  CHECK(heat.coeffs()[1] == doctest::Approx(std::exp(-kPi * kPi * 0.1)).epsilon(1e-13));

  // shifted semigroup scales constants by exp(-t) regardless of k
  const SpectralField shifted = apply_semigroup(to_spectral(Field(g, 1.0)), 0.3, 5.0, 1.0);
  CHECK(shifted.coeffs()[0] == doctest::Approx(std::exp(-0.3)).epsilon(1e-13));

  CHECK_THROWS(apply_semigroup(spec, -0.1, 1.0, 0.0));
  CHECK_THROWS(apply_semigroup(spec, 0.1, 0.0, 0.0));
}

TEST_CASE("semigroup composition, positivity and mass invariance") {
  std::mt19937_64 rng(43);
  const Grid g = Grid::rectangle(1.0, 1.0, 12, 12);
  const Field f = random_field(g, rng);
  const SpectralField spec = to_spectral(f);

  const SpectralField once = apply_semigroup(spec, 0.7, 2.0, 1.0);
  const SpectralField twice =
      apply_semigroup(apply_semigroup(spec, 0.3, 2.0, 1.0), 0.4, 2.0, 1.0);
  for (int m = 0; m < spec.size(); ++m)
    CHECK(std::abs(once.coeffs()[m] - twice.coeffs()[m]) < 1e-13);

  const Field heated = from_spectral(apply_semigroup(spec, 0.05, 1.0, 0.0));
  CHECK(heated.min() >= -1e-10 * f.max_abs());
  CHECK(apply_semigroup(spec, 3.0, 1.0, 0.0).coeffs()[0] ==
        doctest::Approx(spec.coeffs()[0]).epsilon(1e-15));
}

TEST_CASE("spectral gradient is exact on eigenmodes") {
  const Grid g = Grid::interval(1.0, 64);
  const Field mode2 = make_field(g, [&](double x) { return std::cos(2.0 * kPi * x); });
  auto [gx, gy] = spectral_gradient(mode2);
  double err = 0.0;
  for (int i = 0; i < g.nx(); ++i)
    err = std::max(err, std::abs(gx[i] + 2.0 * kPi * std::sin(2.0 * kPi * g.x(i))));
  CHECK(err < 1e-10);
  CHECK(gy.max_abs() == 0.0);

  const Grid g2 = Grid::rectangle(1.0, 1.0, 24, 24);
  const Field prod = make_field(g2, [&](double x, double y) {
    return std::cos(kPi * x) * std::cos(kPi * y);
  });
  auto [px, py] = spectral_gradient(prod);
  double err2 = 0.0;
  for (int j = 0; j < g2.ny(); ++j)
    for (int i = 0; i < g2.nx(); ++i) {
      err2 = std::max(err2, std::abs(px.at(i, j) + kPi * std::sin(kPi * g2.x(i)) *
                                                       std::cos(kPi * g2.y(j))));
      err2 = std::max(err2, std::abs(py.at(i, j) + kPi * std::cos(kPi * g2.x(i)) *
                                                       std::sin(kPi * g2.y(j))));
    }
  CHECK(err2 < 1e-10);
}

TEST_CASE("first Neumann eigenvalue") {
  CHECK(first_neumann_eigenvalue(Grid::interval(1.0, 16)) ==
        doctest::Approx(kPi * kPi).epsilon(1e-15));
  CHECK(first_neumann_eigenvalue(Grid::rectangle(1.0, 2.0, 8, 8)) ==
        doctest::Approx(kPi * kPi / 4.0).epsilon(1e-15));
}

TEST_CASE("gradient smoothing estimate on eigenmodes") {
  const Grid g = Grid::interval(1.0, 128);
  const std::vector<Field> modes = smoothing_test_set(g, 0, 8, false, 0);
  REQUIRE(modes.size() == 8);
  const std::vector<double> ts = log_time_grid(1e-3, 10.0, 50);
  const SmoothingReport rep = measure_smoothing_constant(
      SmoothingEstimate::GradientDecay, kInf, kInf, 0.0, 1.0, modes, ts);
  CHECK(rep.pass);
  CHECK(std::isfinite(rep.constant));
  CHECK(std::abs(rep.nu - kPi * kPi) < 1e-12);
  // the first mode alone gives ratio pi / (1 + t^(-1/2)), topping out near t = 10
  CHECK(rep.constant > 2.0);
  CHECK(rep.constant < 4.0);
}

TEST_CASE("mean-zero estimate rejects constants") {
  const Grid g = Grid::interval(1.0, 32);
  std::vector<Field> with_constant;
  with_constant.push_back(Field(g, 1.0));
  const std::vector<double> ts = log_time_grid(1e-2, 1.0, 5);
  CHECK_THROWS_AS(measure_smoothing_constant(SmoothingEstimate::MeanZeroDecay, 2.0,
                                             2.0, 0.5, 1.0, with_constant, ts),
                  std::domain_error);

  const std::vector<Field> ok = smoothing_test_set(g, 8, 4, true, 99);
  const SmoothingReport rep = measure_smoothing_constant(
      SmoothingEstimate::MeanZeroDecay, 2.0, 2.0, 0.5, 1.0, ok, ts);
  CHECK(std::isfinite(rep.constant));
  CHECK(rep.pass);
}

TEST_CASE("operator decay estimate stays finite and grid-stable") {
  const Grid g = Grid::interval(1.0, 64);
  const std::vector<Field> set = smoothing_test_set(g, 8, 4, false, 7);
  const std::vector<double> ts = log_time_grid(1e-3, 10.0, 60);
  const SmoothingReport rep = measure_smoothing_constant(
      SmoothingEstimate::OperatorDecay, 2.0, 2.0, 0.25, 1.0, set, ts);
  CHECK(std::isfinite(rep.constant));
  // constants in the test set force C >= 1 because they only decay like e^-t
  CHECK(rep.constant >= 1.0);
  CHECK(rep.pass);

  CHECK_THROWS_AS(measure_smoothing_constant(SmoothingEstimate::OperatorDecay, 2.0,
                                             2.0, 0.25, 1.0, {}, ts),
                  std::domain_error);
}

TEST_CASE("picard iteration fixes constant equilibria") {
  const Grid g = Grid::interval(1.0, 32);

  // chi = 0 with constant u0: v relaxes toward beta u / alpha, u stays put
  ModelParams free_params;
  free_params.chi = 0.0;
  free_params.dim = 1;
  const PicardResult free_run =
      picard_solve(Field(g, 2.0), Field(g, 2.0), free_params, 0.01, 6);
  REQUIRE(free_run.diffs.size() >= 2);
  CHECK(free_run.diffs[1] < 1e-10);
  double err = 0.0;
  for (int i = 0; i < g.nx(); ++i)
    err = std::max(err, std::abs(free_run.u_slab.back()[i] - 2.0));
  CHECK(err < 1e-10);

  // steady state with chemotaxis on
  ModelParams params;
  params.dim = 1;
  params.alpha = 2.0;
  params.beta = 1.0;
  const PicardResult steady =
      picard_solve(Field(g, 3.0), Field(g, 1.5), params, 0.01, 6);
  CHECK(steady.diffs[1] < 1e-10);
}

TEST_CASE("picard contracts on a short slab") {
  ModelParams params;
  params.dim = 1;
  const Grid g = Grid::interval(1.0, 64);
  IcRecipe ic;
  ic.amplitude = 0.5;
  ic.width = 0.2;
  auto [u0, v0] = make_initial_conditions(ic, g, params);
  const PicardResult res = picard_solve(u0, v0, params, 0.01, 8);
  REQUIRE(res.ratios.size() >= 2);
  for (size_t i = 1; i < res.ratios.size(); ++i) CHECK(res.ratios[i] <= 0.5);
}

TEST_CASE("picard input guards") {
  const Grid g = Grid::interval(1.0, 16);
  ModelParams params;
  params.dim = 1;
  CHECK_THROWS_AS(picard_solve(Field(g, 1.0), Field(g, 1.0), params, 0.0, 4),
                  std::domain_error);
  CHECK_THROWS_AS(picard_solve(Field(g, 1.0), Field(g, 1.0), params, 0.01, 1),
                  std::domain_error);
  CHECK_THROWS_AS(picard_solve(Field(g, -1.0), Field(g, 1.0), params, 0.01, 4),
                  std::domain_error);
}

TEST_CASE("spectral gradient handles non-square boxes") {
  const Grid g = Grid::rectangle(1.0, 2.0, 16, 24);
  const Field f = make_field(g, [&](double x, double y) {
    return std::cos(kPi * x) * std::cos(kPi * y / 2.0);
  });
  auto [gx, gy] = spectral_gradient(f);
  double err = 0.0;
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      err = std::max(err, std::abs(gx.at(i, j) + kPi * std::sin(kPi * g.x(i)) *
                                                     std::cos(kPi * g.y(j) / 2.0)));
      err = std::max(err, std::abs(gy.at(i, j) + kPi / 2.0 * std::cos(kPi * g.x(i)) *
                                                     std::sin(kPi * g.y(j) / 2.0)));
    }
  CHECK(err < 1e-10);
}

TEST_CASE("two-dimensional oracle agrees with the stepper") {
  ModelParams params;  // chi = 0.5, dim = 2
  const Grid g = Grid::rectangle(1.0, 1.0, 24, 24);
  IcRecipe ic;
  ic.amplitude = 0.5;
  ic.width = 0.25;
  auto [u0, v0] = make_initial_conditions(ic, g, params);

  const CrossValidation cv = cross_validate(u0, v0, params, 0.005, 1e-4);
  CHECK(cv.pass);
  CHECK(cv.u_discrepancy < 5e-3);

  const PicardResult pr = picard_solve(u0, v0, params, 0.005, 6);
  for (double r : pr.ratios) CHECK(r < 0.5);
}

TEST_CASE("cross validation against the stepper") {
  ModelParams params;
  params.dim = 1;
  const Grid g = Grid::interval(1.0, 64);

  // exact steady state: both solvers sit still
  const CrossValidation steady =
      cross_validate(Field(g, 1.0), Field(g, 1.0), params, 0.01, 1e-4);
  CHECK(steady.pass);
  CHECK(steady.u_discrepancy < 1e-10);
  CHECK(steady.v_discrepancy < 1e-10);

  // pure diffusion: discrepancy is the stepper's O(dt) time error
  ModelParams diffusion = params;
  diffusion.chi = 1e-30;  // simulate() requires chi > 0; spectral flux negligible
  const Field u0 = make_field(g, [](double x) {
    return 2.0 + 0.5 * std::cos(std::numbers::pi * x);
  });
  const Field v0(g, 2.0);
  const CrossValidation coarse = cross_validate(u0, v0, diffusion, 0.01, 4e-4);
  const CrossValidation fine = cross_validate(u0, v0, diffusion, 0.01, 2e-4);
  CHECK(coarse.pass);
  CHECK(fine.pass);
  const double ratio = fine.u_discrepancy / coarse.u_discrepancy;
  CHECK(ratio > 0.3);
  CHECK(ratio < 0.7);
}

TEST_SUITE_END();
