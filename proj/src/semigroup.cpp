#include "kslog/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <stdexcept>

#include "kslog/diagnostics.hpp"
#include "kslog/stepper.hpp"

namespace kslog {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::domain_error(msg);
}

// tab[m * n + j] = trig(pi m (j + 1/2) / n), cached per axis size
const std::vector<double>& cos_table(int n) {
  thread_local std::map<int, std::vector<double>> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<double> tab(static_cast<size_t>(n) * n);
  for (int m = 0; m < n; ++m)
    for (int j = 0; j < n; ++j)
      tab[m * n + j] = std::cos(std::numbers::pi * m * (j + 0.5) / n);
  return cache.emplace(n, std::move(tab)).first->second;
}

const std::vector<double>& sin_table(int n) {
  thread_local std::map<int, std::vector<double>> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<double> tab(static_cast<size_t>(n) * n);
  for (int m = 0; m < n; ++m)
    for (int j = 0; j < n; ++j)
      tab[m * n + j] = std::sin(std::numbers::pi * m * (j + 0.5) / n);
  return cache.emplace(n, std::move(tab)).first->second;
}

// Applies an n x n kernel along one axis of a flat 2D array.
template <typename Kernel>
void transform_lines(std::vector<double>& vals, int n, int count, int stride,
                     int line_stride, Kernel&& kernel) {
  std::vector<double> in(n), out(n);
  for (int line = 0; line < count; ++line) {
    const int base = line * line_stride;
    for (int i = 0; i < n; ++i) in[i] = vals[base + i * stride];
    kernel(in, out);
    for (int i = 0; i < n; ++i) vals[base + i * stride] = out[i];
  }
}

void dct_analysis(std::vector<double>& vals, int n, int count, int stride,
                  int line_stride) {
  const auto& tab = cos_table(n);
  transform_lines(vals, n, count, stride, line_stride,
                  [&](const std::vector<double>& in, std::vector<double>& out) {
                    for (int m = 0; m < n; ++m) {
                      double s = 0.0;
                      const double* row = tab.data() + m * n;
                      for (int j = 0; j < n; ++j) s += in[j] * row[j];
                      out[m] = (m == 0 ? 1.0 : 2.0) * s / n;
                    }
                  });
}

void dct_synthesis(std::vector<double>& vals, int n, int count, int stride,
                   int line_stride) {
  const auto& tab = cos_table(n);
  transform_lines(vals, n, count, stride, line_stride,
                  [&](const std::vector<double>& in, std::vector<double>& out) {
                    for (int j = 0; j < n; ++j) {
                      double s = 0.0;
                      for (int m = 0; m < n; ++m) s += in[m] * tab[m * n + j];
                      out[j] = s;
                    }
                  });
}

// Sine-basis analysis (modes 1..n-1; slot 0 unused and set to zero).
void dst_analysis(std::vector<double>& vals, int n, int count, int stride,
                  int line_stride) {
  const auto& tab = sin_table(n);
  transform_lines(vals, n, count, stride, line_stride,
                  [&](const std::vector<double>& in, std::vector<double>& out) {
                    out[0] = 0.0;
                    for (int m = 1; m < n; ++m) {
                      double s = 0.0;
                      const double* row = tab.data() + m * n;
                      for (int j = 0; j < n; ++j) s += in[j] * row[j];
                      out[m] = 2.0 * s / n;
                    }
                  });
}

// From cosine coefficients a_m to the sampled derivative
// sum_m a_m * (-m pi / L) sin(m pi x / L).
void sine_derivative_synthesis(std::vector<double>& vals, int n, int count,
                               int stride, int line_stride, double length) {
  const auto& tab = sin_table(n);
  const double pi_over_l = std::numbers::pi / length;
  transform_lines(vals, n, count, stride, line_stride,
                  [&](const std::vector<double>& in, std::vector<double>& out) {
                    for (int j = 0; j < n; ++j) {
                      double s = 0.0;
                      for (int m = 1; m < n; ++m)
                        s -= in[m] * m * pi_over_l * tab[m * n + j];
                      out[j] = s;
                    }
                  });
}

double axis_eigenvalue(int mode, double length) {
  const double w = mode * std::numbers::pi / length;
  return w * w;
}

}  // namespace

SpectralField::SpectralField(const Grid& grid, std::vector<double> coeffs)
    : grid_(grid), coeffs_(std::move(coeffs)) {
  require(static_cast<int>(coeffs_.size()) == grid_.cell_count(),
          "SpectralField: coefficient count must match the grid");
}

double SpectralField::eigenvalue(int idx) const {
  const int mx = idx % grid_.nx();
  const int my = idx / grid_.nx();
  double lam = axis_eigenvalue(mx, grid_.lx());
  if (grid_.dim() == 2) lam += axis_eigenvalue(my, grid_.ly());
  return lam;
}

SpectralField to_spectral(const Field& f) {
  const Grid& g = f.grid();
  std::vector<double> c(f.values().begin(), f.values().end());
  dct_analysis(c, g.nx(), g.ny(), 1, g.nx());
  if (g.dim() == 2) dct_analysis(c, g.ny(), g.nx(), g.nx(), 1);
  return SpectralField(g, std::move(c));
}

Field from_spectral(const SpectralField& s) {
  const Grid& g = s.grid();
  std::vector<double> v(s.coeffs().begin(), s.coeffs().end());
  if (g.dim() == 2) dct_synthesis(v, g.ny(), g.nx(), g.nx(), 1);
  dct_synthesis(v, g.nx(), g.ny(), 1, g.nx());
  return Field(g, std::move(v));
}

SpectralField apply_semigroup(const SpectralField& s, double t, double k,
                              double shift) {
  require(t >= 0.0, "apply_semigroup: t must be nonnegative");
  require(k > 0.0, "apply_semigroup: k must be positive");
  std::vector<double> c(s.coeffs().begin(), s.coeffs().end());
  for (int i = 0; i < s.size(); ++i)
    c[i] *= std::exp(-(k * s.eigenvalue(i) + shift) * t);
  return SpectralField(s.grid(), std::move(c));
}

SpectralField apply_fractional_power(const SpectralField& s, double theta,
                                     double shift) {
  std::vector<double> c(s.coeffs().begin(), s.coeffs().end());
  for (int i = 0; i < s.size(); ++i)
    c[i] *= std::pow(s.eigenvalue(i) + shift, theta);
  return SpectralField(s.grid(), std::move(c));
}

std::pair<Field, Field> spectral_gradient(const Field& f) {
  return spectral_gradient(to_spectral(f));
}

std::pair<Field, Field> spectral_gradient(const SpectralField& spec) {
  const Grid& g = spec.grid();

  std::vector<double> gx(spec.coeffs().begin(), spec.coeffs().end());
  if (g.dim() == 2) dct_synthesis(gx, g.ny(), g.nx(), g.nx(), 1);
  sine_derivative_synthesis(gx, g.nx(), g.ny(), 1, g.nx(), g.lx());

  Field gy_field(g);
  if (g.dim() == 2) {
    std::vector<double> gy(spec.coeffs().begin(), spec.coeffs().end());
    dct_synthesis(gy, g.nx(), g.ny(), 1, g.nx());
    sine_derivative_synthesis(gy, g.ny(), g.nx(), g.nx(), 1, g.ly());
    gy_field = Field(g, std::move(gy));
  }
  return {Field(g, std::move(gx)), std::move(gy_field)};
}

double first_neumann_eigenvalue(const Grid& g) {
  double nu = axis_eigenvalue(1, g.lx());
  if (g.dim() == 2) nu = std::min(nu, axis_eigenvalue(1, g.ly()));
  return nu;
}

namespace {

// Cosine coefficients of div F for a flux with zero normal boundary trace;
// each component is expanded in the sine basis along its own axis.
std::vector<double> divergence_coeffs(const Field& fx, const Field& fy) {
  const Grid& g = fx.grid();
  std::vector<double> cx(fx.values().begin(), fx.values().end());
  dst_analysis(cx, g.nx(), g.ny(), 1, g.nx());
  const double pix = std::numbers::pi / g.lx();
  for (int j = 0; j < g.ny(); ++j)
    for (int m = 0; m < g.nx(); ++m) cx[j * g.nx() + m] *= m * pix;
  if (g.dim() == 2) dct_analysis(cx, g.ny(), g.nx(), g.nx(), 1);

  if (g.dim() == 2) {
    std::vector<double> cy(fy.values().begin(), fy.values().end());
    dst_analysis(cy, g.ny(), g.nx(), g.nx(), 1);
    const double piy = std::numbers::pi / g.ly();
    for (int m = 0; m < g.ny(); ++m)
      for (int i = 0; i < g.nx(); ++i) cy[m * g.nx() + i] *= m * piy;
    dct_analysis(cy, g.nx(), g.ny(), 1, g.nx());
    for (size_t i = 0; i < cx.size(); ++i) cx[i] += cy[i];
  }
  return cx;
}

struct BarycentricSlab {
  std::vector<double> nodes;    // ascending in [0, T]
  std::vector<double> weights;  // Chebyshev-Lobatto barycentric weights

  Field interpolate(std::span<const Field> fields, double s) const {
    const int m = static_cast<int>(nodes.size());
    for (int i = 0; i < m; ++i)
      if (s == nodes[i]) return fields[i];
    Field out(fields[0].grid());
    double denom = 0.0;
    std::vector<double> coef(m);
    for (int i = 0; i < m; ++i) {
      coef[i] = weights[i] / (s - nodes[i]);
      denom += coef[i];
    }
    for (int i = 0; i < m; ++i) {
      const double a = coef[i] / denom;
      const auto vals = fields[i].values();
      for (int idx = 0; idx < out.size(); ++idx) out[idx] += a * vals[idx];
    }
    return out;
  }
};

BarycentricSlab chebyshev_lobatto(double T, int count) {
  BarycentricSlab slab;
  slab.nodes.resize(count);
  slab.weights.resize(count);
  for (int i = 0; i < count; ++i) {
    slab.nodes[i] = 0.5 * T * (1.0 - std::cos(std::numbers::pi * i / (count - 1)));
    slab.weights[i] = (i % 2 == 0 ? 1.0 : -1.0);
  }
  slab.weights.front() *= 0.5;
  slab.weights.back() *= 0.5;
  return slab;
}

double sup_norm(const Field& f) { return f.max_abs(); }

double grad_sup_norm(const Field& f) {
  auto [gx, gy] = spectral_gradient(f);
  double m = 0.0;
  for (int i = 0; i < f.size(); ++i)
    m = std::max(m, std::hypot(gx[i], gy[i]));
  return m;
}

constexpr int kSlabNodes = 17;
constexpr int kQuadPoints = 64;

}  // namespace

PicardResult picard_solve(const Field& u0, const Field& v0,
                          const ModelParams& params, double T, int n_iter) {
  params.validate_analysis();
  require(params.chi >= 0.0, "picard_solve: chi must be nonnegative");
  require(params.dim == 1 || params.dim == 2, "picard_solve: dim must be 1 or 2");
  require(u0.grid() == v0.grid(), "picard_solve: grids differ");
  require(u0.grid().dim() == params.dim, "picard_solve: grid/params dim mismatch");
  require(T > 0.0, "picard_solve: T must be positive");
  require(n_iter >= 2, "picard_solve: need at least 2 iterations");
  require(u0.min() >= 0.0 && v0.min() >= 0.0,
          "picard_solve: initial data must be nonnegative");

  const Grid& g = u0.grid();
  const BarycentricSlab slab = chebyshev_lobatto(T, kSlabNodes);

  PicardResult res;
  res.times = slab.nodes;
  res.u_slab.assign(kSlabNodes, u0);
  res.v_slab.assign(kSlabNodes, v0);

  const SpectralField u0_hat = to_spectral(u0);
  const SpectralField v0_hat = to_spectral(v0);

  const double scale = std::max({sup_norm(u0), sup_norm(v0), 1.0});
  int rising = 0;

  for (int iter = 0; iter < n_iter; ++iter) {
    std::vector<Field> u_new, v_new;
    u_new.reserve(kSlabNodes);
    v_new.reserve(kSlabNodes);
    u_new.push_back(u0);
    v_new.push_back(v0);

    for (int node = 1; node < kSlabNodes; ++node) {
      const double t = slab.nodes[node];
      const double ds = t / kQuadPoints;
      std::vector<double> acc_u(g.cell_count(), 0.0);
      std::vector<double> acc_v(g.cell_count(), 0.0);

      for (int qp = 0; qp < kQuadPoints; ++qp) {
        const double s = (qp + 0.5) * ds;
        const Field us = slab.interpolate(res.u_slab, s);
        const Field vs = slab.interpolate(res.v_slab, s);
        auto [gvx, gvy] = spectral_gradient(vs);

        Field fx(g), fy(g);
        for (int i = 0; i < fx.size(); ++i) {
          const double factor = params.chi * us[i] / (vs[i] + params.c);
          fx[i] = factor * gvx[i];
          if (g.dim() == 2) fy[i] = factor * gvy[i];
        }
        const std::vector<double> div_hat = divergence_coeffs(fx, fy);
        const SpectralField us_hat = to_spectral(us);
        const SpectralField vs_hat = to_spectral(vs);

        const double tau = t - s;
        for (int m = 0; m < g.cell_count(); ++m) {
          const double lam = u0_hat.eigenvalue(m);
          const double damp_u = std::exp(-(lam + 1.0) * tau);
          const double damp_v = std::exp(-(params.k * lam + 1.0) * tau);
          acc_u[m] += ds * damp_u * (us_hat.coeffs()[m] - div_hat[m]);
          acc_v[m] += ds * damp_v * ((1.0 - params.alpha) * vs_hat.coeffs()[m] +
                                     params.beta * us_hat.coeffs()[m]);
        }
      }

      for (int m = 0; m < g.cell_count(); ++m) {
        const double lam = u0_hat.eigenvalue(m);
        acc_u[m] += std::exp(-(lam + 1.0) * t) * u0_hat.coeffs()[m];
        acc_v[m] += std::exp(-(params.k * lam + 1.0) * t) * v0_hat.coeffs()[m];
      }
      u_new.push_back(from_spectral(SpectralField(g, std::move(acc_u))));
      v_new.push_back(from_spectral(SpectralField(g, std::move(acc_v))));
    }

    double du = 0.0, dv = 0.0;
    for (int node = 0; node < kSlabNodes; ++node) {
      Field diff_u(g), diff_v(g);
      for (int i = 0; i < diff_u.size(); ++i) {
        diff_u[i] = u_new[node][i] - res.u_slab[node][i];
        diff_v[i] = v_new[node][i] - res.v_slab[node][i];
      }
      du = std::max(du, sup_norm(diff_u));
      dv = std::max(dv, sup_norm(diff_v) + grad_sup_norm(diff_v));
    }
    const double d = du + dv;
    res.u_slab = std::move(u_new);
    res.v_slab = std::move(v_new);
    res.diffs.push_back(d);

    const size_t n = res.diffs.size();
    if (n >= 2 && res.diffs[n - 1] > res.diffs[n - 2]) {
      if (++rising >= 3)
        throw std::runtime_error(
            "picard_solve: successive differences grew 3 times in a row; "
            "shrink the slab length T");
    } else {
      rising = 0;
    }
    if (d < 1e-15 * scale) break;  // converged to round-off
  }

  for (size_t i = 0; i + 1 < res.diffs.size(); ++i)
    res.ratios.push_back(res.diffs[i] > 0.0 ? res.diffs[i + 1] / res.diffs[i] : 0.0);
  return res;
}

CrossValidation cross_validate(const Field& u0, const Field& v0,
                               const ModelParams& params, double T, double dt,
                               double tolerance) {
  require(dt > 0.0 && dt <= T, "cross_validate: need 0 < dt <= T");
  PicardResult picard = picard_solve(u0, v0, params, T, 24);
  const Field& u_ref = picard.u_slab.back();
  const Field& v_ref = picard.v_slab.back();

  const SimState end = integrate_fixed_dt(u0, v0, params, dt, T);

  CrossValidation out;
  out.tolerance = tolerance;
  Field du(u0.grid()), dv(u0.grid());
  for (int i = 0; i < du.size(); ++i) {
    du[i] = u_ref[i] - end.u[i];
    dv[i] = v_ref[i] - end.v[i];
  }
  out.u_discrepancy = sup_norm(du) / sup_norm(end.u);
  out.v_discrepancy = sup_norm(dv) / sup_norm(end.v);
  out.pass = out.u_discrepancy < tolerance && out.v_discrepancy < tolerance;
  return out;
}

SmoothingReport measure_smoothing_constant(SmoothingEstimate estimate, double p,
                                           double q, double theta, double k,
                                           std::span<const Field> test_set,
                                           std::span<const double> t_grid) {
  require(!test_set.empty(), "measure_smoothing_constant: empty test set");
  require(!t_grid.empty(), "measure_smoothing_constant: empty time grid");
  require(p >= 1.0 && q >= p, "measure_smoothing_constant: need 1 <= p <= q");
  require(k > 0.0, "measure_smoothing_constant: k must be positive");
  if (estimate != SmoothingEstimate::GradientDecay)
    require(theta > 0.0 && theta < 1.0,
            "measure_smoothing_constant: theta must lie in (0, 1)");

  const Grid& g = test_set.front().grid();
  const double nu = first_neumann_eigenvalue(g);
  const double n_half = 0.5 * g.dim();
  const double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
  const double inv_q = std::isinf(q) ? 0.0 : 1.0 / q;

  auto rate = [&](double t) {
    const double decay = std::exp(-nu * t);
    if (estimate == SmoothingEstimate::GradientDecay)
      return (1.0 + std::pow(t, -0.5 - n_half * (inv_p - inv_q))) * decay;
    return std::pow(t, -theta - n_half * (inv_p - inv_q)) * decay;
  };

  auto measure_one = [&](const Field& w, double t) {
    const SpectralField w_hat = to_spectral(w);
    double lhs = 0.0;
    if (estimate == SmoothingEstimate::GradientDecay) {
      auto [gx, gy] = spectral_gradient(apply_semigroup(w_hat, t, 1.0, 0.0));
      Field mag(g);
      for (int i = 0; i < mag.size(); ++i) mag[i] = std::hypot(gx[i], gy[i]);
      lhs = lp_norm(mag, q);
    } else {
      const double shift = estimate == SmoothingEstimate::OperatorDecay ? 1.0 : 0.0;
      SpectralField damped = apply_semigroup(w_hat, t, 1.0, shift);
      damped = apply_fractional_power(damped, theta, 1.0);
      lhs = lp_norm(from_spectral(damped), q);
    }
    return lhs / (rate(t) * lp_norm(w, p));
  };

  for (const Field& w : test_set) {
    require(w.grid() == g, "measure_smoothing_constant: mixed grids");
    require(w.max_abs() > 0.0, "measure_smoothing_constant: zero test field");
    if (estimate == SmoothingEstimate::MeanZeroDecay)
      require(std::abs(integrate(w)) <= 1e-10 * w.max_abs() * g.volume(),
              "measure_smoothing_constant: mean-zero data required");
  }

  auto sup_over = [&](std::span<const double> ts) {
    double sup = 0.0;
    for (const Field& w : test_set)
      for (double t : ts) {
        require(t > 0.0, "measure_smoothing_constant: times must be positive");
        sup = std::max(sup, measure_one(w, t));
      }
    return sup;
  };

  SmoothingReport rep;
  rep.nu = nu;
  rep.constant = sup_over(t_grid);

  std::vector<double> refined(t_grid.begin(), t_grid.end());
  std::sort(refined.begin(), refined.end());
  std::vector<double> mids;
  for (size_t i = 0; i + 1 < refined.size(); ++i)
    mids.push_back(std::sqrt(refined[i] * refined[i + 1]));
  refined.insert(refined.end(), mids.begin(), mids.end());
  rep.refined = sup_over(refined);

  rep.ratio = rep.refined / rep.constant;
  rep.pass = std::isfinite(rep.refined) && rep.ratio < 1.05;
  return rep;
}

std::vector<Field> smoothing_test_set(const Grid& g, int n_random, int max_mode,
                                      bool mean_zero, std::uint64_t seed) {
  std::vector<Field> set;
  for (int m = 1; m <= max_mode; ++m) {
    set.push_back(make_field(g, [&](double x, double y) {
      double f = std::cos(m * std::numbers::pi * x / g.lx());
      (void)y;
      return f;
    }));
    if (g.dim() == 2)
      set.push_back(make_field(g, [&](double /*x*/, double y) {
        return std::cos(m * std::numbers::pi * y / g.ly());
      }));
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int r = 0; r < n_random; ++r) {
    Field f(g);
    for (int i = 0; i < f.size(); ++i) f[i] = unif(rng);
    if (mean_zero) {
      const double mean = integrate(f) / g.volume();
      for (int i = 0; i < f.size(); ++i) f[i] -= mean;
    }
    set.push_back(std::move(f));
  }
  return set;
}

std::vector<double> log_time_grid(double t_min, double t_max, int count) {
  require(t_min > 0.0 && t_max > t_min && count >= 2, "log_time_grid: bad range");
  std::vector<double> ts(count);
  const double ratio = std::log(t_max / t_min);
  for (int i = 0; i < count; ++i)
    ts[i] = t_min * std::exp(ratio * i / (count - 1));
  return ts;
}

}  // namespace kslog
