#include "kslog/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace kslog {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::domain_error(msg);
}

constexpr double kNegativityFloor = -1e-13;
constexpr double kCflEpsilon = 1e-30;

// Thomas solver for (I - a * lap_1d) with Neumann closure; the constant
// coefficients let one forward-elimination pass serve every line.
class TridiagNeumann {
 public:
  TridiagNeumann(int n, double r) : n_(n), cp_(n), inv_denom_(n) {
    // diagonal: 1 + r at the two ends, 1 + 2r inside; off-diagonal: -r
    double denom = 1.0 + r;
    inv_denom_[0] = 1.0 / denom;
    cp_[0] = -r * inv_denom_[0];
    for (int i = 1; i < n; ++i) {
      const double diag = (i == n - 1) ? 1.0 + r : 1.0 + 2.0 * r;
      denom = diag + r * cp_[i - 1];
      inv_denom_[i] = 1.0 / denom;
      cp_[i] = -r * inv_denom_[i];
    }
    r_ = r;
  }

  void solve(double* line, int stride) const {
    line[0] *= inv_denom_[0];
    for (int i = 1; i < n_; ++i) {
      const int idx = i * stride;
      line[idx] = (line[idx] + r_ * line[idx - stride]) * inv_denom_[i];
    }
    for (int i = n_ - 2; i >= 0; --i) {
      const int idx = i * stride;
      line[idx] -= cp_[i] * line[idx + stride];
    }
  }

 private:
  int n_;
  double r_;
  std::vector<double> cp_;
  std::vector<double> inv_denom_;
};

// Solves (I - a lap_x)(I - a lap_y) x = rhs in place.
void implicit_diffusion(Field& f, double a) {
  const Grid& g = f.grid();
  double* vals = f.data().data();
  {
    const TridiagNeumann solver(g.nx(), a / (g.hx() * g.hx()));
    for (int j = 0; j < g.ny(); ++j) solver.solve(vals + j * g.nx(), 1);
  }
  if (g.dim() == 2) {
    const TridiagNeumann solver(g.ny(), a / (g.hy() * g.hy()));
    for (int i = 0; i < g.nx(); ++i) solver.solve(vals + i, g.nx());
  }
}

double max_face_gradient(const Field& v) {
  const Grid& g = v.grid();
  double m = 0.0;
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i + 1 < g.nx(); ++i)
      m = std::max(m, std::abs(v.at(i + 1, j) - v.at(i, j)) / g.hx());
  if (g.dim() == 2)
    for (int j = 0; j + 1 < g.ny(); ++j)
      for (int i = 0; i < g.nx(); ++i)
        m = std::max(m, std::abs(v.at(i, j + 1) - v.at(i, j)) / g.hy());
  return m;
}

void add_source(Field& f, const std::function<double(double, double, double)>& s,
                double dt, double t) {
  if (!s) return;
  const Grid& g = f.grid();
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) f.at(i, j) += dt * s(g.x(i), g.y(j), t);
}

// Returns false when a genuine negative value appears; round-off negatives
// in [-1e-13, 0) are clamped to zero.
bool clamp_or_reject(Field& f) {
  for (double& v : f.data()) {
    if (v < kNegativityFloor) return false;
    if (v < 0.0) v = 0.0;
  }
  return true;
}

}  // namespace

void StepperConfig::validate() const {
  require(dt0 > dt_min && dt_min > 0, "StepperConfig: need dt0 > dt_min > 0");
  require(t_end > 0, "StepperConfig: t_end must be positive");
  require(cfl_safety > 0 && cfl_safety <= 1, "StepperConfig: cfl_safety in (0,1]");
  require(blowup_factor > 1, "StepperConfig: blowup_factor must exceed 1");
  require(snapshot_every > 0, "StepperConfig: snapshot_every must be positive");
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::Completed: return "Completed";
    case Termination::BlowUpDetected: return "BlowUpDetected";
    case Termination::DtUnderflow: return "DtUnderflow";
  }
  return "Completed";
}

double cfl_dt_bound(const SimState& state, const ModelParams& params,
                    const StepperConfig& config) {
  const Grid& g = state.u.grid();
  const double h = g.dim() == 2 ? std::min(g.hx(), g.hy()) : g.hx();
  const double vmin = state.v.min();
  const double gmax = max_face_gradient(state.v);
  const double denom =
      2.0 * params.dim * params.chi * gmax * h + kCflEpsilon;
  double bound = config.cfl_safety * h * h * (vmin + params.c) / denom;
  if (config.scheme == Scheme::ExplicitEuler) {
    const double diff = h * h / (2.0 * params.dim * std::max(1.0, params.k));
    bound = std::min(bound, config.cfl_safety * diff);
  }
  return bound;
}

std::optional<SimState> step(const SimState& state, double dt,
                             const ModelParams& params, const StepperConfig& config,
                             const SourceTerms* src) {
  require(dt > 0, "step: dt must be positive");
  require(state.u.grid() == state.v.grid(), "step: u and v grids differ");

  SimState next{state.u, state.v, state.t + dt};
  const Field chemo = chemotaxis_divergence(state.u, state.v, params.chi, params.c);

  if (config.scheme == Scheme::ImexEuler) {
    for (int i = 0; i < next.u.size(); ++i) next.u[i] -= dt * chemo[i];
    if (src) add_source(next.u, src->u, dt, state.t);
    implicit_diffusion(next.u, dt);

    const double decay = 1.0 / (1.0 + params.alpha * dt);
    for (int i = 0; i < next.v.size(); ++i)
      next.v[i] = (next.v[i] + dt * params.beta * state.u[i]);
    if (src) add_source(next.v, src->v, dt, state.t);
    for (double& v : next.v.data()) v *= decay;
    implicit_diffusion(next.v, params.k * dt * decay);
  } else {
    const Field lap_u = laplacian_neumann(state.u);
    const Field lap_v = laplacian_neumann(state.v);
    for (int i = 0; i < next.u.size(); ++i)
      next.u[i] += dt * (lap_u[i] - chemo[i]);
    for (int i = 0; i < next.v.size(); ++i)
      next.v[i] += dt * (params.k * lap_v[i] - params.alpha * state.v[i] +
                         params.beta * state.u[i]);
    if (src) {
      add_source(next.u, src->u, dt, state.t);
      add_source(next.v, src->v, dt, state.t);
    }
  }

  if (!clamp_or_reject(next.u) || !clamp_or_reject(next.v)) return std::nullopt;
  return next;
}

namespace {

void validate_initial_data(const Field& u0, const Field& v0) {
  require(u0.grid() == v0.grid(), "initial data on different grids");
  require(u0.min() >= 0.0 && v0.min() >= 0.0, "initial data must be nonnegative");
  require(u0.max() > 0.0 || v0.max() > 0.0,
          "initial data must not both be identically zero");
}

}  // namespace

RunResult simulate(const Field& ic_u, const Field& ic_v, const ModelParams& params,
                   const StepperConfig& config, const DiagSelection* selection,
                   const SourceTerms* src) {
  params.validate_simulation();
  config.validate();
  validate_initial_data(ic_u, ic_v);
  require(ic_u.grid().dim() == params.dim, "simulate: grid/params dim mismatch");

  const DiagSelection sel =
      selection ? *selection : default_diag_selection(params);

  RunResult res;
  res.selection = sel;
  SimState state{ic_u, ic_v, 0.0};
  const double sup_u0 = lp_norm(ic_u, std::numeric_limits<double>::infinity());
  res.min_u_seen = ic_u.min();
  res.min_v_seen = ic_v.min();
  res.peak_sup_u = sup_u0;

  double m_tau = 0.0;
  auto record = [&](double t) {
    if (!res.series.empty() && t <= res.series.back().t) return;
    DiagRecord rec = measure_diagnostics(state.u, state.v, t, params, sel, m_tau);
    m_tau = rec.m_tau;
    res.series.push_back(std::move(rec));
  };
  record(0.0);

  double dt = config.dt0;
  double next_snapshot = config.snapshot_every;
  int accepted_streak = 0;
  Termination term = Termination::Completed;
  const double t_eps = 1e-14 * config.t_end;

  while (state.t < config.t_end - t_eps) {
    const double bound = cfl_dt_bound(state, params, config);
    const double dt_try = std::min({dt, bound, config.t_end - state.t});
    if (dt_try < config.dt_min) {
      term = Termination::DtUnderflow;
      break;
    }
    std::optional<SimState> next = step(state, dt_try, params, config, src);
    if (!next) {
      ++res.rejected_steps;
      dt = dt_try / 2.0;
      accepted_streak = 0;
      if (dt < config.dt_min) {
        term = Termination::DtUnderflow;
        break;
      }
      continue;
    }
    state = std::move(*next);
    ++res.accepted_steps;
    res.min_u_seen = std::min(res.min_u_seen, state.u.min());
    res.min_v_seen = std::min(res.min_v_seen, state.v.min());
    const double sup_u = state.u.max();
    res.peak_sup_u = std::max(res.peak_sup_u, sup_u);

    if (sup_u > config.blowup_factor * sup_u0) {
      term = Termination::BlowUpDetected;
      break;
    }
    if (++accepted_streak >= 10) {
      dt *= 1.2;
      accepted_streak = 0;
    }
    if (state.t >= next_snapshot - 1e-12) {
      record(state.t);
      while (next_snapshot <= state.t + 1e-12) next_snapshot += config.snapshot_every;
    }
  }

  // the last step targets t_end exactly; absorb the final-ulp shortfall
  if (term == Termination::Completed) state.t = std::max(state.t, config.t_end);
  record(state.t);
  res.termination = term;
  res.t_final = state.t;
  res.final_state = std::move(state);
  return res;
}

SimState integrate_fixed_dt(const Field& ic_u, const Field& ic_v,
                            const ModelParams& params, double dt, double t_end,
                            const SourceTerms* src, Scheme scheme) {
  params.validate_analysis();
  require(params.chi >= 0.0, "integrate_fixed_dt: chi must be nonnegative");
  validate_initial_data(ic_u, ic_v);
  require(dt > 0 && t_end > 0, "integrate_fixed_dt: dt and t_end must be positive");

  StepperConfig config;
  config.scheme = scheme;
  const long long n_steps = std::llround(t_end / dt);
  require(n_steps >= 1, "integrate_fixed_dt: t_end shorter than dt");
  const double dt_eff = t_end / static_cast<double>(n_steps);

  SimState state{ic_u, ic_v, 0.0};
  for (long long i = 0; i < n_steps; ++i) {
    std::optional<SimState> next = step(state, dt_eff, params, config, src);
    if (!next)
      throw std::runtime_error(
          "integrate_fixed_dt: step rejected (negative values); dt too large");
    state = std::move(*next);
    state.t = dt_eff * static_cast<double>(i + 1);
  }
  return state;
}

TwinRunReport twin_run_divergence(const Field& ic_u, const Field& ic_v,
                                  double perturbation_size,
                                  const ModelParams& params,
                                  const StepperConfig& config) {
  params.validate_simulation();
  config.validate();
  validate_initial_data(ic_u, ic_v);
  require(perturbation_size >= 0.0,
          "twin_run_divergence: perturbation size must be nonnegative");

  const Grid& g = ic_u.grid();
  Field delta = make_field(g, [&](double x, double y) {
    double d = std::cos(std::numbers::pi * x / g.lx());
    if (g.dim() == 2) d *= std::cos(std::numbers::pi * y / g.ly());
    return d;
  });
  const double norm = lp_norm(delta, 2.0);
  Field u0b = ic_u;
  for (int i = 0; i < u0b.size(); ++i)
    u0b[i] += perturbation_size / norm * delta[i];
  require(u0b.min() >= 0.0,
          "twin_run_divergence: perturbation drives u negative; reduce size");

  SimState a{ic_u, ic_v, 0.0};
  SimState b{u0b, ic_v, 0.0};

  TwinRunReport rep;
  auto energy = [&]() {
    Field du(g), dv(g);
    for (int i = 0; i < du.size(); ++i) {
      du[i] = a.u[i] - b.u[i];
      dv[i] = a.v[i] - b.v[i];
    }
    const double l2u = lp_norm(du, 2.0);
    const double l2v = lp_norm(dv, 2.0);
    const double l2gv = lp_norm(gradient_magnitude(dv), 2.0);
    return l2u * l2u + l2v * l2v + l2gv * l2gv;
  };
  rep.e0 = energy();
  rep.series.emplace_back(0.0, rep.e0);

  double dt = config.dt0;
  double next_snapshot = config.snapshot_every;
  int accepted_streak = 0;
  const double t_eps = 1e-14 * config.t_end;

  while (a.t < config.t_end - t_eps) {
    const double bound =
        std::min(cfl_dt_bound(a, params, config), cfl_dt_bound(b, params, config));
    const double dt_try = std::min({dt, bound, config.t_end - a.t});
    if (dt_try < config.dt_min) break;
    std::optional<SimState> na = step(a, dt_try, params, config);
    std::optional<SimState> nb = step(b, dt_try, params, config);
    if (!na || !nb) {
      dt = dt_try / 2.0;
      accepted_streak = 0;
      if (dt < config.dt_min) break;
      continue;
    }
    a = std::move(*na);
    b = std::move(*nb);
    if (++accepted_streak >= 10) {
      dt *= 1.2;
      accepted_streak = 0;
    }
    if (a.t >= next_snapshot - 1e-12) {
      rep.series.emplace_back(a.t, energy());
      while (next_snapshot <= a.t + 1e-12) next_snapshot += config.snapshot_every;
    }
  }
  if (rep.series.back().first < a.t) rep.series.emplace_back(a.t, energy());

  // least-squares slope of log E plus the tightest envelope exponent
  rep.bounded = true;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  rep.lambda_envelope = 0.0;
  for (const auto& [t, e] : rep.series) {
    if (!std::isfinite(e)) rep.bounded = false;
    if (e <= 0.0) continue;
    const double le = std::log(e);
    sx += t;
    sy += le;
    sxx += t * t;
    sxy += t * le;
    ++count;
    if (t > 0.0 && rep.e0 > 0.0)
      rep.lambda_envelope = std::max(rep.lambda_envelope, std::log(e / rep.e0) / t);
  }
  const double det = count * sxx - sx * sx;
  rep.lambda_fit = (count >= 2 && det != 0.0) ? (count * sxy - sx * sy) / det : 0.0;
  return rep;
}

namespace {

// Forced solution shared by the manufactured-solution checks.
struct Manufactured {
  ModelParams params;

  double w(double x, double t) const {
    return 2.0 + std::cos(std::numbers::pi * x) * std::exp(-t);
  }
  double wt(double x, double t) const {
    return -std::cos(std::numbers::pi * x) * std::exp(-t);
  }
  double wx(double x, double t) const {
    return -std::numbers::pi * std::sin(std::numbers::pi * x) * std::exp(-t);
  }
  double wxx(double x, double t) const {
    const double pi2 = std::numbers::pi * std::numbers::pi;
    return -pi2 * std::cos(std::numbers::pi * x) * std::exp(-t);
  }

  double source_u(double x, double t) const {
    const double W = w(x, t), Wx = wx(x, t), Wxx = wxx(x, t);
    const double wc = W + params.c;
    const double flux_div =
        params.chi * ((Wx * Wx + W * Wxx) / wc - W * Wx * Wx / (wc * wc));
    return wt(x, t) - Wxx + flux_div;
  }
  double source_v(double x, double t) const {
    const double W = w(x, t);
    return wt(x, t) - params.k * wxx(x, t) + params.alpha * W - params.beta * W;
  }

  SourceTerms sources() const {
    return SourceTerms{
        [this](double x, double, double t) { return source_u(x, t); },
        [this](double x, double, double t) { return source_v(x, t); }};
  }
};

double mms_l2_error(const Field& f, const Manufactured& mfg, double t) {
  Field diff = f;
  const Grid& g = f.grid();
  for (int i = 0; i < g.nx(); ++i) diff[i] -= mfg.w(g.x(i), t);
  return lp_norm(diff, 2.0);
}

}  // namespace

MmsReport mms_convergence(std::span<const int> levels, const ModelParams& params,
                          double t_end, double dt) {
  require(levels.size() >= 3, "mms_convergence: need at least 3 levels");
  for (size_t i = 0; i + 1 < levels.size(); ++i)
    require(levels[i + 1] == 2 * levels[i],
            "mms_convergence: levels must double");
  ModelParams p1 = params;
  p1.dim = 1;
  const Manufactured mfg{p1};
  const SourceTerms src = mfg.sources();

  MmsReport rep;
  for (int n : levels) {
    const Grid g = Grid::interval(1.0, n);
    const Field u0 = make_field(g, [&](double x) { return mfg.w(x, 0.0); });
    const SimState end = integrate_fixed_dt(u0, u0, p1, dt, t_end, &src);
    rep.levels.push_back(n);
    rep.err_u.push_back(mms_l2_error(end.u, mfg, t_end));
    rep.err_v.push_back(mms_l2_error(end.v, mfg, t_end));
  }
  for (size_t i = 0; i + 1 < rep.err_u.size(); ++i) {
    rep.order_u.push_back(std::log2(rep.err_u[i] / rep.err_u[i + 1]));
    rep.order_v.push_back(std::log2(rep.err_v[i] / rep.err_v[i + 1]));
  }
  return rep;
}

double mms_one_step_error(int cells, const ModelParams& params, double dt) {
  ModelParams p1 = params;
  p1.dim = 1;
  const Manufactured mfg{p1};
  const SourceTerms src = mfg.sources();
  const Grid g = Grid::interval(1.0, cells);
  const Field u0 = make_field(g, [&](double x) { return mfg.w(x, 0.0); });
  StepperConfig config;
  const SimState state{u0, u0, 0.0};
  std::optional<SimState> next = step(state, dt, p1, config, &src);
  if (!next) throw std::runtime_error("mms_one_step_error: step rejected");
  const double eu = mms_l2_error(next->u, mfg, dt);
  const double ev = mms_l2_error(next->v, mfg, dt);
  return std::max(eu, ev);
}

}  // namespace kslog
