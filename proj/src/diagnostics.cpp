#include "kslog/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace kslog {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::domain_error(msg);
}

}  // namespace

DiagSelection default_diag_selection(const ModelParams& params) {
  DiagSelection sel;
  sel.p_list.push_back(2.0);
  sel.q_list = {2.0, std::numeric_limits<double>::infinity()};
  const RegionVerdict verdict = classify_region(params);
  if (verdict.in_iplus_half_n) {
    const PInterval iv = admissible_p_interval(params);
    const double mid = iv.hi.finite() ? 0.5 * (iv.lo + iv.hi.value()) : 10.0;
    const double p_mid = std::min(mid, 10.0);
    if (std::abs(p_mid - 2.0) > 1e-12) sel.p_list.push_back(p_mid);
    if (!verdict.in_iplus_n) {
      const ExtReal q_up = gradv_q_upper(params);
      if (q_up.finite()) sel.q_list.push_back(0.9 * q_up.value());
    }
  }
  return sel;
}

double lp_norm(const Field& f, double p) {
  if (std::isinf(p)) return f.max_abs();
  require(p >= 1.0, "lp_norm: p must be >= 1 or infinity");
  double s = 0.0;
  for (double v : f.values()) s += std::pow(std::abs(v), p);
  return std::pow(s * f.grid().cell_volume(), 1.0 / p);
}

double weighted_functional(const Field& u, const Field& v, double p, double c) {
  require(p > 1.0, "weighted_functional: p must exceed 1");
  require(c > 0.0, "weighted_functional: c must be positive");
  require(u.grid() == v.grid(), "weighted_functional: fields on different grids");
  const double w_exp = (1.0 - p) / 2.0;
  double s = 0.0;
  const auto uv = u.values();
  const auto vv = v.values();
  for (int i = 0; i < u.size(); ++i)
    s += std::pow(uv[i], p) * std::pow(vv[i] + c, w_exp);
  return s * u.grid().cell_volume();
}

Field gradient_magnitude(const Field& v) {
  const Grid& g = v.grid();
  const int nx = g.nx(), ny = g.ny();
  Field gx(g), gy(g);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double fl = i > 0 ? (v.at(i, j) - v.at(i - 1, j)) / g.hx() : 0.0;
      const double fr = i < nx - 1 ? (v.at(i + 1, j) - v.at(i, j)) / g.hx() : 0.0;
      gx.at(i, j) = 0.5 * (fl + fr);
    }
  }
  if (g.dim() == 2) {
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        const double fd = j > 0 ? (v.at(i, j) - v.at(i, j - 1)) / g.hy() : 0.0;
        const double fu = j < ny - 1 ? (v.at(i, j + 1) - v.at(i, j)) / g.hy() : 0.0;
        gy.at(i, j) = 0.5 * (fd + fu);
      }
    }
  }
  Field mag(g);
  for (int idx = 0; idx < mag.size(); ++idx)
    mag[idx] = std::hypot(gx[idx], gy[idx]);
  return mag;
}

double grad_lq_norm(const Field& v, double q) {
  if (!std::isinf(q)) require(q >= 1.0, "grad_lq_norm: q must be >= 1 or infinity");
  return lp_norm(gradient_magnitude(v), q);
}

YpBoundReport check_yp_bound(std::span<const std::pair<double, double>> series,
                             double alpha, double p, double tol) {
  require(!series.empty(), "check_yp_bound: empty series");
  require(p > 1.0, "check_yp_bound: p must exceed 1");
  const double t0 = series.front().first;
  const double y0 = series.front().second;
  if (y0 <= 0.0)
    throw std::domain_error("check_yp_bound: degenerate input, y_p(0) <= 0");
  YpBoundReport rep;
  rep.tol = tol;
  for (const auto& [t, y] : series) {
    const double bound = y0 * std::exp(0.5 * alpha * (p - 1.0) * (t - t0));
    rep.max_ratio = std::max(rep.max_ratio, y / bound);
  }
  rep.pass = rep.max_ratio <= 1.0 + tol;
  return rep;
}

HolderCheck holder_interpolation_check(const Field& u, const Field& v, double p,
                                       double c) {
  require(p > 1.0, "holder_interpolation_check: p must exceed 1");
  require(c > 0.0, "holder_interpolation_check: c must be positive");
  require(u.grid() == v.grid(), "holder_interpolation_check: grids differ");
  HolderCheck out;
  out.lhs = lp_norm(u, p);
  const double y2p = weighted_functional(u, v, 2.0 * p, c);
  double vpow = 0.0;
  for (double vv : v.values()) vpow += std::pow(vv + c, p - 0.5);
  vpow *= v.grid().cell_volume();
  out.rhs = std::pow(y2p, 1.0 / (2.0 * p)) * std::pow(vpow, 1.0 / (2.0 * p));
  out.pass = out.lhs <= out.rhs * (1.0 + 1e-10);
  return out;
}

std::vector<std::pair<double, double>> running_m_tau(
    std::span<const std::pair<double, double>> sup_v_series) {
  std::vector<std::pair<double, double>> out;
  out.reserve(sup_v_series.size());
  double running = -std::numeric_limits<double>::infinity();
  double prev_t = -std::numeric_limits<double>::infinity();
  for (const auto& [t, s] : sup_v_series) {
    require(t > prev_t, "running_m_tau: timestamps must be increasing");
    prev_t = t;
    running = std::max(running, s);
    out.emplace_back(t, running);
  }
  return out;
}

DiagRecord measure_diagnostics(const Field& u, const Field& v, double t,
                               const ModelParams& params, const DiagSelection& sel,
                               double m_tau_prev) {
  DiagRecord rec;
  rec.t = t;
  rec.mass = integrate(u);
  rec.sup_u = lp_norm(u, std::numeric_limits<double>::infinity());
  rec.sup_v = lp_norm(v, std::numeric_limits<double>::infinity());
  rec.m_tau = std::max(m_tau_prev, rec.sup_v);
  for (double p : sel.p_list) {
    rec.lp_u.emplace_back(p, lp_norm(u, p));
    rec.yp.emplace_back(p, weighted_functional(u, v, p, params.c));
  }
  Field grad = gradient_magnitude(v);
  for (double q : sel.q_list) rec.grad_v_lq.emplace_back(q, lp_norm(grad, q));
  return rec;
}

std::string exponent_label(double p) {
  if (std::isinf(p)) return "inf";
  std::ostringstream os;
  os.precision(12);
  os << p;
  return os.str();
}

void write_diag_csv(std::span<const DiagRecord> series, const DiagSelection& sel,
                    std::ostream& os) {
  os << "t,mass,sup_u,sup_v";
  for (double p : sel.p_list) os << ",lp_u_" << exponent_label(p);
  for (double p : sel.p_list) os << ",yp_" << exponent_label(p);
  for (double q : sel.q_list) os << ",gradv_" << exponent_label(q);
  os << '\n';
  os.precision(17);
  for (const DiagRecord& r : series) {
    os << r.t << ',' << r.mass << ',' << r.sup_u << ',' << r.sup_v;
    for (const auto& [p, val] : r.lp_u) os << ',' << val;
    for (const auto& [p, val] : r.yp) os << ',' << val;
    for (const auto& [q, val] : r.grad_v_lq) os << ',' << val;
    os << '\n';
  }
}

void write_diag_csv(std::span<const DiagRecord> series, const DiagSelection& sel,
                    const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_diag_csv: cannot open " + path.string());
  write_diag_csv(series, sel, os);
}

}  // namespace kslog
