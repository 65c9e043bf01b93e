#pragma once

#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "kslog/grid.hpp"
#include "kslog/params.hpp"

namespace kslog {

/// One diagnostic sample of a running simulation.
struct DiagRecord {
  double t = 0.0;
  double mass = 0.0;   // integral of u
  double sup_u = 0.0;  // L-inf norms
  double sup_v = 0.0;
  double m_tau = 0.0;  // running sup of sup_v since t = 0
  std::vector<std::pair<double, double>> lp_u;      // (p, ||u||_p)
  std::vector<std::pair<double, double>> yp;        // (p, y_p)
  std::vector<std::pair<double, double>> grad_v_lq; // (q, ||grad v||_q)
};

/// Which exponents a run monitors. Defaults derive from the parameter region.
struct DiagSelection {
  std::vector<double> p_list;  // for ||u||_p and y_p
  std::vector<double> q_list;  // for ||grad v||_q; may contain infinity
};

/// Default exponents: p = 2 plus the midpoint of the admissible interval
/// (capped at 10 when unbounded); q = {2, inf} plus 0.9 * gradv_q_upper in
/// the border region. Outside I+(N/2) only p = 2 and q = {2, inf} remain.
DiagSelection default_diag_selection(const ModelParams& params);

/// (integral |f|^p)^(1/p) by midpoint quadrature; max |f| for p = inf.
double lp_norm(const Field& f, double p);

/// y_p = integral of u^p (v + c)^((1-p)/2).
double weighted_functional(const Field& u, const Field& v, double p, double c);

/// Cell-centered gradient magnitude: central differences at faces averaged
/// per cell, Euclidean norm across axes.
Field gradient_magnitude(const Field& v);

/// lp_norm of the gradient magnitude.
double grad_lq_norm(const Field& v, double q);

struct YpBoundReport {
  double max_ratio = 0.0;  // max over samples of y_p(t) / (y_p(0) e^(alpha (p-1) t / 2))
  bool pass = false;
  double tol = 1e-3;
};

/// Checks the exponential envelope y_p(t) <= y_p(0) e^(alpha (p-1) t / 2).
YpBoundReport check_yp_bound(std::span<const std::pair<double, double>> series,
                             double alpha, double p, double tol = 1e-3);

struct HolderCheck {
  double lhs = 0.0;  // ||u||_p
  double rhs = 0.0;  // y_2p^(1/2p) * (integral (v+c)^(p-1/2))^(1/2p)
  bool pass = false;
};

/// ||u||_p <= y_2p^(1/(2p)) ||v+c||_{p-1/2}^((p-1/2)/(2p)), exact on the
/// discrete sums, with slack 1e-10 for round-off.
HolderCheck holder_interpolation_check(const Field& u, const Field& v, double p,
                                       double c);

/// Running maximum of a sup_v series; output is nondecreasing.
std::vector<std::pair<double, double>> running_m_tau(
    std::span<const std::pair<double, double>> sup_v_series);

/// Measures one record; m_tau_prev is the running sup of sup_v before t.
DiagRecord measure_diagnostics(const Field& u, const Field& v, double t,
                               const ModelParams& params, const DiagSelection& sel,
                               double m_tau_prev);

/// Series CSV with the fixed header
/// t,mass,sup_u,sup_v,lp_u_{p}...,yp_{p}...,gradv_{q}...
void write_diag_csv(std::span<const DiagRecord> series, const DiagSelection& sel,
                    std::ostream& os);
void write_diag_csv(std::span<const DiagRecord> series, const DiagSelection& sel,
                    const std::filesystem::path& path);

/// Short exponent label used in CSV headers ("2", "2.5", "inf").
std::string exponent_label(double p);

}  // namespace kslog
