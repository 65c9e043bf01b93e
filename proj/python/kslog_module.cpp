#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "kslog/diagnostics.hpp"
#include "kslog/run_config.hpp"
#include "kslog/semigroup.hpp"
#include "kslog/stepper.hpp"
#include "kslog/sweep.hpp"

namespace py = pybind11;
using namespace kslog;

namespace {

double ext(const ExtReal& r) { return r.raw(); }

py::array_t<double> field_to_numpy(const Field& f) {
  const Grid& g = f.grid();
  if (g.dim() == 1) {
    py::array_t<double> out(g.nx());
    std::copy(f.values().begin(), f.values().end(), out.mutable_data());
    return out;
  }
  py::array_t<double> out({g.ny(), g.nx()});
  std::copy(f.values().begin(), f.values().end(), out.mutable_data());
  return out;
}

Field field_from_numpy(const Grid& g, py::array_t<double, py::array::c_style | py::array::forcecast> arr) {
  if (arr.size() != g.cell_count())
    throw std::invalid_argument("array size does not match the grid");
  std::vector<double> vals(arr.data(), arr.data() + arr.size());
  return Field(g, std::move(vals));
}

}  // namespace

PYBIND11_MODULE(_kslog, m) {
  m.doc() = "Simulator and analysis toolkit for a chemotaxis system with "
            "saturated logarithmic sensitivity";

  py::register_exception<std::domain_error>(m, "DomainError", PyExc_ValueError);

  // parameters and region analysis
  py::class_<RawParams>(m, "RawParams")
      .def(py::init([](double d1, double d2, double chi0, double c1, double c2,
                       double c) {
             return RawParams{d1, d2, chi0, c1, c2, c};
           }),
           py::arg("d1"), py::arg("d2"), py::arg("chi0"), py::arg("c1"),
           py::arg("c2"), py::arg("c"))
      .def_readwrite("d1", &RawParams::d1)
      .def_readwrite("d2", &RawParams::d2)
      .def_readwrite("chi0", &RawParams::chi0)
      .def_readwrite("c1", &RawParams::c1)
      .def_readwrite("c2", &RawParams::c2)
      .def_readwrite("c", &RawParams::c);

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init([](double chi, double k, double alpha, double beta, double c,
                       int dim) {
             ModelParams p;
             p.chi = chi;
             p.k = k;
             p.alpha = alpha;
             p.beta = beta;
             p.c = c;
             p.dim = dim;
             return p;
           }),
           py::arg("chi") = 0.5, py::arg("k") = 1.0, py::arg("alpha") = 1.0,
           py::arg("beta") = 1.0, py::arg("c") = 1.0, py::arg("dim") = 2)
      .def_readwrite("chi", &ModelParams::chi)
      .def_readwrite("k", &ModelParams::k)
      .def_readwrite("alpha", &ModelParams::alpha)
      .def_readwrite("beta", &ModelParams::beta)
      .def_readwrite("c", &ModelParams::c)
      .def_readwrite("dim", &ModelParams::dim);

  py::class_<Thresholds>(m, "Thresholds")
      .def_readonly("k1", &Thresholds::k1)
      .def_readonly("k2", &Thresholds::k2)
      .def_readonly("chi1", &Thresholds::chi1)
      .def_readonly("chi2", &Thresholds::chi2);

  py::enum_<RegionLabel>(m, "RegionLabel")
      .value("StrongRegion", RegionLabel::StrongRegion)
      .value("BorderRegion", RegionLabel::BorderRegion)
      .value("Outside", RegionLabel::Outside);

  py::class_<RegionVerdict>(m, "RegionVerdict")
      .def_readonly("in_iplus_half_n", &RegionVerdict::in_iplus_half_n)
      .def_readonly("in_iplus_n", &RegionVerdict::in_iplus_n)
      .def_readonly("theorem_applies", &RegionVerdict::theorem_applies)
      .def_readonly("label", &RegionVerdict::label);

  m.def("scale_parameters",
        [](const RawParams& raw, int dim) {
          const ScaledSystem s = scale_parameters(raw, dim);
          return py::make_tuple(s.params, s.time_scale);
        },
        py::arg("raw"), py::arg("dim") = 2);
  m.def("unscale_parameters", &unscale_parameters, py::arg("params"),
        py::arg("time_scale"));
  m.def("f_indicator", &f_indicator, py::arg("p"), py::arg("chi"), py::arg("k"));
  m.def("thresholds", &thresholds, py::arg("dim"), py::arg("k"));
  m.def("classify_region", &classify_region, py::arg("params"));
  m.def("admissible_p_interval",
        [](const ModelParams& p) {
          const PInterval iv = admissible_p_interval(p);
          return py::make_tuple(iv.lo, iv.hi.raw());
        },
        py::arg("params"));
  m.def("gradv_q_upper",
        [](const ModelParams& p) { return ext(gradv_q_upper(p)); },
        py::arg("params"));
  m.def("bootstrap_sequence",
        [](double mu1, const ModelParams& p, int max_iters) {
          std::vector<double> out;
          for (const ExtReal& mu : bootstrap_sequence(mu1, p, max_iters))
            out.push_back(mu.raw());
          return out;
        },
        py::arg("mu1"), py::arg("params"), py::arg("max_iters") = 10000);
  m.def("verify_eq16_equivalence",
        [](double p, const ModelParams& params, std::vector<double> v_samples) {
          const Eq16Check c = verify_eq16_equivalence(p, params, v_samples);
          return py::make_tuple(c.consistent, c.f_value, c.lhs_values);
        },
        py::arg("p"), py::arg("params"), py::arg("v_samples"));

  // grids and fields
  py::class_<Grid>(m, "Grid")
      .def_static("interval", &Grid::interval, py::arg("length"), py::arg("cells"))
      .def_static("rectangle", &Grid::rectangle, py::arg("lx"), py::arg("ly"),
                  py::arg("nx"), py::arg("ny"))
      .def_property_readonly("dim", &Grid::dim)
      .def_property_readonly("nx", &Grid::nx)
      .def_property_readonly("ny", &Grid::ny)
      .def_property_readonly("lx", &Grid::lx)
      .def_property_readonly("ly", &Grid::ly)
      .def_property_readonly("hx", &Grid::hx)
      .def_property_readonly("hy", &Grid::hy)
      .def_property_readonly("cell_count", &Grid::cell_count)
      .def_property_readonly("cell_volume", &Grid::cell_volume)
      .def("__eq__", [](const Grid& a, const Grid& b) { return a == b; });

  py::class_<Field>(m, "Field")
      .def(py::init<const Grid&, double>(), py::arg("grid"), py::arg("fill") = 0.0)
      .def(py::init(&field_from_numpy), py::arg("grid"), py::arg("values"))
      .def_property_readonly("grid", &Field::grid)
      .def("to_numpy", &field_to_numpy)
      .def("min", &Field::min)
      .def("max", &Field::max);

  m.def("laplacian_neumann", &laplacian_neumann, py::arg("f"));
  m.def("chemotaxis_divergence", &chemotaxis_divergence, py::arg("u"),
        py::arg("v"), py::arg("chi"), py::arg("c"));
  m.def("integrate", &integrate, py::arg("f"));
  m.def("write_binary", &write_binary, py::arg("f"), py::arg("path"));
  m.def("read_binary", &read_binary, py::arg("path"));

  // diagnostics
  m.def("lp_norm", &lp_norm, py::arg("f"), py::arg("p"));
  m.def("weighted_functional", &weighted_functional, py::arg("u"), py::arg("v"),
        py::arg("p"), py::arg("c"));
  m.def("grad_lq_norm", &grad_lq_norm, py::arg("v"), py::arg("q"));
  m.def("holder_interpolation_check",
        [](const Field& u, const Field& v, double p, double c) {
          const HolderCheck h = holder_interpolation_check(u, v, p, c);
          return py::make_tuple(h.lhs, h.rhs, h.pass);
        },
        py::arg("u"), py::arg("v"), py::arg("p"), py::arg("c"));
  m.def("check_yp_bound",
        [](std::vector<std::pair<double, double>> series, double alpha, double p,
           double tol) {
          const YpBoundReport r = check_yp_bound(series, alpha, p, tol);
          return py::make_tuple(r.max_ratio, r.pass);
        },
        py::arg("series"), py::arg("alpha"), py::arg("p"), py::arg("tol") = 1e-3);
  m.def("running_m_tau",
        [](std::vector<std::pair<double, double>> series) {
          return running_m_tau(series);
        },
        py::arg("sup_v_series"));

  py::class_<DiagSelection>(m, "DiagSelection")
      .def(py::init<>())
      .def_readwrite("p_list", &DiagSelection::p_list)
      .def_readwrite("q_list", &DiagSelection::q_list);
  m.def("default_diag_selection", &default_diag_selection, py::arg("params"));

  py::class_<DiagRecord>(m, "DiagRecord")
      .def_readonly("t", &DiagRecord::t)
      .def_readonly("mass", &DiagRecord::mass)
      .def_readonly("sup_u", &DiagRecord::sup_u)
      .def_readonly("sup_v", &DiagRecord::sup_v)
      .def_readonly("m_tau", &DiagRecord::m_tau)
      .def_readonly("lp_u", &DiagRecord::lp_u)
      .def_readonly("yp", &DiagRecord::yp)
      .def_readonly("grad_v_lq", &DiagRecord::grad_v_lq);

  // time stepping
  py::enum_<Scheme>(m, "Scheme")
      .value("ImexEuler", Scheme::ImexEuler)
      .value("ExplicitEuler", Scheme::ExplicitEuler);

  py::class_<StepperConfig>(m, "StepperConfig")
      .def(py::init<>())
      .def_readwrite("dt0", &StepperConfig::dt0)
      .def_readwrite("t_end", &StepperConfig::t_end)
      .def_readwrite("cfl_safety", &StepperConfig::cfl_safety)
      .def_readwrite("dt_min", &StepperConfig::dt_min)
      .def_readwrite("blowup_factor", &StepperConfig::blowup_factor)
      .def_readwrite("snapshot_every", &StepperConfig::snapshot_every)
      .def_readwrite("scheme", &StepperConfig::scheme);

  py::enum_<Termination>(m, "Termination")
      .value("Completed", Termination::Completed)
      .value("BlowUpDetected", Termination::BlowUpDetected)
      .value("DtUnderflow", Termination::DtUnderflow);

  py::class_<SimState>(m, "SimState")
      .def_property_readonly("u", [](const SimState& s) { return s.u; })
      .def_property_readonly("v", [](const SimState& s) { return s.v; })
      .def_readonly("t", &SimState::t);

  py::class_<RunResult>(m, "RunResult")
      .def_readonly("termination", &RunResult::termination)
      .def_readonly("t_final", &RunResult::t_final)
      .def_readonly("series", &RunResult::series)
      .def_readonly("min_u_seen", &RunResult::min_u_seen)
      .def_readonly("min_v_seen", &RunResult::min_v_seen)
      .def_readonly("peak_sup_u", &RunResult::peak_sup_u)
      .def_readonly("accepted_steps", &RunResult::accepted_steps)
      .def_readonly("rejected_steps", &RunResult::rejected_steps)
      .def_property_readonly("final_state",
                             [](const RunResult& r) { return r.final_state; });

  m.def("simulate",
        [](const Field& u0, const Field& v0, const ModelParams& params,
           const StepperConfig& config) {
          return simulate(u0, v0, params, config);
        },
        py::arg("ic_u"), py::arg("ic_v"), py::arg("params"), py::arg("config"));
  m.def("twin_run_divergence",
        [](const Field& u0, const Field& v0, double size,
           const ModelParams& params, const StepperConfig& config) {
          const TwinRunReport r = twin_run_divergence(u0, v0, size, params, config);
          return py::make_tuple(r.series, r.lambda_fit, r.lambda_envelope,
                                r.bounded);
        },
        py::arg("ic_u"), py::arg("ic_v"), py::arg("perturbation_size"),
        py::arg("params"), py::arg("config"));
  m.def("mms_convergence",
        [](std::vector<int> levels, const ModelParams& params, double t_end,
           double dt) {
          const MmsReport r = mms_convergence(levels, params, t_end, dt);
          return py::make_tuple(r.err_u, r.err_v, r.order_u, r.order_v);
        },
        py::arg("levels"), py::arg("params"), py::arg("t_end"), py::arg("dt"));

  // spectral tools
  m.def("first_neumann_eigenvalue", &first_neumann_eigenvalue, py::arg("grid"));
  m.def("picard_solve",
        [](const Field& u0, const Field& v0, const ModelParams& params, double T,
           int n_iter) {
          const PicardResult r = picard_solve(u0, v0, params, T, n_iter);
          return py::make_tuple(r.times, r.diffs, r.ratios, r.u_slab.back(),
                                r.v_slab.back());
        },
        py::arg("ic_u"), py::arg("ic_v"), py::arg("params"), py::arg("T"),
        py::arg("n_iter") = 8);
  m.def("cross_validate",
        [](const Field& u0, const Field& v0, const ModelParams& params, double T,
           double dt, double tolerance) {
          const CrossValidation c = cross_validate(u0, v0, params, T, dt, tolerance);
          return py::make_tuple(c.u_discrepancy, c.v_discrepancy, c.pass);
        },
        py::arg("ic_u"), py::arg("ic_v"), py::arg("params"), py::arg("T"),
        py::arg("dt") = 1e-4, py::arg("tolerance") = 1e-2);

  // sweeps
  py::enum_<IcKind>(m, "IcKind")
      .value("Constant", IcKind::Constant)
      .value("GaussianBump", IcKind::GaussianBump)
      .value("CosineMode", IcKind::CosineMode)
      .value("FromFile", IcKind::FromFile);

  py::class_<IcRecipe>(m, "IcRecipe")
      .def(py::init<>())
      .def_readwrite("kind", &IcRecipe::kind)
      .def_readwrite("value", &IcRecipe::value)
      .def_readwrite("amplitude", &IcRecipe::amplitude)
      .def_readwrite("width", &IcRecipe::width)
      .def_readwrite("mode", &IcRecipe::mode)
      .def_readwrite("u_file", &IcRecipe::u_file)
      .def_readwrite("v_file", &IcRecipe::v_file);

  m.def("make_initial_conditions", &make_initial_conditions, py::arg("recipe"),
        py::arg("grid"), py::arg("params"));

  py::enum_<Outcome>(m, "Outcome")
      .value("Bounded", Outcome::Bounded)
      .value("Growing", Outcome::Growing)
      .value("NumericalBlowup", Outcome::NumericalBlowup)
      .value("DtUnderflow", Outcome::DtUnderflow);

  py::class_<SweepSpec>(m, "SweepSpec")
      .def(py::init<>())
      .def_readwrite("chi_grid", &SweepSpec::chi_grid)
      .def_readwrite("k_grid", &SweepSpec::k_grid)
      .def_readwrite("base", &SweepSpec::base)
      .def_readwrite("grid", &SweepSpec::grid)
      .def_readwrite("ic", &SweepSpec::ic)
      .def_readwrite("config", &SweepSpec::config)
      .def_readwrite("parallelism", &SweepSpec::parallelism)
      .def_readwrite("window", &SweepSpec::window);

  py::class_<SweepEntry>(m, "SweepEntry")
      .def_readonly("chi", &SweepEntry::chi)
      .def_readonly("k", &SweepEntry::k)
      .def_readonly("ok", &SweepEntry::ok)
      .def_readonly("error", &SweepEntry::error)
      .def_readonly("outcome", &SweepEntry::outcome)
      .def_readonly("verdict", &SweepEntry::verdict)
      .def_readonly("peak_sup_u", &SweepEntry::peak_sup_u)
      .def_readonly("t_final", &SweepEntry::t_final);

  py::class_<SweepResult>(m, "SweepResult")
      .def_readonly("chi_grid", &SweepResult::chi_grid)
      .def_readonly("k_grid", &SweepResult::k_grid)
      .def_readonly("entries", &SweepResult::entries);

  m.def("run_sweep", &run_sweep, py::arg("spec"),
        py::call_guard<py::gil_scoped_release>());
  m.def("emit_region_map", &emit_region_map, py::arg("sweep"), py::arg("dir"));

  // run configs
  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def_static("parse_file", &RunConfig::parse_file, py::arg("path"))
      .def_static("parse_string", &RunConfig::parse_string, py::arg("text"))
      .def("serialize", &RunConfig::serialize)
      .def("validate", &RunConfig::validate)
      .def("effective_params", &RunConfig::effective_params)
      .def("make_grid", &RunConfig::make_grid)
      .def_readwrite("model", &RunConfig::model)
      .def_readwrite("nx", &RunConfig::nx)
      .def_readwrite("ny", &RunConfig::ny)
      .def_readwrite("lx", &RunConfig::lx)
      .def_readwrite("ly", &RunConfig::ly)
      .def_readwrite("stepper", &RunConfig::stepper)
      .def_readwrite("ic", &RunConfig::ic)
      .def_readwrite("out_dir", &RunConfig::out_dir)
      .def("__eq__",
           [](const RunConfig& a, const RunConfig& b) { return a == b; });

  m.def("execute_run", &execute_run, py::arg("config"), py::arg("out_dir"));
}
