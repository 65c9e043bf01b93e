#include "kslog/run_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace kslog {

namespace {

[[noreturn]] void parse_fail(const std::string& name, int line, const std::string& msg) {
  throw std::invalid_argument(name + ":" + std::to_string(line) + ": " + msg);
}

std::string trim(std::string_view sv) {
  const auto begin = sv.find_first_not_of(" \t\r");
  if (begin == std::string_view::npos) return "";
  const auto end = sv.find_last_not_of(" \t\r");
  return std::string(sv.substr(begin, end - begin + 1));
}

double parse_double(const std::string& name, int line, const std::string& v) {
  if (v == "inf") return std::numeric_limits<double>::infinity();
  try {
    size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) parse_fail(name, line, "trailing characters in number '" + v + "'");
    return d;
  } catch (const std::invalid_argument&) {
    parse_fail(name, line, "expected a number, got '" + v + "'");
  } catch (const std::out_of_range&) {
    parse_fail(name, line, "number out of range: '" + v + "'");
  }
}

int parse_int(const std::string& name, int line, const std::string& v) {
  int out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    parse_fail(name, line, "expected an integer, got '" + v + "'");
  return out;
}

bool parse_bool(const std::string& name, int line, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  parse_fail(name, line, "expected true/false, got '" + v + "'");
}

std::vector<double> parse_list(const std::string& name, int line, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_double(name, line, item));
  }
  return out;
}

std::string format_double(double v) {
  if (std::isinf(v)) return "inf";
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string format_list(const std::vector<double>& vs) {
  std::string out;
  for (size_t i = 0; i < vs.size(); ++i) {
    if (i) out += ",";
    out += format_double(vs[i]);
  }
  return out;
}

IcKind parse_ic_kind(const std::string& name, int line, const std::string& v) {
  if (v == "constant") return IcKind::Constant;
  if (v == "gaussian_bump") return IcKind::GaussianBump;
  if (v == "cosine_mode") return IcKind::CosineMode;
  if (v == "from_file") return IcKind::FromFile;
  parse_fail(name, line, "unknown ic kind '" + v + "'");
}

const char* ic_kind_name(IcKind k) {
  switch (k) {
    case IcKind::Constant: return "constant";
    case IcKind::GaussianBump: return "gaussian_bump";
    case IcKind::CosineMode: return "cosine_mode";
    case IcKind::FromFile: return "from_file";
  }
  return "gaussian_bump";
}

}  // namespace

ModelParams RunConfig::effective_params() const {
  if (!use_raw) return model;
  ScaledSystem scaled = scale_parameters(raw, model.dim);
  return scaled.params;
}

Grid RunConfig::make_grid() const {
  return model.dim == 1 ? Grid::interval(lx, nx) : Grid::rectangle(lx, ly, nx, ny);
}

SweepSpec RunConfig::make_sweep_spec() const {
  SweepSpec spec;
  spec.chi_grid = chi_grid;
  spec.k_grid = k_grid;
  spec.base = effective_params();
  spec.grid = make_grid();
  spec.ic = ic;
  spec.config = stepper;
  spec.parallelism = parallelism;
  spec.window = window;
  return spec;
}

void RunConfig::validate() const {
  effective_params().validate_simulation();
  make_grid();  // throws on bad grid parameters
  stepper.validate();
  if (ic.kind == IcKind::FromFile && (ic.u_file.empty() || ic.v_file.empty()))
    throw std::invalid_argument("config: from_file ic requires u_file and v_file");
  if (!auto_diags) {
    for (double p : diags.p_list)
      if (!(p > 1.0)) throw std::invalid_argument("config: diagnostics p values must exceed 1");
    for (double q : diags.q_list)
      if (!(q >= 1.0)) throw std::invalid_argument("config: diagnostics q values must be >= 1");
  }
}

RunConfig RunConfig::parse(std::istream& is, const std::string& name) {
  RunConfig cfg;
  std::string section;
  std::string line_text;
  int line = 0;
  while (std::getline(is, line_text)) {
    ++line;
    const auto comment = line_text.find_first_of("#;");
    if (comment != std::string::npos) line_text.erase(comment);
    const std::string text = trim(line_text);
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']') parse_fail(name, line, "unterminated section header");
      section = trim(text.substr(1, text.size() - 2));
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) parse_fail(name, line, "expected key = value");
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (key.empty()) parse_fail(name, line, "empty key");

    auto num = [&]() { return parse_double(name, line, value); };
    auto integer = [&]() { return parse_int(name, line, value); };

    if (section == "model") {
      if (key == "use_raw") cfg.use_raw = parse_bool(name, line, value);
      else if (key == "chi") cfg.model.chi = num();
      else if (key == "k") cfg.model.k = num();
      else if (key == "alpha") cfg.model.alpha = num();
      else if (key == "beta") cfg.model.beta = num();
      else if (key == "c") { cfg.model.c = num(); cfg.raw.c = cfg.model.c; }
      else if (key == "dim") cfg.model.dim = integer();
      else if (key == "d1") cfg.raw.d1 = num();
      else if (key == "d2") cfg.raw.d2 = num();
      else if (key == "chi0") cfg.raw.chi0 = num();
      else if (key == "c1") cfg.raw.c1 = num();
      else if (key == "c2") cfg.raw.c2 = num();
      else parse_fail(name, line, "unknown [model] key '" + key + "'");
    } else if (section == "grid") {
      if (key == "lx") cfg.lx = num();
      else if (key == "ly") cfg.ly = num();
      else if (key == "nx") cfg.nx = integer();
      else if (key == "ny") cfg.ny = integer();
      else parse_fail(name, line, "unknown [grid] key '" + key + "'");
    } else if (section == "stepper") {
      if (key == "dt0") cfg.stepper.dt0 = num();
      else if (key == "t_end") cfg.stepper.t_end = num();
      else if (key == "cfl_safety") cfg.stepper.cfl_safety = num();
      else if (key == "dt_min") cfg.stepper.dt_min = num();
      else if (key == "blowup_factor") cfg.stepper.blowup_factor = num();
      else if (key == "snapshot_every") cfg.stepper.snapshot_every = num();
      else if (key == "scheme") {
        if (value == "imex") cfg.stepper.scheme = Scheme::ImexEuler;
        else if (value == "explicit") cfg.stepper.scheme = Scheme::ExplicitEuler;
        else parse_fail(name, line, "scheme must be imex or explicit");
      } else parse_fail(name, line, "unknown [stepper] key '" + key + "'");
    } else if (section == "ic") {
      if (key == "kind") cfg.ic.kind = parse_ic_kind(name, line, value);
      else if (key == "value") cfg.ic.value = num();
      else if (key == "amplitude") cfg.ic.amplitude = num();
      else if (key == "width") cfg.ic.width = num();
      else if (key == "mode") cfg.ic.mode = integer();
      else if (key == "u_file") cfg.ic.u_file = value;
      else if (key == "v_file") cfg.ic.v_file = value;
      else parse_fail(name, line, "unknown [ic] key '" + key + "'");
    } else if (section == "diagnostics") {
      if (key == "p_list") {
        if (value == "auto") cfg.auto_diags = true;
        else { cfg.auto_diags = false; cfg.diags.p_list = parse_list(name, line, value); }
      } else if (key == "q_list") {
        if (value != "auto") { cfg.auto_diags = false; cfg.diags.q_list = parse_list(name, line, value); }
      } else parse_fail(name, line, "unknown [diagnostics] key '" + key + "'");
    } else if (section == "output") {
      if (key == "dir") cfg.out_dir = value;
      else parse_fail(name, line, "unknown [output] key '" + key + "'");
    } else if (section == "run") {
      if (key == "seed") {
        try {
          cfg.seed = static_cast<std::uint64_t>(std::stoull(value));
        } catch (const std::exception&) {
          parse_fail(name, line, "expected an unsigned integer seed, got '" + value + "'");
        }
      } else parse_fail(name, line, "unknown [run] key '" + key + "'");
    } else if (section == "sweep") {
      if (key == "chi_grid") cfg.chi_grid = parse_list(name, line, value);
      else if (key == "k_grid") cfg.k_grid = parse_list(name, line, value);
      else if (key == "parallelism") cfg.parallelism = integer();
      else if (key == "window") cfg.window = num();
      else parse_fail(name, line, "unknown [sweep] key '" + key + "'");
    } else if (section.empty()) {
      parse_fail(name, line, "key outside any section");
    } else {
      parse_fail(name, line, "unknown section [" + section + "]");
    }
  }
  return cfg;
}

RunConfig RunConfig::parse_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("cannot open config file " + path.string());
  return parse(is, path.filename().string());
}

RunConfig RunConfig::parse_string(const std::string& text) {
  std::istringstream is(text);
  return parse(is);
}

std::string RunConfig::serialize() const {
  std::ostringstream os;
  os << "[model]\n";
  os << "use_raw = " << (use_raw ? "true" : "false") << '\n';
  os << "chi = " << format_double(model.chi) << '\n';
  os << "k = " << format_double(model.k) << '\n';
  os << "alpha = " << format_double(model.alpha) << '\n';
  os << "beta = " << format_double(model.beta) << '\n';
  os << "c = " << format_double(model.c) << '\n';
  os << "dim = " << model.dim << '\n';
  os << "d1 = " << format_double(raw.d1) << '\n';
  os << "d2 = " << format_double(raw.d2) << '\n';
  os << "chi0 = " << format_double(raw.chi0) << '\n';
  os << "c1 = " << format_double(raw.c1) << '\n';
  os << "c2 = " << format_double(raw.c2) << '\n';
  os << "\n[grid]\n";
  os << "lx = " << format_double(lx) << '\n';
  os << "ly = " << format_double(ly) << '\n';
  os << "nx = " << nx << '\n';
  os << "ny = " << ny << '\n';
  os << "\n[stepper]\n";
  os << "dt0 = " << format_double(stepper.dt0) << '\n';
  os << "t_end = " << format_double(stepper.t_end) << '\n';
  os << "cfl_safety = " << format_double(stepper.cfl_safety) << '\n';
  os << "dt_min = " << format_double(stepper.dt_min) << '\n';
  os << "blowup_factor = " << format_double(stepper.blowup_factor) << '\n';
  os << "snapshot_every = " << format_double(stepper.snapshot_every) << '\n';
  os << "scheme = " << (stepper.scheme == Scheme::ImexEuler ? "imex" : "explicit") << '\n';
  os << "\n[ic]\n";
  os << "kind = " << ic_kind_name(ic.kind) << '\n';
  os << "value = " << format_double(ic.value) << '\n';
  os << "amplitude = " << format_double(ic.amplitude) << '\n';
  os << "width = " << format_double(ic.width) << '\n';
  os << "mode = " << ic.mode << '\n';
  if (!ic.u_file.empty()) os << "u_file = " << ic.u_file << '\n';
  if (!ic.v_file.empty()) os << "v_file = " << ic.v_file << '\n';
  os << "\n[diagnostics]\n";
  if (auto_diags) {
    os << "p_list = auto\n";
  } else {
    os << "p_list = " << format_list(diags.p_list) << '\n';
    os << "q_list = " << format_list(diags.q_list) << '\n';
  }
  os << "\n[output]\n";
  os << "dir = " << out_dir << '\n';
  os << "\n[run]\n";
  os << "seed = " << seed << '\n';
  if (!chi_grid.empty() || !k_grid.empty()) {
    os << "\n[sweep]\n";
    os << "chi_grid = " << format_list(chi_grid) << '\n';
    os << "k_grid = " << format_list(k_grid) << '\n';
    os << "parallelism = " << parallelism << '\n';
    os << "window = " << format_double(window) << '\n';
  }
  return os.str();
}

bool RunConfig::operator==(const RunConfig& o) const {
  auto raw_eq = [](const RawParams& a, const RawParams& b) {
    return a.d1 == b.d1 && a.d2 == b.d2 && a.chi0 == b.chi0 && a.c1 == b.c1 &&
           a.c2 == b.c2 && a.c == b.c;
  };
  auto stepper_eq = [](const StepperConfig& a, const StepperConfig& b) {
    return a.dt0 == b.dt0 && a.t_end == b.t_end && a.cfl_safety == b.cfl_safety &&
           a.dt_min == b.dt_min && a.blowup_factor == b.blowup_factor &&
           a.snapshot_every == b.snapshot_every && a.scheme == b.scheme;
  };
  auto ic_eq = [](const IcRecipe& a, const IcRecipe& b) {
    return a.kind == b.kind && a.value == b.value && a.amplitude == b.amplitude &&
           a.width == b.width && a.mode == b.mode && a.u_file == b.u_file &&
           a.v_file == b.v_file;
  };
  return use_raw == o.use_raw && raw_eq(raw, o.raw) && model == o.model &&
         lx == o.lx && ly == o.ly && nx == o.nx && ny == o.ny &&
         stepper_eq(stepper, o.stepper) && ic_eq(ic, o.ic) &&
         auto_diags == o.auto_diags && diags.p_list == o.diags.p_list &&
         diags.q_list == o.diags.q_list && out_dir == o.out_dir && seed == o.seed &&
         chi_grid == o.chi_grid && k_grid == o.k_grid &&
         parallelism == o.parallelism && window == o.window;
}

RunResult execute_run(const RunConfig& cfg, const std::filesystem::path& out_dir) {
  cfg.validate();
  const ModelParams params = cfg.effective_params();
  const Grid grid = cfg.make_grid();
  auto [u0, v0] = make_initial_conditions(cfg.ic, grid, params);
  const DiagSelection sel =
      cfg.auto_diags ? default_diag_selection(params) : cfg.diags;

  const RunResult result = simulate(u0, v0, params, cfg.stepper, &sel);

  std::filesystem::create_directories(out_dir);
  write_diag_csv(result.series, sel, out_dir / "diagnostics.csv");

  const std::filesystem::path snap_dir = out_dir / "snapshots";
  std::filesystem::create_directories(snap_dir);
  write_binary(result.final_state.u, snap_dir / "u_final.bin");
  write_binary(result.final_state.v, snap_dir / "v_final.bin");
  write_csv(result.final_state.u, snap_dir / "u_final.csv");
  write_csv(result.final_state.v, snap_dir / "v_final.csv");

  nlohmann::json summary;
  summary["termination"] = to_string(result.termination);
  summary["t_final"] = result.t_final;
  summary["params"] = {{"chi", params.chi}, {"k", params.k},
                       {"alpha", params.alpha}, {"beta", params.beta},
                       {"c", params.c}, {"dim", params.dim}};
  summary["extremes"] = {{"peak_sup_u", result.peak_sup_u},
                         {"min_u", result.min_u_seen},
                         {"min_v", result.min_v_seen},
                         {"final_mass", result.series.back().mass},
                         {"final_sup_u", result.series.back().sup_u},
                         {"final_sup_v", result.series.back().sup_v}};
  summary["steps"] = {{"accepted", result.accepted_steps},
                      {"rejected", result.rejected_steps}};
  std::ofstream js(out_dir / "summary.json");
  if (!js) throw std::runtime_error("execute_run: cannot open summary.json");
  js << summary.dump(2) << '\n';

  return result;
}

}  // namespace kslog
