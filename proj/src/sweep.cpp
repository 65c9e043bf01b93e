#include "kslog/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace kslog {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::domain_error(msg);
}

}  // namespace

std::pair<Field, Field> make_initial_conditions(const IcRecipe& recipe,
                                                const Grid& grid,
                                                const ModelParams& params) {
  const double v_level = params.beta / params.alpha;
  switch (recipe.kind) {
    case IcKind::Constant: {
      require(recipe.value >= 0.0, "IC: constant level must be nonnegative");
      return {Field(grid, recipe.value), Field(grid, v_level)};
    }
    case IcKind::GaussianBump: {
      const double w = recipe.width * grid.lx();
      require(w > 0.0, "IC: bump width must be positive");
      const double xc = 0.5 * grid.lx();
      const double yc = 0.5 * grid.ly();
      Field u = make_field(grid, [&](double x, double y) {
        double r2 = (x - xc) * (x - xc);
        if (grid.dim() == 2) r2 += (y - yc) * (y - yc);
        return 1.0 + recipe.amplitude * std::exp(-r2 / (w * w));
      });
      const double mass = integrate(u);
      const double scale = grid.volume() / mass;
      for (double& v : u.data()) v *= scale;
      return {std::move(u), Field(grid, v_level)};
    }
    case IcKind::CosineMode: {
      require(std::abs(recipe.amplitude) < 1.0,
              "IC: cosine amplitude must stay below 1 to keep u nonnegative");
      Field u = make_field(grid, [&](double x, double y) {
        double f = std::cos(recipe.mode * std::numbers::pi * x / grid.lx());
        if (grid.dim() == 2)
          f *= std::cos(recipe.mode * std::numbers::pi * y / grid.ly());
        return 1.0 + recipe.amplitude * f;
      });
      return {std::move(u), Field(grid, v_level)};
    }
    case IcKind::FromFile: {
      Field u = read_binary(recipe.u_file);
      Field v = read_binary(recipe.v_file);
      require(u.grid() == grid && v.grid() == grid,
              "IC: snapshot grids do not match the run grid");
      return {std::move(u), std::move(v)};
    }
  }
  throw std::domain_error("IC: unknown recipe kind");
}

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::Bounded: return "Bounded";
    case Outcome::Growing: return "Growing";
    case Outcome::NumericalBlowup: return "NumericalBlowup";
    case Outcome::DtUnderflow: return "DtUnderflow";
  }
  return "Bounded";
}

void SweepSpec::validate() const {
  require(!chi_grid.empty() && !k_grid.empty(), "sweep: grids must be nonempty");
  for (double chi : chi_grid) require(chi > 0.0, "sweep: chi values must be positive");
  for (double k : k_grid) require(k > 0.0, "sweep: k values must be positive");
  require(std::is_sorted(chi_grid.begin(), chi_grid.end(), std::less_equal<>()),
          "sweep: chi grid must be strictly increasing");
  require(std::is_sorted(k_grid.begin(), k_grid.end(), std::less_equal<>()),
          "sweep: k grid must be strictly increasing");
  require(parallelism >= 1, "sweep: parallelism must be at least 1");
  require(window > 0.0 && window < 1.0, "sweep: window must lie in (0,1)");
  config.validate();
}

Outcome classify_outcome(const RunResult& result, double window) {
  require(window > 0.0 && window < 1.0, "classify_outcome: window in (0,1)");
  if (result.termination == Termination::BlowUpDetected)
    return Outcome::NumericalBlowup;
  if (result.termination == Termination::DtUnderflow) return Outcome::DtUnderflow;

  const double t_split = result.t_final * (1.0 - window);
  double head = 0.0, tail = 0.0;
  for (const DiagRecord& r : result.series) {
    if (r.t <= t_split)
      head = std::max(head, r.sup_u);
    else
      tail = std::max(tail, r.sup_u);
  }
  if (head == 0.0) return Outcome::Bounded;  // degenerate flat-zero series
  return tail <= 1.05 * head ? Outcome::Bounded : Outcome::Growing;
}

SweepResult run_sweep(const SweepSpec& spec) {
  spec.validate();

  SweepResult result;
  result.chi_grid = spec.chi_grid;
  result.k_grid = spec.k_grid;
  result.dim = spec.base.dim;
  const int nk = static_cast<int>(spec.k_grid.size());
  const int total = static_cast<int>(spec.chi_grid.size()) * nk;
  result.entries.resize(total);

  std::atomic<int> cursor{0};
  std::mutex log_mutex;

  auto worker = [&]() {
    for (;;) {
      const int idx = cursor.fetch_add(1);
      if (idx >= total) return;
      SweepEntry& entry = result.entries[idx];
      entry.chi = spec.chi_grid[idx / nk];
      entry.k = spec.k_grid[idx % nk];
      ModelParams params = spec.base;
      params.chi = entry.chi;
      params.k = entry.k;
      try {
        entry.verdict = classify_region(params);
        auto [u0, v0] = make_initial_conditions(spec.ic, spec.grid, params);
        const RunResult run = simulate(u0, v0, params, spec.config);
        entry.outcome = classify_outcome(run, spec.window);
        entry.peak_sup_u = run.peak_sup_u;
        entry.t_final = run.t_final;
        entry.ok = true;
      } catch (const std::exception& e) {
        entry.ok = false;
        entry.error = e.what();
      }
      {
        std::lock_guard<std::mutex> lock(log_mutex);
        std::fprintf(stderr, "sweep point %d/%d chi=%g k=%g -> %s\n", idx + 1,
                     total, entry.chi, entry.k,
                     entry.ok ? to_string(entry.outcome) : entry.error.c_str());
      }
    }
  };

  const int workers = std::min(spec.parallelism, total);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }

  // regression flag only: along fixed k the peak usually grows with chi
  for (int ki = 0; ki < nk; ++ki) {
    for (size_t ci = 1; ci < spec.chi_grid.size(); ++ci) {
      const SweepEntry& lo = result.entries[(ci - 1) * nk + ki];
      const SweepEntry& hi = result.entries[ci * nk + ki];
      if (lo.ok && hi.ok && hi.peak_sup_u < lo.peak_sup_u * (1.0 - 1e-9)) {
        std::fprintf(stderr,
                     "sweep note: peak sup u not monotone in chi at k=%g "
                     "(chi %g -> %g: %g -> %g)\n",
                     hi.k, lo.chi, hi.chi, lo.peak_sup_u, hi.peak_sup_u);
      }
    }
  }
  return result;
}

namespace {

struct SvgMapper {
  double x0, x1, y0, y1;  // data ranges (k horizontal, chi vertical)
  double width = 720, height = 520;
  double ml = 70, mr = 180, mt = 30, mb = 50;

  double px(double k) const { return ml + (k - x0) / (x1 - x0) * (width - ml - mr); }
  double py(double chi) const {
    return mt + (y1 - chi) / (y1 - y0) * (height - mt - mb);
  }
};

std::vector<double> cell_edges(const std::vector<double>& grid) {
  std::vector<double> edges(grid.size() + 1);
  for (size_t i = 1; i < grid.size(); ++i) edges[i] = 0.5 * (grid[i - 1] + grid[i]);
  const double first_h = grid.size() > 1 ? grid[1] - grid[0] : 1.0;
  const double last_h =
      grid.size() > 1 ? grid[grid.size() - 1] - grid[grid.size() - 2] : 1.0;
  edges.front() = grid.front() - 0.5 * first_h;
  edges.back() = grid.back() + 0.5 * last_h;
  return edges;
}

const char* outcome_color(const SweepEntry& e) {
  if (!e.ok) return "#999999";
  switch (e.outcome) {
    case Outcome::Bounded: return "#4daf4a";
    case Outcome::Growing: return "#ffb300";
    case Outcome::NumericalBlowup: return "#e41a1c";
    case Outcome::DtUnderflow: return "#984ea3";
  }
  return "#999999";
}

void svg_boundary_curve(std::ofstream& os, const SvgMapper& map, int dim,
                        bool upper) {
  os << "  <polyline fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"";
  if (!upper) os << " stroke-dasharray=\"6,4\"";
  os << " points=\"";
  const int samples = 256;
  bool any = false;
  for (int i = 0; i <= samples; ++i) {
    const double k = map.x0 + (map.x1 - map.x0) * i / samples;
    if (k <= 0.0) continue;
    const Thresholds t = thresholds(dim, k);
    const double chi = upper ? t.chi2 : t.chi1;
    if (chi < map.y0 || chi > map.y1) continue;
    os << map.px(k) << ',' << map.py(chi) << ' ';
    any = true;
  }
  os << "\"/>\n";
  if (!any) return;
}

}  // namespace

void emit_region_map(const SweepResult& sweep, const std::filesystem::path& dir) {
  require(!sweep.entries.empty(), "emit_region_map: empty sweep result");
  std::filesystem::create_directories(dir);

  {
    std::ofstream csv(dir / "region_map.csv");
    if (!csv) throw std::runtime_error("emit_region_map: cannot open region_map.csv");
    csv << "chi,k,outcome,theorem_applies,label,peak_sup_u\n";
    csv.precision(17);
    for (const SweepEntry& e : sweep.entries) {
      csv << e.chi << ',' << e.k << ','
          << (e.ok ? to_string(e.outcome) : "Error") << ','
          << (e.verdict.theorem_applies ? "true" : "false") << ','
          << to_string(e.verdict.label) << ',' << e.peak_sup_u << '\n';
    }
  }

  std::ofstream os(dir / "region_map.svg");
  if (!os) throw std::runtime_error("emit_region_map: cannot open region_map.svg");

  const std::vector<double> k_edges = cell_edges(sweep.k_grid);
  const std::vector<double> chi_edges = cell_edges(sweep.chi_grid);
  SvgMapper map{k_edges.front(), k_edges.back(), chi_edges.front(),
                chi_edges.back()};

  os.precision(6);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << map.width
     << "\" height=\"" << map.height << "\" viewBox=\"0 0 " << map.width << ' '
     << map.height << "\">\n";
  os << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  const int nk = static_cast<int>(sweep.k_grid.size());
  for (size_t idx = 0; idx < sweep.entries.size(); ++idx) {
    const SweepEntry& e = sweep.entries[idx];
    const int ci = static_cast<int>(idx) / nk;
    const int ki = static_cast<int>(idx) % nk;
    const double x = map.px(k_edges[ki]);
    const double w = map.px(k_edges[ki + 1]) - x;
    const double y = map.py(chi_edges[ci + 1]);
    const double h = map.py(chi_edges[ci]) - y;
    os << "  <rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << w
       << "\" height=\"" << h << "\" fill=\"" << outcome_color(e)
       << "\" stroke=\"white\" stroke-width=\"0.5\"/>\n";
  }

  svg_boundary_curve(os, map, sweep.dim, true);
  svg_boundary_curve(os, map, sweep.dim, false);

  // axes and labels
  os << "  <rect x=\"" << map.ml << "\" y=\"" << map.mt << "\" width=\""
     << map.width - map.ml - map.mr << "\" height=\"" << map.height - map.mt - map.mb
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  os << "  <text x=\"" << (map.ml + map.width - map.mr) / 2 << "\" y=\""
     << map.height - 12 << "\" font-size=\"14\" text-anchor=\"middle\">k</text>\n";
  os << "  <text x=\"18\" y=\"" << (map.mt + map.height - map.mb) / 2
     << "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
     << (map.mt + map.height - map.mb) / 2 << ")\">chi</text>\n";
  for (double k : sweep.k_grid)
    os << "  <text x=\"" << map.px(k) << "\" y=\"" << map.height - map.mb + 18
       << "\" font-size=\"11\" text-anchor=\"middle\">" << k << "</text>\n";
  for (double chi : sweep.chi_grid)
    os << "  <text x=\"" << map.ml - 8 << "\" y=\"" << map.py(chi) + 4
       << "\" font-size=\"11\" text-anchor=\"end\">" << chi << "</text>\n";

  // legend
  const double lx = map.width - map.mr + 16;
  double ly = map.mt + 10;
  auto legend_row = [&](const char* color, const char* label) {
    os << "  <rect x=\"" << lx << "\" y=\"" << ly - 10
       << "\" width=\"14\" height=\"14\" fill=\"" << color << "\"/>\n";
    os << "  <text x=\"" << lx + 20 << "\" y=\"" << ly + 2
       << "\" font-size=\"12\">" << label << "</text>\n";
    ly += 22;
  };
  legend_row("#4daf4a", "Bounded");
  legend_row("#ffb300", "Growing");
  legend_row("#e41a1c", "NumericalBlowup");
  legend_row("#984ea3", "DtUnderflow");
  legend_row("#999999", "Error");
  os << "  <path d=\"M " << lx << ' ' << ly - 4 << " h 14\" stroke=\"black\" "
        "stroke-width=\"1.5\"/>\n"
     << "  <text x=\"" << lx + 20 << "\" y=\"" << ly
     << "\" font-size=\"12\">chi2(k) upper bound</text>\n";
  ly += 22;
  os << "  <path d=\"M " << lx << ' ' << ly - 4
     << " h 14\" stroke=\"black\" stroke-width=\"1.5\" stroke-dasharray=\"6,4\"/>\n"
     << "  <text x=\"" << lx + 20 << "\" y=\"" << ly
     << "\" font-size=\"12\">chi1(k) lower bound</text>\n";
  ly += 30;
  os << "  <text x=\"" << lx << "\" y=\"" << ly << "\" font-size=\"11\">"
     << "Inside the curves: global existence</text>\n";
  ly += 16;
  os << "  <text x=\"" << lx << "\" y=\"" << ly << "\" font-size=\"11\">"
     << "is predicted. Outside, outcomes are</text>\n";
  ly += 16;
  os << "  <text x=\"" << lx << "\" y=\"" << ly << "\" font-size=\"11\">"
     << "numerical observations only.</text>\n";

  os << "</svg>\n";
}

}  // namespace kslog
