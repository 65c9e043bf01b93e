#include "kslog/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace kslog {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::domain_error(msg);
}

static_assert(std::endian::native == std::endian::little,
              "snapshot format assumes a little-endian host");

}  // namespace

Grid Grid::interval(double length, int cells) {
  require(length > 0, "Grid: length must be positive");
  require(cells >= 4, "Grid: at least 4 cells per axis");
  Grid g;
  g.dim_ = 1;
  g.nx_ = cells;
  g.ny_ = 1;
  g.lx_ = length;
  g.ly_ = 0.0;
  g.hx_ = length / cells;
  g.hy_ = 0.0;
  return g;
}

Grid Grid::rectangle(double lx, double ly, int nx, int ny) {
  require(lx > 0 && ly > 0, "Grid: lengths must be positive");
  require(nx >= 4 && ny >= 4, "Grid: at least 4 cells per axis");
  Grid g;
  g.dim_ = 2;
  g.nx_ = nx;
  g.ny_ = ny;
  g.lx_ = lx;
  g.ly_ = ly;
  g.hx_ = lx / nx;
  g.hy_ = ly / ny;
  return g;
}

Field::Field(const Grid& grid, double fill)
    : grid_(grid), values_(grid.cell_count(), fill) {}

Field::Field(const Grid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  require(static_cast<int>(values_.size()) == grid_.cell_count(),
          "Field: value count must match the grid");
}

double Field::min() const { return *std::min_element(values_.begin(), values_.end()); }
double Field::max() const { return *std::max_element(values_.begin(), values_.end()); }

double Field::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

Field laplacian_neumann(const Field& f) {
  const Grid& g = f.grid();
  Field out(g);
  const int nx = g.nx(), ny = g.ny();
  const double ihx2 = 1.0 / (g.hx() * g.hx());
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      // face differences; boundary faces carry zero normal difference
      const double fl = i > 0 ? f.at(i, j) - f.at(i - 1, j) : 0.0;
      const double fr = i < nx - 1 ? f.at(i + 1, j) - f.at(i, j) : 0.0;
      out.at(i, j) += (fr - fl) * ihx2;
    }
  }
  if (g.dim() == 2) {
    const double ihy2 = 1.0 / (g.hy() * g.hy());
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        const double fd = j > 0 ? f.at(i, j) - f.at(i, j - 1) : 0.0;
        const double fu = j < ny - 1 ? f.at(i, j + 1) - f.at(i, j) : 0.0;
        out.at(i, j) += (fu - fd) * ihy2;
      }
    }
  }
  return out;
}

namespace {

// One axis of the conservative chemotaxis divergence. stride walks along the
// axis, lines many of them; h is the spacing on that axis.
void chemo_axis(const Field& u, const Field& v, double chi, double c, double h,
                int line_count, int line_len, int line_stride, int stride,
                Field& out) {
  for (int line = 0; line < line_count; ++line) {
    const int base = line * line_stride;
    double flux_prev = 0.0;  // boundary face
    for (int i = 0; i < line_len; ++i) {
      const int idx = base + i * stride;
      double flux_next = 0.0;
      if (i < line_len - 1) {
        const int nxt = idx + stride;
        const double dv = (v[nxt] - v[idx]) / h;
        const double vface = 0.5 * (v[nxt] + v[idx]);
        const double uup = dv > 0.0 ? u[idx] : u[nxt];
        flux_next = chi * uup * dv / (vface + c);
      }
      out[idx] += (flux_next - flux_prev) / h;
      flux_prev = flux_next;
    }
  }
}

}  // namespace

Field chemotaxis_divergence(const Field& u, const Field& v, double chi, double c) {
  require(c > 0, "chemotaxis_divergence: saturation offset c must be positive");
  require(u.grid() == v.grid(), "chemotaxis_divergence: fields on different grids");
  const Grid& g = u.grid();
  Field out(g);
  chemo_axis(u, v, chi, c, g.hx(), g.ny(), g.nx(), g.nx(), 1, out);
  if (g.dim() == 2)
    chemo_axis(u, v, chi, c, g.hy(), g.nx(), g.ny(), 1, g.nx(), out);
  return out;
}

double integrate(const Field& f) {
  double s = 0.0;
  for (double v : f.values()) s += v;
  return s * f.grid().cell_volume();
}

void write_csv(const Field& f, std::ostream& os) {
  const Grid& g = f.grid();
  os.precision(17);
  if (g.dim() == 1) {
    os << "x,value\n";
    for (int i = 0; i < g.nx(); ++i) os << g.x(i) << ',' << f.at(i) << '\n';
  } else {
    os << "x,y,value\n";
    for (int j = 0; j < g.ny(); ++j)
      for (int i = 0; i < g.nx(); ++i)
        os << g.x(i) << ',' << g.y(j) << ',' << f.at(i, j) << '\n';
  }
}

void write_csv(const Field& f, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_csv: cannot open " + path.string());
  write_csv(f, os);
}

void write_binary(const Field& f, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_binary: cannot open " + path.string());
  const Grid& g = f.grid();
  auto put_i64 = [&os](std::int64_t v) { os.write(reinterpret_cast<const char*>(&v), 8); };
  auto put_f64 = [&os](double v) { os.write(reinterpret_cast<const char*>(&v), 8); };
  put_i64(g.dim());
  put_i64(g.nx());
  if (g.dim() == 2) put_i64(g.ny());
  put_f64(g.lx());
  if (g.dim() == 2) put_f64(g.ly());
  os.write(reinterpret_cast<const char*>(f.values().data()),
           static_cast<std::streamsize>(f.size() * sizeof(double)));
  if (!os) throw std::runtime_error("write_binary: short write to " + path.string());
}

Field read_binary(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_binary: cannot open " + path.string());
  auto get_i64 = [&is]() {
    std::int64_t v = 0;
    is.read(reinterpret_cast<char*>(&v), 8);
    return v;
  };
  auto get_f64 = [&is]() {
    double v = 0;
    is.read(reinterpret_cast<char*>(&v), 8);
    return v;
  };
  const std::int64_t dim = get_i64();
  if (dim != 1 && dim != 2)
    throw std::runtime_error("read_binary: bad snapshot header in " + path.string());
  const std::int64_t nx = get_i64();
  const std::int64_t ny = dim == 2 ? get_i64() : 1;
  const double lx = get_f64();
  const double ly = dim == 2 ? get_f64() : 0.0;
  Grid g = dim == 1 ? Grid::interval(lx, static_cast<int>(nx))
                    : Grid::rectangle(lx, ly, static_cast<int>(nx), static_cast<int>(ny));
  std::vector<double> vals(static_cast<size_t>(nx * ny));
  is.read(reinterpret_cast<char*>(vals.data()),
          static_cast<std::streamsize>(vals.size() * sizeof(double)));
  if (!is) throw std::runtime_error("read_binary: truncated snapshot " + path.string());
  return Field(g, std::move(vals));
}

}  // namespace kslog
