#pragma once

#include <concepts>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace kslog {

/// Cell-centered box grid: an interval [0, Lx] in 1D or a rectangle
/// [0, Lx] x [0, Ly] in 2D, with homogeneous Neumann boundaries.
class Grid {
 public:
  /// Empty placeholder (zero cells); real grids come from the factories.
  Grid() = default;

  static Grid interval(double length, int cells);
  static Grid rectangle(double lx, double ly, int nx, int ny);

  int dim() const { return dim_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }  // 1 in 1D
  double lx() const { return lx_; }
  double ly() const { return ly_; }
  double hx() const { return hx_; }
  double hy() const { return hy_; }
  int cell_count() const { return nx_ * ny_; }
  double cell_volume() const { return dim_ == 1 ? hx_ : hx_ * hy_; }
  double volume() const { return dim_ == 1 ? lx_ : lx_ * ly_; }

  double x(int i) const { return (i + 0.5) * hx_; }
  double y(int j) const { return (j + 0.5) * hy_; }

  bool operator==(const Grid&) const = default;

 private:
  int dim_ = 1;
  int nx_ = 0, ny_ = 1;
  double lx_ = 0.0, ly_ = 0.0;
  double hx_ = 0.0, hy_ = 0.0;
};

/// A scalar grid function, one value per cell, row-major (j * nx + i).
class Field {
 public:
  Field() = default;
  explicit Field(const Grid& grid, double fill = 0.0);
  Field(const Grid& grid, std::vector<double> values);

  const Grid& grid() const { return grid_; }
  int size() const { return static_cast<int>(values_.size()); }

  double operator[](int idx) const { return values_[idx]; }
  double& operator[](int idx) { return values_[idx]; }
  double at(int i, int j = 0) const { return values_[j * grid_.nx() + i]; }
  double& at(int i, int j = 0) { return values_[j * grid_.nx() + i]; }

  std::span<const double> values() const { return values_; }
  std::vector<double>& data() { return values_; }

  double min() const;
  double max() const;
  double max_abs() const;

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// Builds a field by evaluating fn at cell centers: fn(x) in 1D, fn(x, y) in 2D.
template <typename Fn>
Field make_field(const Grid& g, Fn&& fn) {
  Field f(g);
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      if constexpr (std::invocable<Fn, double, double>)
        f.at(i, j) = fn(g.x(i), g.y(j));
      else
        f.at(i, j) = fn(g.x(i));
    }
  return f;
}

/// Second-order Neumann Laplacian (ghost-cell reflection). Conservative:
/// the output integrates to zero over the box up to round-off.
Field laplacian_neumann(const Field& f);

/// div(chi u / (v + c) grad v) in flux-difference form with first-order
/// upwinding of u and arithmetic face means of v; zero flux through the
/// boundary, so the output integrates to zero. Note the sign: this is the
/// divergence itself, and it enters the density equation as u_t = lap u - it.
Field chemotaxis_divergence(const Field& u, const Field& v, double chi, double c);

/// Midpoint quadrature: sum of cell values times cell volume.
double integrate(const Field& f);

/// Flat CSV, one row per cell: x[,y],value.
void write_csv(const Field& f, std::ostream& os);
void write_csv(const Field& f, const std::filesystem::path& path);

/// Binary snapshot. Header (little-endian 64-bit): dim, nx[, ny] as int64,
/// lx[, ly] as float64; payload: row-major float64 cell values.
void write_binary(const Field& f, const std::filesystem::path& path);
Field read_binary(const std::filesystem::path& path);

}  // namespace kslog
