#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace fishpath {

/// Uniform axis with n nodes from lo to hi inclusive.
struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t n = 3;

  double step() const { return (hi - lo) / static_cast<double>(n - 1); }
  double at(std::size_t i) const { return lo + static_cast<double>(i) * step(); }
  void validate(const char* name) const;
};

enum class GridTag { phi_bar, theta, psi, control };

std::string to_string(GridTag tag);
GridTag grid_tag_from_string(const std::string& name);

/// Scalar field on an (x, v) grid, stored x-major: values[i * v.n + j].
struct ValueGrid {
  Axis x;
  Axis v;
  std::vector<double> values;
  double time = 0.0;
  GridTag tag = GridTag::theta;

  ValueGrid() = default;
  ValueGrid(Axis x_axis, Axis v_axis, double time, GridTag tag, double fill = 0.0);

  static ValueGrid from_function(Axis x_axis, Axis v_axis, double time, GridTag tag,
                                 const std::function<double(double x, double v)>& f);

  std::size_t index(std::size_t i, std::size_t j) const { return i * v.n + j; }
  double& operator()(std::size_t i, std::size_t j) { return values[index(i, j)]; }
  double operator()(std::size_t i, std::size_t j) const { return values[index(i, j)]; }
  std::size_t size() const { return values.size(); }

  /// Bilinear interpolation; points outside the grid are clamped to its edge.
  double interpolate(double xq, double vq) const;

  void validate() const;
};

/// Finite-difference derivatives: central in the interior, second-order one-sided
/// at the boundary for first derivatives, boundary second derivatives copied
/// from the adjacent interior node. The mixed derivative is D_v(D_x).
std::vector<double> d_dx(const ValueGrid& g);
std::vector<double> d_dv(const ValueGrid& g);
std::vector<double> d_dxx(const ValueGrid& g);
std::vector<double> d_dvv(const ValueGrid& g);
std::vector<double> d_dxv(const ValueGrid& g);

}  // namespace fishpath
