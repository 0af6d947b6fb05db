#include "fishpath/grid.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "fishpath/errors.hpp"

namespace fishpath {

void Axis::validate(const char* name) const {
  require(n >= 3, fmt::format("axis {} needs at least 3 nodes", name));
  require(std::isfinite(lo) && std::isfinite(hi) && hi > lo,
          fmt::format("axis {} needs finite bounds with lo < hi", name));
}

std::string to_string(GridTag tag) {
  switch (tag) {
    case GridTag::phi_bar: return "phi-bar";
    case GridTag::theta: return "theta";
    case GridTag::psi: return "psi";
    case GridTag::control: return "control";
  }
  return "unknown";
}

GridTag grid_tag_from_string(const std::string& name) {
  if (name == "phi-bar") return GridTag::phi_bar;
  if (name == "theta") return GridTag::theta;
  if (name == "psi") return GridTag::psi;
  if (name == "control") return GridTag::control;
  throw ValidationError(fmt::format("unknown grid tag '{}'", name));
}

ValueGrid::ValueGrid(Axis x_axis, Axis v_axis, double t, GridTag g, double fill)
    : x(x_axis), v(v_axis), values(x_axis.n * v_axis.n, fill), time(t), tag(g) {
  x.validate("x");
  v.validate("v");
}

ValueGrid ValueGrid::from_function(Axis x_axis, Axis v_axis, double t, GridTag g,
                                   const std::function<double(double, double)>& f) {
  ValueGrid out(x_axis, v_axis, t, g);
  for (std::size_t i = 0; i < x_axis.n; ++i) {
    for (std::size_t j = 0; j < v_axis.n; ++j) out(i, j) = f(x_axis.at(i), v_axis.at(j));
  }
  return out;
}

double ValueGrid::interpolate(double xq, double vq) const {
  auto locate = [](const Axis& a, double q, std::size_t& k, double& w) {
    const double t = std::clamp((q - a.lo) / a.step(), 0.0, static_cast<double>(a.n - 1));
    k = std::min(static_cast<std::size_t>(t), a.n - 2);
    w = t - static_cast<double>(k);
  };
  std::size_t i, j;
  double wx, wv;
  locate(x, xq, i, wx);
  locate(v, vq, j, wv);
  const double a = (*this)(i, j), b = (*this)(i + 1, j);
  const double c = (*this)(i, j + 1), d = (*this)(i + 1, j + 1);
  return (1 - wx) * (1 - wv) * a + wx * (1 - wv) * b + (1 - wx) * wv * c + wx * wv * d;
}

void ValueGrid::validate() const {
  x.validate("x");
  v.validate("v");
  require(values.size() == x.n * v.n, "grid value count does not match its axes");
  for (double value : values) require(std::isfinite(value), "grid holds a non-finite value");
  if (tag == GridTag::theta) {
    for (double value : values) require(value > 0.0, "theta grid must be strictly positive");
  }
}

namespace {

// Derivative along one axis of a strided line of n values.
template <typename Get>
double first(Get f, std::size_t k, std::size_t n, double h) {
  if (k == 0) return (-3.0 * f(0) + 4.0 * f(1) - f(2)) / (2.0 * h);
  if (k == n - 1) return (3.0 * f(n - 1) - 4.0 * f(n - 2) + f(n - 3)) / (2.0 * h);
  return (f(k + 1) - f(k - 1)) / (2.0 * h);
}

template <typename Get>
double second(Get f, std::size_t k, std::size_t n, double h) {
  k = std::clamp<std::size_t>(k, 1, n - 2);
  return (f(k + 1) - 2.0 * f(k) + f(k - 1)) / (h * h);
}

template <typename Op>
std::vector<double> along_x(const ValueGrid& g, Op op) {
  std::vector<double> out(g.size());
  for (std::size_t i = 0; i < g.x.n; ++i) {
    for (std::size_t j = 0; j < g.v.n; ++j) {
      out[g.index(i, j)] = op([&](std::size_t k) { return g(k, j); }, i, g.x.n, g.x.step());
    }
  }
  return out;
}

template <typename Op>
std::vector<double> along_v(const ValueGrid& g, Op op) {
  std::vector<double> out(g.size());
  for (std::size_t i = 0; i < g.x.n; ++i) {
    for (std::size_t j = 0; j < g.v.n; ++j) {
      out[g.index(i, j)] = op([&](std::size_t k) { return g(i, k); }, j, g.v.n, g.v.step());
    }
  }
  return out;
}

auto first_op = [](auto f, std::size_t k, std::size_t n, double h) { return first(f, k, n, h); };
auto second_op = [](auto f, std::size_t k, std::size_t n, double h) { return second(f, k, n, h); };

}  // namespace

std::vector<double> d_dx(const ValueGrid& g) { return along_x(g, first_op); }
std::vector<double> d_dv(const ValueGrid& g) { return along_v(g, first_op); }
std::vector<double> d_dxx(const ValueGrid& g) { return along_x(g, second_op); }
std::vector<double> d_dvv(const ValueGrid& g) { return along_v(g, second_op); }

std::vector<double> d_dxv(const ValueGrid& g) {
  ValueGrid gx = g;
  gx.values = d_dx(g);
  return d_dv(gx);
}

}  // namespace fishpath
