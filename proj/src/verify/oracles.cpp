#include "fishpath/verify/oracles.hpp"

#include <algorithm>
#include <boost/math/quadrature/sinh_sinh.hpp>
#include <cmath>
#include <stdexcept>

namespace fishpath::verify {

double bisect_root(const std::function<double(double)>& f, double a, double b) {
  double fa = f(a), fb = f(b);
  for (int k = 0; k < 200 && fa * fb > 0.0; ++k) {
    a *= 2.0;
    b *= 2.0;
    fa = f(a);
    fb = f(b);
  }
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (fa * fb > 0.0) throw std::runtime_error("bisect_root: no sign change");
  for (int k = 0; k < 2000; ++k) {
    const double m = 0.5 * (a + b);
    if (m == a || m == b) break;
    const double fm = f(m);
    if (fm == 0.0) return m;
    if ((fm < 0.0) == (fa < 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

double lq_riccati_gain(double q, double a, double R, double T, double at, std::size_t steps) {
  // tau = T - s runs forward: dP/dtau = q + 2 a P - P^2 / R.
  auto rhs = [&](double P) { return q + 2.0 * a * P - P * P / R; };
  const double h = (T - at) / static_cast<double>(steps);
  double P = 0.0;
  for (std::size_t k = 0; k < steps; ++k) {
    const double k1 = rhs(P);
    const double k2 = rhs(P + 0.5 * h * k1);
    const double k3 = rhs(P + 0.5 * h * k2);
    const double k4 = rhs(P + h * k3);
    P += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return P;
}

double OuDesirability::theta(double s, double x, double v, std::size_t steps) const {
  // State (P11, P12, P22, r) in tau = T - s:
  //   dP/dtau = (w/omega) I + A'P + PA - P S P,  A = -kappa I
  //   dr/dtau = tr(S P) / 2
  using State = std::array<double, 4>;
  const double q = w / omega;
  auto rhs = [&](const State& y) {
    const double p11 = y[0], p12 = y[1], p22 = y[2];
    const double s11 = cov[0], s12 = cov[1], s22 = cov[2];
    // M = P S
    const double m11 = p11 * s11 + p12 * s12, m12 = p11 * s12 + p12 * s22;
    const double m21 = p12 * s11 + p22 * s12, m22 = p12 * s12 + p22 * s22;
    // P S P
    const double q11 = m11 * p11 + m12 * p12;
    const double q12 = m11 * p12 + m12 * p22;
    const double q22 = m21 * p12 + m22 * p22;
    return State{q - 2 * kappa * p11 - q11, -2 * kappa * p12 - q12, q - 2 * kappa * p22 - q22,
                 0.5 * (m11 + m22)};
  };
  State y{0, 0, 0, 0};
  const double h = (T - s) / static_cast<double>(steps);
  auto axpy = [](const State& a, double t, const State& b) {
    return State{a[0] + t * b[0], a[1] + t * b[1], a[2] + t * b[2], a[3] + t * b[3]};
  };
  for (std::size_t k = 0; k < steps; ++k) {
    const State k1 = rhs(y);
    const State k2 = rhs(axpy(y, 0.5 * h, k1));
    const State k3 = rhs(axpy(y, 0.5 * h, k2));
    const State k4 = rhs(axpy(y, h, k3));
    for (int i = 0; i < 4; ++i) y[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  }
  return std::exp(-0.5 * (y[0] * x * x + 2 * y[1] * x * v + y[2] * v * v) - y[3]);
}

double gaussian_integral_quadrature(const std::array<double, 4>& H, const std::array<double, 2>& V,
                                    double eps) {
  boost::math::quadrature::sinh_sinh<double> rule(12);
  auto outer = [&](double m1) {
    auto inner = [&](double m2) {
      const double quad = H[0] * m1 * m1 + (H[1] + H[2]) * m1 * m2 + H[3] * m2 * m2;
      const double exponent = eps * (V[0] * m1 + V[1] * m2 - quad);
      return std::isfinite(exponent) ? std::exp(exponent) : 0.0;
    };
    return rule.integrate(inner, 1e-13);
  };
  return rule.integrate(outer, 1e-12);
}

double deterministic_objective(const std::vector<double>& x0, const std::vector<double>& v0,
                               double u, double coupling, double comm_rate, double discount,
                               double weight, double survival, double horizon, std::size_t steps) {
  const std::size_t n = x0.size();
  if (steps % 2) ++steps;
  // y = (x_0..x_{n-1}, v_0..v_{n-1})
  std::vector<double> y(2 * n);
  std::copy(x0.begin(), x0.end(), y.begin());
  std::copy(v0.begin(), v0.end(), y.begin() + static_cast<std::ptrdiff_t>(n));
  auto rhs = [&](const std::vector<double>& s) {
    std::vector<double> d(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
      d[i] = u * s[n + i];
      double sum = 0.0;
      for (std::size_t j = 0; j < n; ++j) sum += s[n + i] - s[n + j];
      d[n + i] = coupling / static_cast<double>(n) * u * comm_rate * sum;
    }
    return d;
  };
  auto integrand = [&](double t, const std::vector<double>& s) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += s[i] * s[n + i] * u * u;
    return std::exp(-discount * t) * weight * survival * total;
  };
  const double h = horizon / static_cast<double>(steps);
  double acc = integrand(0.0, y);
  std::vector<double> tmp(2 * n);
  for (std::size_t k = 0; k < steps; ++k) {
    const auto k1 = rhs(y);
    for (std::size_t i = 0; i < 2 * n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    const auto k2 = rhs(tmp);
    for (std::size_t i = 0; i < 2 * n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    const auto k3 = rhs(tmp);
    for (std::size_t i = 0; i < 2 * n; ++i) tmp[i] = y[i] + h * k3[i];
    const auto k4 = rhs(tmp);
    for (std::size_t i = 0; i < 2 * n; ++i) y[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    const double t = h * static_cast<double>(k + 1);
    const double weight_k = (k + 1 == steps) ? 1.0 : ((k + 1) % 2 ? 4.0 : 2.0);
    acc += weight_k * integrand(t, y);
  }
  return acc * h / 3.0;
}

double generator_x2(const LinearDiffusion& d, double x, double v) {
  return 2.0 * x * (d.a11 * x + d.a12 * v) + d.s11;
}

double generator_x2_plus_v2(const LinearDiffusion& d, double x, double v) {
  return 2.0 * x * (d.a11 * x + d.a12 * v) + 2.0 * v * (d.a21 * x + d.a22 * v) + d.s11 + d.s22;
}

double generator_xv(const LinearDiffusion& d, double x, double v) {
  return v * (d.a11 * x + d.a12 * v) + x * (d.a21 * x + d.a22 * v) + d.s12;
}

double velocity_spread(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi - *lo;
}

}  // namespace fishpath::verify
