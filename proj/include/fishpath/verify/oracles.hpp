#pragma once

#include <array>
#include <functional>
#include <vector>

// Reference computations used to check the library. None of them call the
// code paths they are compared against.
namespace fishpath::verify {

/// Root of a scalar function by bracketing then bisection to full precision.
double bisect_root(const std::function<double(double)>& f, double a = -1.0, double b = 1.0);

/// Scalar Riccati -P' = q + 2 a P - P^2 / R, P(T) = 0, integrated backward by RK4;
/// returns P at time `at`.
double lq_riccati_gain(double q, double a, double R, double T, double at, std::size_t steps = 20000);

/// Desirability of the quadratic-potential OU problem
///   theta(s, y) = E[exp(-int_s^T w |Y|^2 / (2 omega) dr)], dY = -kappa Y dr + L dB,
/// via the matrix Riccati equation for theta = exp(-y'Py/2 - r).
struct OuDesirability {
  double w, kappa, omega;
  std::array<double, 3> cov;  // sigma1^2, c, sigma2^2
  double T;

  double theta(double s, double x, double v, std::size_t steps = 4000) const;
};

/// Nested double-exponential quadrature of exp(eps (V.m - m.H.m)) over R^2.
double gaussian_integral_quadrature(const std::array<double, 4>& H, const std::array<double, 2>& V,
                                    double eps);

/// Deterministic school trajectory objective for zero noise: RK4 on the
/// Cucker-Smale ODE with a constant control, Simpson quadrature of the
/// discounted Example-1 reward. Single shared discount/weight/survival.
double deterministic_objective(const std::vector<double>& x0, const std::vector<double>& v0,
                               double u, double coupling, double comm_rate, double discount,
                               double weight, double survival, double horizon,
                               std::size_t steps = 200000);

/// Generator of the quadratic test functions under linear drift and constant
/// covariance, in closed form.
struct LinearDiffusion {
  double a11, a12, a21, a22;  // mu = A (x, v)
  double s11, s12, s22;       // covariance entries
};

double generator_x2(const LinearDiffusion& d, double x, double v);
double generator_x2_plus_v2(const LinearDiffusion& d, double x, double v);
double generator_xv(const LinearDiffusion& d, double x, double v);

/// max_i v_i - min_i v_i
double velocity_spread(const std::vector<double>& v);

}  // namespace fishpath::verify
