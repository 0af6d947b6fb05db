#pragma once

#include <cstddef>
#include <optional>

#include "fishpath/grid.hpp"
#include "fishpath/sde.hpp"

namespace fishpath::hjb {

struct HjbProblem {
  sde::StateFunction W;      // running reward W(s, x, v)
  sde::Diffusion2D diffusion;  // control-free drifts, constant diffusions
  double R = 1.0;
  std::optional<double> omega_override;
  double omega_epsilon = 1e-12;

  /// R (sigma1^2 + 2 c + sigma2^2) unless overridden; NumericalError when |omega|
  /// does not exceed omega_epsilon.
  double omega() const;
  void validate() const;
};

double omega_of(double R, double sigma1, double sigma2, double cross);

/// (phi_x + phi_v) / R
double optimal_control_quadratic(double phi_x, double phi_v, double R);

/// Right side of the nonlinear HJB equation, i.e. -d(phi)/ds on every node.
ValueGrid hjb_rhs_nonlinear(const ValueGrid& phi, const HjbProblem& problem);

/// The reduced equation: pure squares dropped, (2/R) phi_x phi_v kept.
ValueGrid hjb_rhs_linearized(const ValueGrid& phi, const HjbProblem& problem);

/// phi = -omega log(theta)
ValueGrid cole_hopf_forward(const ValueGrid& theta, double omega, double omega_epsilon = 1e-12);
/// theta = exp(-phi / omega)
ValueGrid cole_hopf_inverse(const ValueGrid& phi, double omega, double omega_epsilon = 1e-12);

struct BackwardOptions {
  double stability_factor = 0.25;
};

/// Explicit backward solve of
///   -theta_s = -(W/omega) theta + mu1 theta_x + mu2 theta_v
///              + 1/2 (sigma1^2 theta_xx + 2 c theta_xv + sigma2^2 theta_vv)
/// from terminal data at s_end down to s_start, zero-gradient boundaries. The
/// potential factor exp(-W dt / omega) is applied exactly on each step.
ValueGrid solve_theta_backward(const HjbProblem& problem, const ValueGrid& terminal, double s_start,
                               double s_end, std::size_t n_time_steps,
                               const BackwardOptions& options = {});

/// Largest stable step, c min(dx^2, dv^2) / max(sigma1^2, sigma2^2); infinite without diffusion.
double max_stable_step(const HjbProblem& problem, const Axis& x, const Axis& v, double factor);

/// Smallest step count satisfying the stability bound over [s_start, s_end].
std::size_t min_stable_steps(const HjbProblem& problem, const Axis& x, const Axis& v,
                             double s_start, double s_end, double factor);

/// u*(x, v) = (phi_x + phi_v) / R with phi = -omega log(theta).
ValueGrid control_field_from_theta(const ValueGrid& theta, double omega, double R);

}  // namespace fishpath::hjb
