#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "fishpath/grid.hpp"
#include "fishpath/hjb.hpp"
#include "fishpath/lqg.hpp"
#include "fishpath/model.hpp"
#include "fishpath/sde.hpp"

namespace fishpath::feynman {

/// g and its partial derivatives at one (s, x, v).
struct GPartials {
  double g = 0.0;
  double g_s = 0.0;
  double g_x = 0.0;
  double g_v = 0.0;
  double g_xx = 0.0;
  double g_vv = 0.0;
  double g_xv = 0.0;
};

using GAnsatz = std::function<GPartials(double s, double x, double v)>;

/// Partials of a plain callable by symmetric differences (1e-5 for first
/// derivatives, 1e-4 for second, both scaled by max(1, |coordinate|)).
GAnsatz finite_difference_ansatz(std::function<double(double s, double x, double v)> g);
GAnsatz constant_ansatz(double c);

/// Largest |g_xv - g_vx| seen over the probes, the two mixed partials taken by
/// differencing in opposite orders. Small values indicate a C^2 ansatz.
double hessian_asymmetry(const std::function<double(double s, double x, double v)>& g,
                         const std::vector<std::array<double, 3>>& probes, double step = 1e-4);

struct ActionSpec {
  RewardSpec reward = RewardSpec::constant(0.0);
  double discount = 0.1;
  double weight = 1.0;
  double survival = 1.0;
  sde::Coefficient mu1 = [](double, double, double, double) { return 0.0; };
  sde::Coefficient mu2 = [](double, double, double, double) { return 0.0; };
  double sigma1 = 0.0;
  double sigma2 = 0.0;  // the coefficient multiplying dB2
  double corr = 0.0;
  CrossTerm cross = CrossTerm::paper;
  double mult1 = 0.0;
  double mult2 = 0.0;
  double mult3 = 0.0;
  std::optional<lqg::LqgField> field;
  std::function<double(double s)> field_parameter = [](double) { return 0.0; };
  GAnsatz ansatz = constant_ansatz(0.0);

  /// k(l(s)), zero without a field.
  double field_value(double s) const;
  double cross_covariance() const;
};

struct SliceIncrement {
  double dx = 0.0;
  double dv = 0.0;
  double dB1 = 0.0;
  double dB2 = 0.0;
};

/// One time slice of the action: running reward plus the multiplier-weighted
/// residuals of the two state equations plus the surface term.
double action_increment(const ActionSpec& spec, double s, double x, double v, double u,
                        const SliceIncrement& inc, double dt);

/// reward + g + g_s + g_x mu1 + g_v mu2 + 1/2 (sigma1^2 g_xx + 2 c g_xv + sigma2^2 g_vv)
double f_function(const ActionSpec& spec, double s, double x, double v, double u);
double f_from_partials(const ActionSpec& spec, const GPartials& p, double s, double x, double v,
                       double u);

// ---------------------------------------------------------------------------

enum class GaussianMode { exact, paper };

struct KernelBlock {
  std::array<double, 4> hessian{1.0, 0.0, 0.0, 1.0};  // row-major 2x2
  std::array<double, 2> gradient{0.0, 0.0};           // V
  double epsilon = 1.0;
  std::optional<double> eta1;
  std::optional<double> eta2;

  double determinant() const;
  void validate() const;
};

/// int exp(eps (V.m - m.H.m)) dm over R^2:
///   exact: pi / (eps sqrt|H|) exp(eps/4 V.H^-1.V)
///   paper: pi / sqrt(eps |H|) exp(eps/4 V.H^-1.V)
double shifted_gaussian_integral(const KernelBlock& block, GaussianMode mode);

/// Mass used to normalise the localized kernel (the integral with V = 0).
double kernel_normalisation(const KernelBlock& block, GaussianMode mode);

using FEvaluator = std::function<double(double x, double v)>;

struct TransitionOptions {
  std::size_t nodes = 32;   // Gauss-Legendre nodes per axis
  double std_widths = 6.0;  // window half-width without explicit eta
};

/// psi'(p) = (1/N) int_window exp(-eps (xi.H.xi + f(p + xi))) psi(p + xi) dxi
ValueGrid transition_step(const ValueGrid& psi, const FEvaluator& f, const KernelBlock& block,
                          GaussianMode mode, const TransitionOptions& options = {});

// ---------------------------------------------------------------------------

struct FeynmanKacOptions {
  std::size_t n_steps = 40;
  bool extrapolate = true;  // combine with a half-resolution path on the same noise
  std::function<double(double x, double v)> terminal;  // defaults to 1
};

/// theta(s, x, v) = E[exp(-int_s^tau W/omega dr) theta_tau(X_tau)] over the
/// control-free diffusion started at (x, v).
Estimate feynman_kac_estimate(const hjb::HjbProblem& problem, sde::StatePoint point, double tau,
                              double omega, std::size_t n_paths, std::uint64_t seed,
                              const FeynmanKacOptions& options = {});

// ---------------------------------------------------------------------------

using FTimeEvaluator = std::function<double(double s, double x, double v)>;

/// psi_s = exp(-s f(s, x, v)) psi_0
ValueGrid wave_evolution(const ValueGrid& psi0, const FTimeEvaluator& f, double s);

/// max over probes of |dpsi/ds + f psi| (+ s f_s psi when time_correction), the
/// s-derivative taken by central differences of width 2 ds.
double wave_pde_residual(const std::function<double(double x, double v)>& psi0,
                         const FTimeEvaluator& f, double s,
                         const std::vector<std::array<double, 2>>& probes, double ds = 1e-4,
                         bool time_correction = true);

}  // namespace fishpath::feynman
