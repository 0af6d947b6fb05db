#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fishpath/model.hpp"

namespace fishpath::sde {

enum class DynamicsKind { generic, cucker_smale };

/// Sign of the velocity difference in the Cucker-Smale drift.
///  paper:     (v^i - v^j)
///  alignment: (v^j - v^i), the classical alignment form
enum class VelocityConvention { paper, alignment };

/// Per-fish coefficient evaluated at the fish's own (s, x, v, u).
using Coefficient = std::function<double(double s, double x, double v, double u)>;

struct GenericCoefficients {
  Coefficient mu1;
  Coefficient mu2;
  Coefficient sigma1;
  Coefficient sigma2;
};

struct DynamicsSpec {
  DynamicsKind kind = DynamicsKind::cucker_smale;
  VelocityConvention convention = VelocityConvention::paper;
  GenericCoefficients generic;
  /// Reachable position set per fish. Empty disables the reflecting clamp;
  /// a single entry is shared by every fish.
  std::vector<Interval> position_bounds;

  static DynamicsSpec cucker_smale(VelocityConvention convention = VelocityConvention::paper);
  static DynamicsSpec make_generic(GenericCoefficients coefficients);

  void validate(std::size_t n_fish) const;
};

/// Feedback control: fills one control per fish from the current state.
using Policy = std::function<void(double s, const SchoolState& state, std::span<double> controls)>;

Policy zero_policy();
Policy constant_policy(double u);

double drift_position(const DynamicsSpec& spec, const ModelParams& params, const SchoolState& state,
                      std::span<const double> controls, std::size_t fish);
double drift_velocity(const DynamicsSpec& spec, const ModelParams& params, const SchoolState& state,
                      std::span<const double> controls, std::size_t fish);
double diffusion_position(const DynamicsSpec& spec, const ModelParams& params,
                          const SchoolState& state, std::span<const double> controls,
                          std::size_t fish);
/// For the Cucker-Smale kind this is sqrt(sigma2), the velocity noise entering
/// as sqrt(sigma2*) dB.
double diffusion_velocity(const DynamicsSpec& spec, const ModelParams& params,
                          const SchoolState& state, std::span<const double> controls,
                          std::size_t fish);

/// Lower Cholesky factor of [[s1^2, c], [c, s2^2]]; maps independent standard
/// normals (z1, z2) to correlated increments.
struct NoiseFactor {
  double l11 = 0.0;
  double l21 = 0.0;
  double l22 = 0.0;

  static NoiseFactor from(double sigma1, double sigma2, double cross);
};

/// Euler-Maruyama stepper with reusable scratch space. Drifts of all fish are
/// evaluated on the pre-step state.
class EulerMaruyama {
 public:
  EulerMaruyama(const DynamicsSpec& spec, const ModelParams& params);

  /// noise holds 2 standard normals per fish: (z1_0, z2_0, z1_1, z2_1, ...).
  void advance(SchoolState& state, std::span<const double> controls, double dt,
               std::span<const double> noise);

 private:
  const DynamicsSpec& spec_;
  const ModelParams& params_;
  std::vector<double> dx_;
  std::vector<double> dv_;
};

SchoolState step_euler_maruyama(const DynamicsSpec& spec, const ModelParams& params,
                                const SchoolState& state, std::span<const double> controls,
                                double dt, std::span<const double> noise);

/// Number of whole steps in horizon/dt; ValidationError when it is not integral.
std::size_t step_count(double horizon, double dt);

/// Running log-weight rate accumulated along a path (trapezoid in time).
using LogWeightRate = std::function<double(double s, const SchoolState& state)>;

using PathVisitor =
    std::function<void(std::size_t step, const SchoolState& state, std::span<const double> controls)>;

/// Integrates one path of the ensemble keyed by (seed, path_index). Returns the
/// accumulated log-weight (0 when no rate is supplied).
double simulate_path(const DynamicsSpec& spec, const ModelParams& params, const Policy& policy,
                     const SchoolState& initial, std::size_t n_steps, double dt,
                     std::uint64_t seed, std::uint64_t path_index, const PathVisitor& visitor,
                     const LogWeightRate& log_weight_rate = {});

struct Trajectory {
  std::vector<double> positions;   // [step][fish]
  std::vector<double> velocities;  // [step][fish]
  std::vector<double> controls;    // [step][fish]
  double log_weight = 0.0;
};

struct PathEnsemble {
  std::size_t n_paths = 0;
  std::size_t n_steps = 0;
  std::size_t n_fish = 0;
  double dt = 0.0;
  double start_time = 0.0;
  std::uint64_t seed = 0;
  std::vector<Trajectory> paths;

  double time(std::size_t step) const { return start_time + static_cast<double>(step) * dt; }
  SchoolState state(std::size_t path, std::size_t step) const;
  double control(std::size_t path, std::size_t step, std::size_t fish) const;
};

PathEnsemble simulate(const DynamicsSpec& spec, const ModelParams& params, const Policy& policy,
                      const SchoolState& initial, double horizon, double dt, std::size_t n_paths,
                      std::uint64_t seed, const LogWeightRate& log_weight_rate = {});

// ---------------------------------------------------------------------------
// Growth / Lipschitz conformance of the coefficients.

struct SampleBox {
  Interval s{0.0, 1.0};
  Interval x{-1.0, 1.0};
  Interval v{-1.0, 1.0};
  Interval u{-1.0, 1.0};

  /// Spatial ranges (x, v, u) scaled about their centres; time range kept.
  SampleBox scaled(double factor) const;
};

struct GrowthConstants {
  double k1 = 0.0;  // (|mu1| + |sigma1|) / (1 + |x| + |v|)
  double k2 = 0.0;  // (|mu2| + |sigma2|) / (1 + |x| + |v|)
  double k3 = 0.0;  // Lipschitz in x of (mu1, sigma1)
  double k4 = 0.0;  // Lipschitz in v of (mu2, sigma2)
};

struct GrowthWitness {
  std::string constant;
  double s = 0.0;
  double x = 0.0;
  double v = 0.0;
  double u = 0.0;
  double other = 0.0;  // the second state for Lipschitz pairs
  double ratio = 0.0;
};

struct GrowthReport {
  GrowthConstants box;
  GrowthConstants doubled;
  std::vector<GrowthWitness> violations;
  bool conforms = true;
};

/// Empirical smallest constants for the linear-growth and Lipschitz bounds on
/// the sample box; a constant that grows by more than growth_threshold when the
/// box is doubled is reported as unbounded.
GrowthReport check_growth_lipschitz(const GenericCoefficients& coefficients, const SampleBox& box,
                                    std::size_t n_samples, std::uint64_t seed,
                                    double growth_threshold = 1.5);

/// Coefficients of one fish with the rest of the school frozen.
GenericCoefficients coefficients_for_fish(const DynamicsSpec& spec, const ModelParams& params,
                                          const SchoolState& school, std::size_t fish);

// ---------------------------------------------------------------------------
// Two-state diffusion (x, v) with control-free drifts, shared with the HJB and
// Feynman-Kac code.

using StateFunction = std::function<double(double s, double x, double v)>;

struct Diffusion2D {
  StateFunction mu1;
  StateFunction mu2;
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  double corr = 0.0;
  CrossTerm cross = CrossTerm::paper;

  double cross_covariance() const;
  NoiseFactor noise_factor() const;
  void validate() const;
};

struct StatePoint {
  double s = 0.0;
  double x = 0.0;
  double v = 0.0;
};

/// d/ds h + mu1 h_x + mu2 h_v + 1/2 (sigma1^2 h_xx + 2 c h_xv + sigma2^2 h_vv),
/// derivatives of h by central differences with the given step.
double generator_apply(const Diffusion2D& diffusion, const StateFunction& h, StatePoint point,
                       double fd_step = 1e-4);

/// (E[h(s+dt, Y_{s+dt})] - h(s, Y_s)) / dt over n one-step Euler samples.
Estimate generator_mc(const Diffusion2D& diffusion, const StateFunction& h, StatePoint point,
                      double dt, std::size_t n, std::uint64_t seed);

}  // namespace fishpath::sde
