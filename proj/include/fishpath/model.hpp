#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

namespace fishpath {

/// How the mixed second-order coefficient is formed.
///  paper:        2*corr*sigma1^3
///  conventional: 2*corr*sigma1*sigma2
enum class CrossTerm { paper, conventional };

/// A per-fish quantity that may be given as one shared scalar or one value
/// per fish.
class PerFish {
 public:
  PerFish() : values_{0.0} {}
  PerFish(double shared) : values_{shared} {}  // NOLINT(implicit)
  PerFish(std::vector<double> values) : values_(std::move(values)) {}  // NOLINT
  PerFish(std::initializer_list<double> values) : values_(values) {}

  double operator[](std::size_t fish) const {
    return values_.size() == 1 ? values_.front() : values_.at(fish);
  }
  void set(std::size_t fish, double value, std::size_t n_fish);

  bool shared() const { return values_.size() == 1; }
  std::size_t size() const { return values_.size(); }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> values_;
};

struct ModelParams {
  std::size_t n_fish = 1;
  PerFish discount = 0.1;   // rho^i in (0,1)
  PerFish weight = 1.0;     // alpha^i
  PerFish survival = 1.0;   // H01^i in [0,1], constant per run
  double comm_rate = 1.0;   // psi
  double coupling = 1.0;    // lambda
  double mult1 = 0.0;
  double mult2 = 0.0;
  double mult3 = 0.0;
  PerFish sigma1 = 0.0;
  PerFish sigma2 = 0.0;
  double corr = 0.0;        // state correlation, distinct from the discount rate
  double quad_cost = 1.0;   // R
  double horizon = 1.0;
  double dt = 0.01;
  double reward_floor = 0.0;
  double omega_epsilon = 1e-12;
  CrossTerm cross_term = CrossTerm::paper;

  /// Throws ValidationError naming the first violated invariant.
  void validate() const;

  /// Off-diagonal entry of the diffusion covariance for fish i.
  double cross_covariance(std::size_t fish = 0) const;

  /// omega = R (sigma1^2 + 2 c + sigma2^2), c the cross covariance.
  double omega(std::size_t fish = 0) const;
};

double cross_covariance(double sigma1, double sigma2, double corr, CrossTerm mode);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Positions and relative velocities (against the current) of the school.
struct SchoolState {
  double time = 0.0;
  std::vector<double> positions;
  std::vector<double> velocities;

  std::size_t size() const { return positions.size(); }
  void validate(std::size_t n_fish) const;
  bool within(std::span<const Interval> bounds) const;
};

enum class RewardKind { generic, example1 };

using RewardFn = std::function<double(double s, double x, double v, double u)>;

struct RewardSpec {
  RewardKind kind = RewardKind::example1;
  RewardFn fn;  // used when kind == generic

  static RewardSpec example1() { return {}; }
  static RewardSpec generic(RewardFn f) { return {RewardKind::generic, std::move(f)}; }
  static RewardSpec constant(double c);
};

/// h01(s, x, v, u); for the Example-1 reward this is x*v*u^2.
double evaluate_reward(const RewardSpec& spec, double s, double x, double v, double u);

/// exp(-rho^i s) * alpha^i * H01^i for fish i.
double discounted_running_weight(const ModelParams& params, double s, std::size_t fish = 0);

}  // namespace fishpath

namespace fishpath {

/// A Monte Carlo estimate with its standard error (sample std / sqrt(n)).
struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

/// Streaming mean / variance (Welford).
class RunningStats {
 public:
  void add(double value);
  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  double sample_variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  Estimate estimate() const;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

}  // namespace fishpath
