#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "fishpath/feynman.hpp"
#include "fishpath/lqg.hpp"
#include "fishpath/model.hpp"
#include "fishpath/sde.hpp"

namespace fishpath::strategy {

/// foc_consistent: the exact root of the first-order condition.
/// paper_verbatim: the reference closed form, first term without the psi factor.
enum class StrategyMode { foc_consistent, paper_verbatim };

/// control_in_drift: the velocity-drift block of f carries u, as the dynamics do.
/// printed: the same block without u.
enum class FAssembly { control_in_drift, printed };

/// Which set of g partials to report.
///  exact:     derivatives of the exponential ansatz
///  listed:    the forms listed with the ansatz (singleton neighbour factors,
///             g_xx squared, g_vv unsquared, g_x without s)
///  assembled: the forms entering the assembled f (g_xx unsquared, g_vv squared)
enum class PartialsForm { exact, listed, assembled };

std::string to_string(StrategyMode mode);
std::string to_string(FAssembly mode);
StrategyMode strategy_mode_from_string(const std::string& name);
FAssembly f_assembly_from_string(const std::string& name);

struct Example1Context {
  ModelParams params;
  SchoolState school;
  double k = 0.0;                         // frozen field value k(l)
  std::vector<std::size_t> reference;     // reference neighbour per fish; empty = nearest
  StrategyMode mode = StrategyMode::foc_consistent;
  FAssembly assembly = FAssembly::control_in_drift;
  double epsilon = 1e-12;                 // guard on |2 alpha H x v|

  void validate() const;
  /// Nearest neighbour by |x^i - x^j| (lowest index on ties) unless set.
  std::size_t reference_of(std::size_t fish) const;
  /// lambda lambda2 psi / I
  double pair_coupling() const;
};

/// Sums over the neighbours of `fish`, with the fish itself moved to (x, v).
struct NeighbourSums {
  double S = 0.0;        // sum (x - x_j)(v - v_j)
  double M = 0.0;        // (lambda/I) psi sum |x - x_j| (v - v_j)
  double sum_dx = 0.0;   // sum (x - x_j)
  double sum_dv = 0.0;   // sum (v - v_j)
  double ref_dx = 0.0;   // x - x_r
  double ref_dv = 0.0;   // v - v_r
  std::size_t count = 0;
};

NeighbourSums neighbour_sums(const Example1Context& ctx, std::size_t fish, double x, double v);

/// g = exp(s lambda1 v + s (lambda lambda2 psi / I) S + lambda3 sqrt(8/3) k) and partials.
feynman::GPartials g_ansatz(const Example1Context& ctx, std::size_t fish, double s, double x,
                            double v, PartialsForm form = PartialsForm::exact);

/// The assembled f for fish `fish` at (s, x, v, u).
double f_example(const Example1Context& ctx, std::size_t fish, double s, double x, double v,
                 double u);

/// The equivalent action spec, so that feynman::f_function reproduces f_example.
feynman::ActionSpec action_spec(const Example1Context& ctx, std::size_t fish);

/// df/du at (s, x, v, u).
double foc_residual(const Example1Context& ctx, std::size_t fish, double s, double x, double v,
                    double u);

struct StrategyTerms {
  double u_star = 0.0;
  double T2 = 0.0;
  double T3 = 0.0;
  double denominator = 0.0;  // 2 alpha H x v
  double g = 0.0;
  StrategyMode mode = StrategyMode::foc_consistent;
};

/// NumericalError "strategy singular at alpha H x v ~ 0" when |denominator| <= epsilon.
StrategyTerms strategy_terms(const Example1Context& ctx, double s, std::size_t fish);
double closed_form_strategy(const Example1Context& ctx, double s, std::size_t fish);

/// Feedback policy evaluating the closed form on the live school state.
sde::Policy closed_form_policy(const Example1Context& ctx);

// ---------------------------------------------------------------------------

struct PathPoint {
  double parameter = 0.0;
  double u_star = 0.0;
};

struct CaseReport {
  std::string name;
  std::vector<PathPoint> path;
  std::string monotonicity;  // "increasing", "decreasing", "constant" or "mixed"
  double limit = 0.0;        // computed value at the end of the path
  std::optional<double> printed_limit;
  double max_scaling_error = 0.0;  // for the exact-scaling cases
  std::string note;
};

struct CaseDiagnostics {
  double s = 0.0;
  std::size_t fish = 0;
  CaseReport case1;  // survival H -> 0
  CaseReport case2;  // positions coincide
  CaseReport case3;  // velocities coincide
  CaseReport case4;  // field value k increasing
};

CaseDiagnostics case_diagnostics(const Example1Context& ctx, double s, std::size_t fish = 0);

}  // namespace fishpath::strategy
