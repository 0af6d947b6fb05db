#include "fishpath/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "fishpath/errors.hpp"

namespace fishpath::strategy {

std::string to_string(StrategyMode mode) {
  return mode == StrategyMode::foc_consistent ? "foc-consistent" : "paper-verbatim";
}

std::string to_string(FAssembly mode) {
  return mode == FAssembly::control_in_drift ? "control-in-drift" : "printed";
}

StrategyMode strategy_mode_from_string(const std::string& name) {
  if (name == "foc-consistent") return StrategyMode::foc_consistent;
  if (name == "paper-verbatim") return StrategyMode::paper_verbatim;
  throw ValidationError(fmt::format("unknown strategy mode '{}'", name));
}

FAssembly f_assembly_from_string(const std::string& name) {
  if (name == "control-in-drift") return FAssembly::control_in_drift;
  if (name == "printed") return FAssembly::printed;
  throw ValidationError(fmt::format("unknown f assembly '{}'", name));
}

void Example1Context::validate() const {
  params.validate();
  require(params.n_fish >= 2, "Example-1 strategies need at least two fish");
  school.validate(params.n_fish);
  require(std::isfinite(k), "field value k must be finite");
  require(epsilon >= 0.0, "strategy epsilon must be nonnegative");
  require(reference.empty() || reference.size() == params.n_fish,
          "reference neighbours must be given for every fish");
  for (std::size_t i = 0; i < reference.size(); ++i) {
    require(reference[i] < params.n_fish && reference[i] != i,
            fmt::format("reference neighbour of fish {} must be another fish", i));
  }
}

std::size_t Example1Context::reference_of(std::size_t fish) const {
  if (!reference.empty()) return reference.at(fish);
  std::size_t best = fish == 0 ? 1 : 0;
  double best_d = std::abs(school.positions[fish] - school.positions[best]);
  for (std::size_t j = 0; j < school.size(); ++j) {
    if (j == fish) continue;
    const double d = std::abs(school.positions[fish] - school.positions[j]);
    if (d < best_d) {
      best_d = d;
      best = j;
    }
  }
  return best;
}

double Example1Context::pair_coupling() const {
  return params.coupling * params.mult2 * params.comm_rate / static_cast<double>(params.n_fish);
}

NeighbourSums neighbour_sums(const Example1Context& ctx, std::size_t fish, double x, double v) {
  NeighbourSums out;
  const auto& xs = ctx.school.positions;
  const auto& vs = ctx.school.velocities;
  double abs_sum = 0.0;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    if (j == fish) continue;
    const double dx = x - xs[j], dv = v - vs[j];
    out.S += dx * dv;
    abs_sum += std::abs(dx) * dv;
    out.sum_dx += dx;
    out.sum_dv += dv;
    ++out.count;
  }
  const auto& p = ctx.params;
  out.M = p.coupling / static_cast<double>(p.n_fish) * p.comm_rate * abs_sum;
  const std::size_t r = ctx.reference_of(fish);
  out.ref_dx = x - xs[r];
  out.ref_dv = v - vs[r];
  return out;
}

namespace {

const double kRoot83 = std::sqrt(8.0 / 3.0);

double guarded_exp(double e) {
  if (!std::isfinite(e) || e > 709.0) {
    throw NumericalError(fmt::format("ansatz exponent {} overflows", e));
  }
  return std::exp(e);
}

double ansatz_value(const Example1Context& ctx, double s, double v, const NeighbourSums& n) {
  const auto& p = ctx.params;
  return guarded_exp(s * p.mult1 * v + s * ctx.pair_coupling() * n.S + p.mult3 * kRoot83 * ctx.k);
}

double running_weight(const Example1Context& ctx, std::size_t fish, double s) {
  const auto& p = ctx.params;
  return std::exp(-p.discount[fish] * s) * p.weight[fish] * p.survival[fish];
}

double cross_of(const Example1Context& ctx, std::size_t fish) {
  const auto& p = ctx.params;
  return cross_covariance(p.sigma1[fish], std::sqrt(p.sigma2[fish]), p.corr, p.cross_term);
}

}  // namespace

feynman::GPartials g_ansatz(const Example1Context& ctx, std::size_t fish, double s, double x,
                            double v, PartialsForm form) {
  require(fish < ctx.params.n_fish, "fish index out of range");
  const auto& p = ctx.params;
  const NeighbourSums n = neighbour_sums(ctx, fish, x, v);
  const double c = ctx.pair_coupling();
  feynman::GPartials out;
  out.g = ansatz_value(ctx, s, v, n);
  const double g = out.g;
  out.g_s = g * (p.mult1 * v + c * n.S);
  if (form == PartialsForm::exact) {
    const double ex = s * c * n.sum_dv;
    const double ev = s * p.mult1 + s * c * n.sum_dx;
    const double exv = s * c * static_cast<double>(n.count);
    out.g_x = g * ex;
    out.g_v = g * ev;
    out.g_xx = g * ex * ex;
    out.g_vv = g * ev * ev;
    out.g_xv = g * (ex * ev + exv);
    return out;
  }
  const double bv = s * p.mult1 + s * c * n.ref_dx;
  out.g_x = g * c * n.ref_dv;
  out.g_v = g * bv;
  out.g_xv = g * c * (1.0 + bv);
  if (form == PartialsForm::listed) {
    out.g_xx = g * (s * c * n.ref_dv) * (s * c * n.ref_dv);
    out.g_vv = g * bv;
  } else {
    out.g_xx = g * (s * c * n.ref_dv);
    out.g_vv = g * bv * bv;
  }
  return out;
}

double f_example(const Example1Context& ctx, std::size_t fish, double s, double x, double v,
                 double u) {
  require(fish < ctx.params.n_fish, "fish index out of range");
  const auto& p = ctx.params;
  const NeighbourSums n = neighbour_sums(ctx, fish, x, v);
  const double c = ctx.pair_coupling();
  const double g = ansatz_value(ctx, s, v, n);
  const double bracket = s * p.mult1 + s * c * n.ref_dx;
  const double drift_u = ctx.assembly == FAssembly::control_in_drift ? u : 1.0;
  const double s1 = p.sigma1[fish];

  double f = running_weight(ctx, fish, s) * x * v * u * u;
  f += g;
  f += g * (p.mult1 * v + c * n.S);
  f += g * c * u * v * n.ref_dv;
  f += g * bracket * drift_u * n.M;
  f += 0.5 * (s1 * s1 * g * (s * c * n.ref_dv) +
              2.0 * cross_of(ctx, fish) * c * g * (1.0 + bracket) +
              p.sigma2[fish] * g * bracket * bracket);
  if (!std::isfinite(f)) throw NumericalError("f is not finite");
  return f;
}

feynman::ActionSpec action_spec(const Example1Context& ctx, std::size_t fish) {
  const auto& p = ctx.params;
  feynman::ActionSpec spec;
  spec.reward = RewardSpec::example1();
  spec.discount = p.discount[fish];
  spec.weight = p.weight[fish];
  spec.survival = p.survival[fish];
  spec.mu1 = [](double, double, double v, double u) { return u * v; };
  const bool with_u = ctx.assembly == FAssembly::control_in_drift;
  spec.mu2 = [ctx, fish, with_u](double, double x, double v, double u) {
    const double m = neighbour_sums(ctx, fish, x, v).M;
    return with_u ? u * m : m;
  };
  spec.sigma1 = p.sigma1[fish];
  spec.sigma2 = std::sqrt(p.sigma2[fish]);
  spec.corr = p.corr;
  spec.cross = p.cross_term;
  spec.mult1 = p.mult1;
  spec.mult2 = p.mult2;
  spec.mult3 = p.mult3;
  spec.ansatz = [ctx, fish](double s, double x, double v) {
    return g_ansatz(ctx, fish, s, x, v, PartialsForm::assembled);
  };
  return spec;
}

double foc_residual(const Example1Context& ctx, std::size_t fish, double s, double x, double v,
                    double u) {
  require(fish < ctx.params.n_fish, "fish index out of range");
  const auto& p = ctx.params;
  const NeighbourSums n = neighbour_sums(ctx, fish, x, v);
  const double c = ctx.pair_coupling();
  const double g = ansatz_value(ctx, s, v, n);
  double r = 2.0 * u * running_weight(ctx, fish, s) * x * v + g * c * v * n.ref_dv;
  if (ctx.assembly == FAssembly::control_in_drift) {
    r += g * (s * p.mult1 + s * c * n.ref_dx) * n.M;
  }
  return r;
}

StrategyTerms strategy_terms(const Example1Context& ctx, double s, std::size_t fish) {
  require(fish < ctx.params.n_fish, "fish index out of range");
  const auto& p = ctx.params;
  const double x = ctx.school.positions[fish];
  const double v = ctx.school.velocities[fish];
  const NeighbourSums n = neighbour_sums(ctx, fish, x, v);
  const double c = ctx.pair_coupling();

  StrategyTerms t;
  t.mode = ctx.mode;
  t.g = ansatz_value(ctx, s, v, n);
  t.T2 = c * v * n.ref_dv;
  t.T3 = (s * p.mult1 + s * c * n.ref_dx) * n.M;
  t.denominator = 2.0 * p.weight[fish] * p.survival[fish] * x * v;
  if (!(std::abs(t.denominator) > ctx.epsilon)) {
    throw NumericalError(fmt::format(
        "strategy singular at alpha H x v ~ 0 (fish {}, 2 alpha H x v = {})", fish, t.denominator));
  }
  const double scale = std::exp(p.discount[fish] * s) * t.g / t.denominator;
  if (ctx.mode == StrategyMode::foc_consistent) {
    t.u_star = -scale * (t.T2 + t.T3);
  } else {
    const double first = p.coupling * p.mult2 / static_cast<double>(p.n_fish) * v * (-n.ref_dv);
    t.u_star = scale * (first + t.T3);
  }
  if (!std::isfinite(t.u_star)) throw NumericalError("strategy is not finite");
  return t;
}

double closed_form_strategy(const Example1Context& ctx, double s, std::size_t fish) {
  return strategy_terms(ctx, s, fish).u_star;
}

sde::Policy closed_form_policy(const Example1Context& ctx) {
  ctx.validate();
  return [ctx](double s, const SchoolState& state, std::span<double> controls) {
    Example1Context live = ctx;
    live.school = state;
    for (std::size_t i = 0; i < controls.size(); ++i) {
      controls[i] = closed_form_strategy(live, s, i);
    }
  };
}

// ---------------------------------------------------------------------------

namespace {

std::string monotonicity(const std::vector<PathPoint>& path) {
  bool inc = true, dec = true, flat = true;
  for (std::size_t k = 1; k < path.size(); ++k) {
    const double a = std::abs(path[k - 1].u_star), b = std::abs(path[k].u_star);
    if (!(b > a)) inc = false;
    if (!(b < a)) dec = false;
    if (b != a) flat = false;
  }
  if (flat) return "constant";
  if (inc) return "increasing";
  if (dec) return "decreasing";
  return "mixed";
}

double printed_prefactor(const Example1Context& ctx, double s, std::size_t fish) {
  const auto& p = ctx.params;
  const double x = ctx.school.positions[fish];
  const double v = ctx.school.velocities[fish];
  const double denom = 2.0 * p.weight[fish] * p.survival[fish] * x * v;
  return std::exp(p.discount[fish] * s + s * p.mult1 * v + p.mult3 * kRoot83 * ctx.k) / denom;
}

}  // namespace

CaseDiagnostics case_diagnostics(const Example1Context& ctx, double s, std::size_t fish) {
  ctx.validate();
  require(fish < ctx.params.n_fish, "fish index out of range");
  CaseDiagnostics out;
  out.s = s;
  out.fish = fish;

  {
    CaseReport& r = out.case1;
    r.name = "survival to zero";
    Example1Context c = ctx;
    c.params.survival.set(fish, 1.0, c.params.n_fish);
    const double base = closed_form_strategy(c, s, fish);
    for (double h : {1.0, 0.1, 0.01, 0.001}) {
      c.params.survival.set(fish, h, c.params.n_fish);
      const double u = closed_form_strategy(c, s, fish);
      r.path.push_back({h, u});
      if (base != 0.0) {
        r.max_scaling_error = std::max(r.max_scaling_error, std::abs(u * h - base) / std::abs(base));
      }
    }
    r.monotonicity = monotonicity(r.path);
    r.limit = r.path.back().u_star;
    r.note = base == 0.0 ? "strategy vanishes at H = 1; no scaling to test"
                         : "|u*| scales as 1/H";
  }

  {
    CaseReport& r = out.case2;
    r.name = "positions coincide";
    Example1Context c = ctx;
    const double xi = ctx.school.positions[fish];
    for (double d : {1.0, 0.1, 0.01, 0.001, 0.0}) {
      for (std::size_t j = 0; j < c.params.n_fish; ++j) {
        if (j != fish) c.school.positions[j] = xi + d * (ctx.school.positions[j] - xi);
      }
      r.path.push_back({d, closed_form_strategy(c, s, fish)});
    }
    r.monotonicity = monotonicity(r.path);
    r.limit = r.path.back().u_star;
    const auto& p = ctx.params;
    const std::size_t ref = c.reference_of(fish);
    const double v = ctx.school.velocities[fish];
    r.printed_limit = printed_prefactor(c, s, fish) * p.coupling * p.mult2 /
                      static_cast<double>(p.n_fish) * v * (ctx.school.velocities[ref] - v);
    r.note = fmt::format(
        "computed limit carries the communication rate psi = {} that the printed limit omits",
        p.comm_rate);
  }

  {
    CaseReport& r = out.case3;
    r.name = "velocities coincide";
    Example1Context c = ctx;
    const double vi = ctx.school.velocities[fish];
    for (double d : {1.0, 0.1, 0.01, 0.001, 0.0}) {
      for (std::size_t j = 0; j < c.params.n_fish; ++j) {
        if (j != fish) c.school.velocities[j] = vi + d * (ctx.school.velocities[j] - vi);
      }
      r.path.push_back({d, closed_form_strategy(c, s, fish)});
    }
    r.monotonicity = monotonicity(r.path);
    r.limit = r.path.back().u_star + 0.0;
    r.printed_limit = printed_prefactor(c, s, fish);
    r.note = "computed limit is 0 because every velocity difference vanishes; the printed limit "
             "keeps a nonzero prefactor";
  }

  {
    CaseReport& r = out.case4;
    r.name = "field value increasing";
    Example1Context c = ctx;
    const double base = closed_form_strategy(c, s, fish);
    for (double dk : {0.0, 1.0, 2.0, 3.0}) {
      c.k = ctx.k + dk;
      const double u = closed_form_strategy(c, s, fish);
      r.path.push_back({c.k, u});
      const double expected = base * std::exp(ctx.params.mult3 * kRoot83 * dk);
      if (expected != 0.0) {
        r.max_scaling_error =
            std::max(r.max_scaling_error, std::abs(u - expected) / std::abs(expected));
      }
    }
    r.monotonicity = monotonicity(r.path);
    r.limit = r.path.back().u_star;
    r.note = "u* gains the factor exp(lambda3 sqrt(8/3) dk)";
  }
  return out;
}

}  // namespace fishpath::strategy
