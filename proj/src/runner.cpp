#include "fishpath/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fmt/format.h>
#include <numbers>
#include <sstream>

#include "fishpath/errors.hpp"
#include "fishpath/feynman.hpp"
#include "fishpath/hjb.hpp"
#include "fishpath/io.hpp"
#include "fishpath/lqg.hpp"
#include "fishpath/objective.hpp"
#include "fishpath/rng.hpp"
#include "fishpath/sde.hpp"
#include "fishpath/strategy.hpp"
#include "fishpath/verify/suites.hpp"

namespace fishpath::runner {

using Json = io::Json;
using config::RunConfig;

LogLevel log_level_from_env() {
  const char* raw = std::getenv("FISHPATH_LOG");
  if (!raw) return LogLevel::info;
  const std::string v = raw;
  if (v == "quiet" || v == "0") return LogLevel::quiet;
  if (v == "debug" || v == "2") return LogLevel::debug;
  return LogLevel::info;
}

namespace {

class Log {
 public:
  explicit Log(LogLevel level) : level_(level) {}
  template <typename... Args>
  void info(fmt::format_string<Args...> f, Args&&... args) const {
    if (level_ != LogLevel::quiet) fmt::print(stderr, "{}\n", fmt::format(f, std::forward<Args>(args)...));
  }
  template <typename... Args>
  void debug(fmt::format_string<Args...> f, Args&&... args) const {
    if (level_ == LogLevel::debug) fmt::print(stderr, "{}\n", fmt::format(f, std::forward<Args>(args)...));
  }

 private:
  LogLevel level_;
};

Json estimate_json(const Estimate& e) {
  return {{"mean", e.mean}, {"std_error", e.std_error}, {"samples", e.samples}};
}

double field_scale(const RunConfig& c) { return c.field.gamma > 0.0 ? c.field.gamma : lqg::kGamma; }

double frozen_field_value(const RunConfig& c) {
  const auto field = lqg::sample_field(field_scale(c), c.field.truncation, c.seed);
  return lqg::eval_field(field, c.field.parameter);
}

strategy::Example1Context example_context(const RunConfig& c) {
  strategy::Example1Context ctx;
  ctx.params = c.model;
  ctx.school = c.initial;
  ctx.k = frozen_field_value(c);
  ctx.reference = c.strategy.reference;
  ctx.mode = c.modes.strategy_mode;
  ctx.assembly = c.modes.f_assembly;
  ctx.epsilon = c.strategy.epsilon;
  return ctx;
}

sde::DynamicsSpec dynamics(const RunConfig& c) {
  auto spec = sde::DynamicsSpec::cucker_smale(c.modes.velocity_convention);
  spec.position_bounds = c.position_bounds;
  spec.validate(c.model.n_fish);
  return spec;
}

sde::Policy policy(const RunConfig& c) {
  if (c.policy.kind == "constant") return sde::constant_policy(c.policy.value);
  if (c.policy.kind == "closed-form") return strategy::closed_form_policy(example_context(c));
  return sde::zero_policy();
}

hjb::HjbProblem hjb_problem(const RunConfig& c) {
  const auto& h = c.hjb;
  hjb::HjbProblem p;
  const double w = h.potential_weight;
  if (h.potential == "constant") {
    p.W = [w](double, double, double) { return w; };
  } else {
    p.W = [w](double, double x, double v) { return 0.5 * w * (x * x + v * v); };
  }
  const double k = h.drift == "ou" ? h.drift_rate : 0.0;
  p.diffusion.mu1 = [k](double, double x, double) { return -k * x; };
  p.diffusion.mu2 = [k](double, double, double v) { return -k * v; };
  p.diffusion.sigma1 = h.sigma1;
  p.diffusion.sigma2 = h.sigma2;
  p.diffusion.corr = c.model.corr;
  p.diffusion.cross = c.modes.cross_term;
  p.R = c.model.quad_cost;
  p.omega_override = h.omega;
  p.omega_epsilon = c.model.omega_epsilon;
  p.validate();
  return p;
}

ValueGrid solve_hjb(const RunConfig& c, const hjb::HjbProblem& p, std::size_t& steps) {
  steps = c.hjb.n_time_steps;
  if (steps == 0) {
    steps = hjb::min_stable_steps(p, c.grid_x, c.grid_v, c.hjb.s_start, c.hjb.s_end,
                                  c.hjb.stability_factor);
  }
  const ValueGrid terminal(c.grid_x, c.grid_v, c.hjb.s_end, GridTag::theta, 1.0);
  return hjb::solve_theta_backward(p, terminal, c.hjb.s_start, c.hjb.s_end, steps,
                                   {c.hjb.stability_factor});
}

Json run_simulate(const RunConfig& c, io::OutputDir& out, const Log& log) {
  const auto spec = dynamics(c);
  const auto pol = policy(c);
  log.info("simulating {} paths of {} fish", c.n_paths, c.model.n_fish);
  const auto ensemble =
      sde::simulate(spec, c.model, pol, c.initial, c.model.horizon, c.model.dt, c.n_paths, c.seed);
  out.write_text("trajectories.csv", io::trajectories_csv(ensemble));

  const auto reward = RewardSpec::example1();
  const auto cmp = compare_policies(c.model, spec, reward, pol, sde::zero_policy(), c.initial,
                                    c.n_paths, c.seed);
  out.write_json("objective.json",
                 {{"policy", c.policy.kind},
                  {"objective", estimate_json(cmp.a)},
                  {"zero_policy_objective", estimate_json(cmp.b)},
                  {"gap", cmp.gap},
                  {"combined_std_error", cmp.combined_std_error},
                  {"winner", cmp.winner},
                  {"reward_floor", c.model.reward_floor},
                  {"below_reward_floor", cmp.below_reward_floor}});
  return {{"n_paths", c.n_paths}, {"n_steps", ensemble.n_steps}};
}

Json run_solve_hjb(const RunConfig& c, io::OutputDir& out, const Log& log) {
  const auto p = hjb_problem(c);
  const double omega = p.omega();
  std::size_t steps = 0;
  log.info("solving backward on a {}x{} grid", c.grid_x.n, c.grid_v.n);
  const ValueGrid theta = solve_hjb(c, p, steps);
  log.debug("{} time steps", steps);
  const ValueGrid phi = hjb::cole_hopf_forward(theta, omega, p.omega_epsilon);
  const ValueGrid u = hjb::control_field_from_theta(theta, omega, p.R);
  for (const auto* g : {&theta, &phi, &u}) {
    const std::string name = to_string(g->tag);
    out.write_text(name + ".csv", io::grid_csv(*g));
    out.write_json(name + ".json", io::grid_header(*g));
  }
  return {{"omega", omega}, {"time_steps", steps}};
}

Json run_estimate_theta(const RunConfig& c, io::OutputDir& out, const Log& log) {
  const auto p = hjb_problem(c);
  const double omega = p.omega();
  std::size_t steps = 0;
  const ValueGrid theta = solve_hjb(c, p, steps);
  feynman::FeynmanKacOptions options;
  options.n_steps = c.feynman_kac.n_steps;
  options.extrapolate = c.feynman_kac.extrapolate;
  Json rows = Json::array();
  std::uint64_t index = 0;
  for (const auto& [x, v] : c.feynman_kac.probes) {
    log.info("Feynman-Kac estimate at ({}, {})", x, v);
    const Estimate e =
        feynman::feynman_kac_estimate(p, {c.hjb.s_start, x, v}, c.hjb.s_end, omega,
                                      c.feynman_kac.n_paths, rng::derive_key(c.seed, rng::Stream::feynman_kac, index++),
                                      options);
    const double fd = theta.interpolate(x, v);
    rows.push_back({{"x", x},
                    {"v", v},
                    {"estimate", estimate_json(e)},
                    {"finite_difference", fd},
                    {"z", e.std_error > 0.0 ? (e.mean - fd) / e.std_error : 0.0}});
  }
  out.write_json("theta_estimates.json",
                 {{"s", c.hjb.s_start}, {"tau", c.hjb.s_end}, {"omega", omega},
                  {"fd_time_steps", steps}, {"probes", rows}});
  return {{"probes", c.feynman_kac.probes.size()}};
}

Json run_strategy(const RunConfig& c, io::OutputDir& out, const Log& log) {
  const auto ctx = example_context(c);
  ctx.validate();
  const double s = c.strategy.time;
  Json fish = Json::array();
  for (std::size_t i = 0; i < c.model.n_fish; ++i) {
    const auto t = strategy::strategy_terms(ctx, s, i);
    fish.push_back({{"fish", i},
                    {"reference", ctx.reference_of(i)},
                    {"u_star", t.u_star},
                    {"T2", t.T2},
                    {"T3", t.T3},
                    {"denominator", t.denominator},
                    {"g", t.g},
                    {"mode", to_string(t.mode)}});
  }
  log.info("strategy evaluated for {} fish", c.model.n_fish);
  out.write_json("strategy.json", {{"s", s}, {"k", ctx.k}, {"fish", fish}});
  const auto diag = strategy::case_diagnostics(ctx, s, 0);
  out.write_json("cases.json", {{"s", diag.s},
                                {"fish", diag.fish},
                                {"case1", io::case_report_json(diag.case1)},
                                {"case2", io::case_report_json(diag.case2)},
                                {"case3", io::case_report_json(diag.case3)},
                                {"case4", io::case_report_json(diag.case4)}});
  return {{"k", ctx.k}};
}

Json run_field(const RunConfig& c, io::OutputDir& out, const Log& log) {
  const double gamma = field_scale(c);
  const auto field = lqg::sample_field(gamma, c.field.truncation, c.seed);
  log.info("sampled field with {} modes", c.field.truncation);
  out.write_text("field.json", lqg::field_to_json(field));
  std::string csv = "l,k,metric_weight\n";
  const std::size_t n = std::max<std::size_t>(c.field.n_samples, 1);
  for (std::size_t j = 0; j < n; ++j) {
    const double l = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
    csv += fmt::format("{},{},{}\n", io::format_double(l), io::format_double(lqg::eval_field(field, l)),
                       io::format_double(lqg::metric_weight(field, l)));
  }
  out.write_text("field_samples.csv", csv);
  return {{"gamma", gamma}, {"q", lqg::q_constant(gamma)}, {"k_at_parameter", lqg::eval_field(field, c.field.parameter)}};
}

Json run_verify(const RunConfig& c, io::OutputDir& out, const Log& log, bool& all_pass) {
  const auto scale = verify::scale_from_string(c.verify_scale);
  std::vector<verify::SuiteResult> results;
  for (int id : verify::suite_ids()) {
    results.push_back(verify::run_suite(id, scale, c.seed));
    const auto& r = results.back();
    log.info("[{}] {:2d} {}: {}", r.passed ? "PASS" : "FAIL", r.id, r.name, r.summary);
  }
  const Json report = verify::report_json(results, scale, c.seed);
  out.write_json("verify_report.json", report);
  all_pass = report["all_pass"].get<bool>();
  Json timings = Json::array();
  for (const auto& r : results) timings.push_back({{"id", r.id}, {"seconds", r.seconds}});
  return {{"all_pass", all_pass}, {"timings", timings}};
}

}  // namespace

RunResult run(const RunConfig& config, LogLevel level) {
  const Log log(level);
  RunResult result;
  io::OutputDir out(config.output_dir);
  const auto start = std::chrono::steady_clock::now();
  try {
    require(config.subcommand.has_value(), "no subcommand given");
    const auto sub = *config.subcommand;
    Json summary;
    bool all_pass = true;
    switch (sub) {
      case config::Subcommand::simulate: summary = run_simulate(config, out, log); break;
      case config::Subcommand::solve_hjb: summary = run_solve_hjb(config, out, log); break;
      case config::Subcommand::estimate_theta: summary = run_estimate_theta(config, out, log); break;
      case config::Subcommand::strategy: summary = run_strategy(config, out, log); break;
      case config::Subcommand::field: summary = run_field(config, out, log); break;
      case config::Subcommand::verify: summary = run_verify(config, out, log, all_pass); break;
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    Json files = Json::array();
    for (const auto& f : out.written()) files.push_back(f.filename().string());
    out.write_json("manifest.json", {{"version", kVersion},
                                     {"subcommand", to_string(sub)},
                                     {"seed", config.seed},
                                     {"config", config::to_json(config)},
                                     {"summary", summary},
                                     {"files", files},
                                     {"wall_time_seconds", wall}});
    result.files = out.written();
    if (!all_pass) {
      result.exit_code = ExitCode::numerical_failure;
      result.message = "verify: one or more suites failed";
    }
    return result;
  } catch (const ValidationError& e) {
    result.exit_code = ExitCode::validation_failure;
    result.message = e.what();
  } catch (const NumericalError& e) {
    result.exit_code = ExitCode::numerical_failure;
    result.message = e.what();
  }
  out.remove_written();
  return result;
}

}  // namespace fishpath::runner
