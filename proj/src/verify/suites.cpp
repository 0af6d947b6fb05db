#include "fishpath/verify/suites.hpp"

#include <chrono>
#include <cmath>
#include <fmt/format.h>

#include "fishpath/errors.hpp"
#include "fishpath/feynman.hpp"
#include "fishpath/hjb.hpp"
#include "fishpath/io.hpp"
#include "fishpath/lqg.hpp"
#include "fishpath/objective.hpp"
#include "fishpath/rng.hpp"
#include "fishpath/sde.hpp"
#include "fishpath/strategy.hpp"
#include "fishpath/verify/oracles.hpp"

namespace fishpath::verify {

using Json = nlohmann::ordered_json;

Scale scale_from_string(const std::string& name) {
  if (name == "quick") return Scale::quick;
  if (name == "full") return Scale::full;
  throw ValidationError(fmt::format("unknown verify scale '{}'", name));
}

std::vector<int> suite_ids() { return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10}; }

std::string suite_name(int id) {
  switch (id) {
    case 1: return "closed-form strategy vs bisection on the first-order condition";
    case 2: return "finite-difference desirability vs Feynman-Kac Monte Carlo";
    case 3: return "shifted Gaussian closed form vs quadrature";
    case 4: return "LQ control field vs Riccati feedback";
    case 5: return "constant potential closed form";
    case 6: return "strategy case diagnostics";
    case 7: return "Q constant";
    case 8: return "flocking contraction";
    case 9: return "determinism";
    case 10: return "generator check";
  }
  throw ValidationError(fmt::format("unknown suite {}", id));
}

double suite_runtime_limit(int id) {
  switch (id) {
    case 1: return 5.0;
    case 2: return 60.0;
    case 3: return 10.0;
    case 4: return 30.0;
    case 5: return 10.0;
    case 6: return 5.0;
    case 7: return 1.0;
    case 8: return 5.0;
    case 9: return 5.0;
    case 10: return 10.0;
  }
  throw ValidationError(fmt::format("unknown suite {}", id));
}

namespace {

class Draws {
 public:
  Draws(std::uint64_t seed, std::uint64_t index) : src_(seed, rng::Stream::verification, index) {}
  double uniform(double lo, double hi) { return lo + (hi - lo) * src_.uniform(); }
  double normal() { return src_(); }
  std::size_t integer(std::size_t lo, std::size_t hi) {
    return lo + static_cast<std::size_t>(src_.uniform() * static_cast<double>(hi - lo + 1));
  }
  double signed_magnitude(double lo, double hi) {
    const double m = uniform(lo, hi);
    return src_.uniform() < 0.5 ? -m : m;
  }

 private:
  rng::NormalSource src_;
};

std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t k) {
  return rng::derive_key(seed, rng::Stream::verification, 1000 + k);
}

// ---------------------------------------------------------------------------

void suite_closed_form(SuiteResult& r, Scale scale, std::uint64_t seed) {
  const std::size_t n_configs = scale == Scale::full ? 200 : 40;
  Draws d(seed, 1);
  double worst = 0.0, worst_residual = 0.0;
  std::size_t failures = 0;
  Json worst_case;
  for (std::size_t k = 0; k < n_configs; ++k) {
    strategy::Example1Context ctx;
    auto& p = ctx.params;
    p.n_fish = d.integer(2, 10);
    p.discount = d.uniform(0.05, 0.9);
    p.weight = d.uniform(0.5, 2.0);
    p.survival = d.uniform(0.2, 1.0);
    p.comm_rate = d.uniform(0.1, 2.0);
    p.coupling = d.uniform(0.1, 2.0);
    p.mult1 = d.uniform(0.0, 1.0);
    p.mult2 = d.uniform(0.0, 1.0);
    p.mult3 = d.uniform(0.0, 1.0);
    p.sigma1 = d.uniform(0.0, 1.0);
    p.sigma2 = d.uniform(0.0, 1.0);
    p.corr = d.uniform(-0.9, 0.9);
    ctx.k = d.normal();
    for (std::size_t i = 0; i < p.n_fish; ++i) {
      ctx.school.positions.push_back(d.signed_magnitude(0.5, 2.0));
      ctx.school.velocities.push_back(d.signed_magnitude(0.5, 2.0));
    }
    const double s = d.uniform(0.0, 1.0);
    const std::size_t fish = d.integer(0, p.n_fish - 1);
    ctx.validate();

    const double u = strategy::closed_form_strategy(ctx, s, fish);
    const double x = ctx.school.positions[fish], v = ctx.school.velocities[fish];
    const double root =
        bisect_root([&](double w) { return strategy::foc_residual(ctx, fish, s, x, v, w); });
    const double err = std::abs(u - root) / std::max(std::abs(root), 1e-300);
    const double scale_u = std::abs(strategy::foc_residual(ctx, fish, s, x, v, 0.0)) +
                           std::abs(strategy::foc_residual(ctx, fish, s, x, v, 1.0));
    const double residual =
        std::abs(strategy::foc_residual(ctx, fish, s, x, v, u)) / std::max(scale_u, 1e-300);
    worst_residual = std::max(worst_residual, residual);
    if (!(err <= 1e-8)) ++failures;
    if (err >= worst) {
      worst = err;
      worst_case = {{"config", k}, {"n_fish", p.n_fish}, {"fish", fish}, {"s", s},
                    {"u_star", u}, {"bisection_root", root}, {"relative_error", err}};
    }
  }
  r.passed = failures == 0;
  r.summary = fmt::format("{} configurations, max relative error {:.3g} (tolerance 1e-8)",
                          n_configs, worst);
  r.details = {{"configurations", n_configs},
               {"failures", failures},
               {"max_relative_error", worst},
               {"max_scaled_residual", worst_residual},
               {"worst_case", worst_case}};
}

// ---------------------------------------------------------------------------

struct OuProblem {
  double kappa = 0.5, sigma = 0.5, corr = 0.4, w = 0.5, R = 1.0, T = 1.0;

  hjb::HjbProblem problem() const {
    hjb::HjbProblem p;
    const double k = kappa, ww = w;
    p.W = [ww](double, double x, double v) { return 0.5 * ww * (x * x + v * v); };
    p.diffusion.mu1 = [k](double, double x, double) { return -k * x; };
    p.diffusion.mu2 = [k](double, double, double v) { return -k * v; };
    p.diffusion.sigma1 = sigma;
    p.diffusion.sigma2 = sigma;
    p.diffusion.corr = corr;
    p.R = R;
    return p;
  }
};

void suite_duality(SuiteResult& r, Scale scale, std::uint64_t seed) {
  const OuProblem ou;
  const hjb::HjbProblem problem = ou.problem();
  const double omega = problem.omega();
  const Axis axis{-4.0, 4.0, 101};
  const ValueGrid terminal(axis, axis, ou.T, GridTag::theta, 1.0);
  const std::size_t steps = 4 * hjb::min_stable_steps(problem, axis, axis, 0.0, ou.T, 0.25);
  const ValueGrid theta = hjb::solve_theta_backward(problem, terminal, 0.0, ou.T, steps);

  std::vector<std::array<double, 2>> probes;
  for (double x : {-1.2, -0.4, 0.4, 1.2}) {
    for (double v : {-0.96, -0.48, 0.0, 0.48, 0.96}) probes.push_back({x, v});
  }
  std::size_t n_seeds = 10, n_paths = 100000;
  if (scale == Scale::quick) {
    probes = {{-1.2, -0.96}, {-0.4, 0.48}, {0.0, 0.0}, {0.4, -0.48}, {1.2, 0.96}};
    n_seeds = 1;
    n_paths = 20000;
  }

  const OuDesirability exact{ou.w, ou.kappa, omega,
                             {ou.sigma * ou.sigma, problem.diffusion.cross_covariance(),
                              ou.sigma * ou.sigma},
                             ou.T};
  feynman::FeynmanKacOptions options;
  options.n_steps = 40;
  options.extrapolate = true;

  std::size_t within = 0, total = 0;
  double fd_vs_riccati = 0.0, max_z = 0.0;
  Json rows = Json::array();
  for (const auto& [x, v] : probes) {
    const double fd = theta.interpolate(x, v);
    const double ref = exact.theta(0.0, x, v);
    fd_vs_riccati = std::max(fd_vs_riccati, std::abs(fd - ref));
    Json estimates = Json::array(), errors = Json::array();
    for (std::size_t k = 0; k < n_seeds; ++k) {
      const Estimate e = feynman::feynman_kac_estimate(problem, {0.0, x, v}, ou.T, omega, n_paths,
                                                       sub_seed(seed, k), options);
      const double z = std::abs(e.mean - fd) / e.std_error;
      max_z = std::max(max_z, z);
      if (z <= 3.0) ++within;
      ++total;
      estimates.push_back(e.mean);
      errors.push_back(e.std_error);
    }
    rows.push_back({{"x", x}, {"v", v}, {"finite_difference", fd}, {"riccati", ref},
                    {"estimates", estimates}, {"std_errors", errors}});
  }
  const double fraction = static_cast<double>(within) / static_cast<double>(total);
  r.passed = fraction >= 0.95;
  r.summary = fmt::format("{}/{} probe-seed pairs within 3 stderr ({:.1f}%, need 95%)", within,
                          total, 100.0 * fraction);
  r.details = {{"grid", {{"lo", axis.lo}, {"hi", axis.hi}, {"n", axis.n}}},
               {"time_steps", steps},
               {"omega", omega},
               {"paths", n_paths},
               {"seeds", n_seeds},
               {"fine_steps", options.n_steps},
               {"within_3_stderr", within},
               {"pairs", total},
               {"max_abs_z", max_z},
               {"max_fd_minus_riccati", fd_vs_riccati},
               {"probes", rows}};
}

// ---------------------------------------------------------------------------

void suite_gaussian(SuiteResult& r, Scale scale, std::uint64_t seed) {
  const std::size_t n_blocks = scale == Scale::full ? 200 : 20;
  Draws d(seed, 3);
  double worst = 0.0, worst_ratio = 0.0;
  std::size_t failures = 0;
  for (std::size_t k = 0; k < n_blocks; ++k) {
    const double lmin = d.uniform(0.2, 2.0);
    const double lmax = lmin * d.uniform(1.0, 100.0);
    const double angle = d.uniform(0.0, M_PI);
    const double c = std::cos(angle), s = std::sin(angle);
    feynman::KernelBlock b;
    const double h12 = (lmin - lmax) * c * s;
    b.hessian = {lmin * c * c + lmax * s * s, h12, h12, lmin * s * s + lmax * c * c};
    b.gradient = {d.uniform(-1.0, 1.0), d.uniform(-1.0, 1.0)};
    b.epsilon = d.uniform(0.1, 10.0);
    const double closed = feynman::shifted_gaussian_integral(b, feynman::GaussianMode::exact);
    const double quad = gaussian_integral_quadrature(b.hessian, b.gradient, b.epsilon);
    const double err = std::abs(closed - quad) / std::abs(quad);
    const double paper = feynman::shifted_gaussian_integral(b, feynman::GaussianMode::paper);
    const double ratio_err = std::abs(paper / closed - std::sqrt(b.epsilon));
    worst = std::max(worst, err);
    worst_ratio = std::max(worst_ratio, ratio_err);
    if (!(err <= 1e-6) || !(ratio_err <= 1e-10)) ++failures;
  }
  r.passed = failures == 0;
  r.summary = fmt::format(
      "{} blocks, max relative error {:.3g} (1e-6), max |paper/exact - sqrt(eps)| {:.3g} (1e-10)",
      n_blocks, worst, worst_ratio);
  r.details = {{"blocks", n_blocks}, {"failures", failures}, {"max_relative_error", worst},
               {"max_ratio_error", worst_ratio}};
}

// ---------------------------------------------------------------------------

void suite_lq(SuiteResult& r, Scale, std::uint64_t) {
  const double q = 1.0, a = -0.5, sigma = 1.0, R = 1.0, T = 1.0;
  hjb::HjbProblem problem;
  problem.W = [q](double, double x, double) { return 0.5 * q * x * x; };
  problem.diffusion.mu1 = [a](double, double x, double) { return a * x; };
  problem.diffusion.mu2 = [](double, double, double) { return 0.0; };
  problem.diffusion.sigma1 = sigma;
  problem.diffusion.sigma2 = 0.0;
  problem.R = R;
  const double omega = problem.omega();
  const Axis ax{-5.0, 5.0, 201}, av{-1.0, 1.0, 3};
  const ValueGrid terminal(ax, av, T, GridTag::theta, 1.0);
  const std::size_t steps = hjb::min_stable_steps(problem, ax, av, 0.0, T, 0.25);
  const ValueGrid theta = hjb::solve_theta_backward(problem, terminal, 0.0, T, steps);
  const ValueGrid u = hjb::control_field_from_theta(theta, omega, R);
  const double P = lq_riccati_gain(q, a, R, T, 0.0);
  double worst = 0.0;
  std::size_t probes = 0;
  for (std::size_t i = 0; i < ax.n; ++i) {
    const double x = ax.at(i);
    if (std::abs(x) > 1.0 + 1e-12) continue;
    worst = std::max(worst, std::abs(u(i, 1) - P * x / R));
    ++probes;
  }
  r.passed = worst <= 1e-3;
  r.summary = fmt::format("{} grid centres, max |u_fd - P x / R| = {:.3g} (1e-3), gain P = {:.9f}",
                          probes, worst, P);
  r.details = {{"riccati_gain", P}, {"time_steps", steps}, {"probes", probes},
               {"max_abs_error", worst}};
}

// ---------------------------------------------------------------------------

void suite_constant(SuiteResult& r, Scale, std::uint64_t seed) {
  const double c = 0.5, tau = 1.0;
  bool ok = true;
  Json cases = Json::array();

  {
    // No diffusion: omega supplied directly.
    hjb::HjbProblem p;
    p.W = [c](double, double, double) { return c; };
    p.diffusion.mu1 = [](double, double, double) { return 0.0; };
    p.diffusion.mu2 = [](double, double, double) { return 0.0; };
    p.omega_override = 1.0;
    const double omega = p.omega();
    const double exact = std::exp(-c / omega * tau);
    const Axis axis{-1.0, 1.0, 3};
    const ValueGrid terminal(axis, axis, tau, GridTag::theta, 1.0);
    const std::size_t steps = 1000;
    const ValueGrid theta = hjb::solve_theta_backward(p, terminal, 0.0, tau, steps);
    double fd_err = 0.0;
    for (double value : theta.values) fd_err = std::max(fd_err, std::abs(value - exact) / exact);
    const Estimate e = feynman::feynman_kac_estimate(p, {0.0, 0.3, -0.2}, tau, omega, 1000, seed);
    const double mc_err = std::abs(e.mean - exact);
    const bool pass = fd_err <= 1e-6 &&
                      mc_err <= 3.0 * e.std_error + 1e-12;
    ok = ok && pass;
    cases.push_back({{"diffusion", false}, {"exact", exact}, {"fd_relative_error", fd_err},
                     {"fd_steps", steps}, {"mc_mean", e.mean}, {"mc_std_error", e.std_error},
                     {"pass", pass}});
  }
  {
    // With diffusion and drift: theta stays spatially flat.
    hjb::HjbProblem p;
    p.W = [c](double, double, double) { return c; };
    p.diffusion.mu1 = [](double, double x, double) { return -0.5 * x; };
    p.diffusion.mu2 = [](double, double, double v) { return -0.5 * v; };
    p.diffusion.sigma1 = 0.5;
    p.diffusion.sigma2 = 0.5;
    p.diffusion.corr = 0.3;
    const double omega = p.omega();
    const double exact = std::exp(-c / omega * tau);
    const Axis axis{-2.0, 2.0, 5};
    const ValueGrid terminal(axis, axis, tau, GridTag::theta, 1.0);
    const std::size_t steps = 1000;
    const ValueGrid theta = hjb::solve_theta_backward(p, terminal, 0.0, tau, steps);
    double fd_err = 0.0;
    for (double value : theta.values) fd_err = std::max(fd_err, std::abs(value - exact) / exact);
    const Estimate e = feynman::feynman_kac_estimate(p, {0.0, 0.3, -0.2}, tau, omega, 1000, seed);
    const double mc_err = std::abs(e.mean - exact);
    const bool pass = fd_err <= 1e-6 &&
                      mc_err <= 3.0 * e.std_error + 1e-12;
    ok = ok && pass;
    cases.push_back({{"diffusion", true}, {"omega", omega}, {"exact", exact},
                     {"fd_relative_error", fd_err}, {"fd_steps", steps}, {"mc_mean", e.mean},
                     {"mc_std_error", e.std_error}, {"pass", pass}});
  }
  r.passed = ok;
  r.summary = fmt::format("FD relative errors {:.3g}, {:.3g}; MC within 3 stderr: {}",
                          cases[0]["fd_relative_error"].get<double>(),
                          cases[1]["fd_relative_error"].get<double>(), ok ? "yes" : "no");
  r.details = {{"c", c}, {"tau", tau}, {"cases", cases}};
}

// ---------------------------------------------------------------------------

strategy::Example1Context case_context(double psi) {
  strategy::Example1Context ctx;
  auto& p = ctx.params;
  p.n_fish = 4;
  p.discount = 0.2;
  p.weight = 1.5;
  p.survival = 0.8;
  p.comm_rate = psi;
  p.coupling = 1.2;
  p.mult1 = 0.3;
  p.mult2 = 0.7;
  p.mult3 = 0.4;
  p.sigma1 = 0.3;
  p.sigma2 = 0.2;
  p.corr = 0.25;
  ctx.k = 0.35;
  ctx.school.positions = {1.0, 1.6, 2.3, 0.4};
  ctx.school.velocities = {0.9, 1.4, 0.5, 1.1};
  return ctx;
}

void suite_cases(SuiteResult& r, Scale, std::uint64_t) {
  const double s = 0.6;
  const auto ctx = case_context(1.0);
  const auto diag = strategy::case_diagnostics(ctx, s, 0);
  const double case2_err = std::abs(diag.case2.limit - *diag.case2.printed_limit) /
                           std::abs(*diag.case2.printed_limit);
  const bool case1 = diag.case1.max_scaling_error <= 1e-10 && diag.case1.monotonicity == "increasing";
  const bool case2 = case2_err <= 1e-10;
  const bool case3 = diag.case3.limit == 0.0;
  const bool case4 = diag.case4.max_scaling_error <= 1e-10;

  const auto ctx_psi = case_context(1.7);
  const auto diag_psi = strategy::case_diagnostics(ctx_psi, s, 0);
  const double psi_ratio = diag_psi.case2.limit / *diag_psi.case2.printed_limit;

  r.passed = case1 && case2 && case3 && case4;
  r.summary = fmt::format(
      "case I scaling err {:.2g}; case II err {:.2g}; case III limit {} vs printed {:.6g}; case IV "
      "err {:.2g}",
      diag.case1.max_scaling_error, case2_err, diag.case3.limit, *diag.case3.printed_limit,
      diag.case4.max_scaling_error);
  r.details = {{"s", s},
               {"case1", io::case_report_json(diag.case1)},
               {"case2", io::case_report_json(diag.case2)},
               {"case2_relative_error", case2_err},
               {"case2_with_psi_1_7_ratio_to_printed", psi_ratio},
               {"case3", io::case_report_json(diag.case3)},
               {"case3_discrepancy",
                {{"computed", diag.case3.limit}, {"printed", *diag.case3.printed_limit}}},
               {"case4", io::case_report_json(diag.case4)},
               {"verdicts", {{"case1", case1}, {"case2", case2}, {"case3", case3}, {"case4", case4}}}};
}

// ---------------------------------------------------------------------------

void suite_q(SuiteResult& r, Scale, std::uint64_t) {
  const double q = lqg::q_constant(std::sqrt(8.0 / 3.0));
  const double err = std::abs(q - 2.0412415);
  r.passed = err <= 1e-6;
  r.summary = fmt::format("Q(sqrt(8/3)) = {:.10f}, |Q - 2.0412415| = {:.3g}", q, err);
  r.details = {{"q", q}, {"closed_form", std::sqrt(1.5) + std::sqrt(2.0 / 3.0)}, {"error", err}};
}

// ---------------------------------------------------------------------------

void suite_flocking(SuiteResult& r, Scale scale, std::uint64_t seed) {
  const std::size_t n_runs = scale == Scale::full ? 50 : 10;
  const std::size_t n_steps = 1000;
  Draws d(seed, 8);
  std::size_t violations = 0;
  double worst_increase = 0.0, mean_ratio = 0.0;
  for (std::size_t run = 0; run < n_runs; ++run) {
    ModelParams p;
    p.n_fish = d.integer(2, 10);
    p.comm_rate = d.uniform(0.2, 1.5);
    p.coupling = d.uniform(0.2, 1.5);
    p.sigma1 = 0.0;
    p.sigma2 = 0.0;
    p.dt = 0.01;
    p.horizon = p.dt * static_cast<double>(n_steps);
    SchoolState init;
    for (std::size_t i = 0; i < p.n_fish; ++i) {
      init.positions.push_back(d.uniform(-5.0, 5.0));
      init.velocities.push_back(d.uniform(-2.0, 2.0));
    }
    const auto spec = sde::DynamicsSpec::cucker_smale(sde::VelocityConvention::alignment);
    double prev = velocity_spread(init.velocities);
    const double first = prev;
    std::vector<double> v(p.n_fish);
    sde::simulate_path(spec, p, sde::constant_policy(1.0), init, n_steps, p.dt, seed, run,
                       [&](std::size_t, const SchoolState& st, std::span<const double>) {
                         const double spread = velocity_spread(st.velocities);
                         if (spread > prev + 1e-12) {
                           ++violations;
                           worst_increase = std::max(worst_increase, spread - prev);
                         }
                         prev = spread;
                       });
    mean_ratio += prev / first / static_cast<double>(n_runs);
  }
  r.passed = violations == 0;
  r.summary = fmt::format("{} runs x {} steps, {} spread increases; mean final/initial spread {:.3g}",
                          n_runs, n_steps, violations, mean_ratio);
  r.details = {{"runs", n_runs}, {"steps", n_steps}, {"violations", violations},
               {"max_increase", worst_increase}, {"mean_final_over_initial", mean_ratio}};
}

// ---------------------------------------------------------------------------

void suite_generator(SuiteResult& r, Scale scale, std::uint64_t seed) {
  const std::size_t n = scale == Scale::full ? 100000 : 20000;
  const double dt = 1e-3;
  const double x = 0.5, v = -0.3;
  Json rows = Json::array();
  bool ok = true;
  for (CrossTerm mode : {CrossTerm::paper, CrossTerm::conventional}) {
    sde::Diffusion2D d;
    d.mu1 = [](double, double xx, double vv) { return -0.5 * xx + 0.2 * vv; };
    d.mu2 = [](double, double xx, double vv) { return 0.3 * xx - 0.4 * vv; };
    d.sigma1 = 0.5;
    d.sigma2 = 0.7;
    d.corr = 0.4;
    d.cross = mode;
    const double s12 = mode == CrossTerm::paper ? 0.4 * 0.125 : 0.4 * 0.5 * 0.7;
    const LinearDiffusion lin{-0.5, 0.2, 0.3, -0.4, 0.25, s12, 0.49};
    struct Case {
      const char* name;
      sde::StateFunction h;
      double analytic;
    };
    const Case cases[] = {
        {"x^2", [](double, double a, double) { return a * a; }, generator_x2(lin, x, v)},
        {"x^2+v^2", [](double, double a, double b) { return a * a + b * b; },
         generator_x2_plus_v2(lin, x, v)},
        {"xv", [](double, double a, double b) { return a * b; }, generator_xv(lin, x, v)},
    };
    std::uint64_t k = 0;
    for (const auto& c : cases) {
      const double fd = sde::generator_apply(d, c.h, {0.0, x, v});
      const Estimate e = sde::generator_mc(d, c.h, {0.0, x, v}, dt, n, sub_seed(seed, k++));
      const double z = std::abs(e.mean - c.analytic) / e.std_error;
      const bool pass = z <= 4.0 && std::abs(fd - c.analytic) <= 1e-6;
      ok = ok && pass;
      rows.push_back({{"h", c.name}, {"cross_term", mode == CrossTerm::paper ? "paper" : "conventional"},
                      {"analytic", c.analytic}, {"finite_difference", fd}, {"mc_mean", e.mean},
                      {"mc_std_error", e.std_error}, {"z", z}, {"pass", pass}});
    }
  }
  r.passed = ok;
  r.summary = fmt::format("{} checks, all within 4 stderr: {}", rows.size(), ok ? "yes" : "no");
  r.details = {{"samples", n}, {"dt", dt}, {"point", {x, v}}, {"checks", rows}};
}

// ---------------------------------------------------------------------------

void suite_determinism(SuiteResult& r, Scale, std::uint64_t seed) {
  auto battery = [&] {
    std::vector<SuiteResult> out;
    for (int id : {1, 2, 3, 4, 5, 6, 7, 8, 10}) out.push_back(run_suite(id, Scale::quick, seed));
    return report_json(out, Scale::quick, seed).dump();
  };
  auto ensemble = [&] {
    ModelParams p;
    p.n_fish = 3;
    p.sigma1 = 0.3;
    p.sigma2 = 0.2;
    p.horizon = 1.0;
    p.dt = 0.01;
    SchoolState init{0.0, {1.0, 2.0, 3.0}, {1.0, 1.25, 1.5}};
    const auto e = sde::simulate(sde::DynamicsSpec::cucker_smale(), p, sde::constant_policy(0.5),
                                 init, p.horizon, p.dt, 8, seed);
    return io::trajectories_csv(e);
  };
  auto field = [&] { return lqg::field_to_json(lqg::sample_field(lqg::kGamma, 32, seed)); };

  const std::string a1 = battery(), a2 = battery();
  const std::string b1 = ensemble(), b2 = ensemble();
  const std::string c1 = field(), c2 = field();
  const bool same_battery = a1 == a2, same_ensemble = b1 == b2, same_field = c1 == c2;
  r.passed = same_battery && same_ensemble && same_field;
  r.summary = fmt::format("verify battery {}, trajectories {}, field {}",
                          same_battery ? "identical" : "DIFFERENT",
                          same_ensemble ? "identical" : "DIFFERENT",
                          same_field ? "identical" : "DIFFERENT");
  r.details = {{"battery_bytes", a1.size()}, {"trajectory_bytes", b1.size()},
               {"field_bytes", c1.size()}, {"battery_identical", same_battery},
               {"trajectories_identical", same_ensemble}, {"field_identical", same_field}};
}

}  // namespace

SuiteResult run_suite(int id, Scale scale, std::uint64_t seed) {
  SuiteResult r;
  r.id = id;
  r.name = suite_name(id);
  r.runtime_limit = suite_runtime_limit(id);
  const auto start = std::chrono::steady_clock::now();
  try {
    switch (id) {
      case 1: suite_closed_form(r, scale, seed); break;
      case 2: suite_duality(r, scale, seed); break;
      case 3: suite_gaussian(r, scale, seed); break;
      case 4: suite_lq(r, scale, seed); break;
      case 5: suite_constant(r, scale, seed); break;
      case 6: suite_cases(r, scale, seed); break;
      case 7: suite_q(r, scale, seed); break;
      case 8: suite_flocking(r, scale, seed); break;
      case 9: suite_determinism(r, scale, seed); break;
      case 10: suite_generator(r, scale, seed); break;
      default: throw ValidationError(fmt::format("unknown suite {}", id));
    }
  } catch (const ValidationError&) {
    throw;
  } catch (const std::exception& e) {
    r.passed = false;
    r.summary = fmt::format("error: {}", e.what());
    r.details = {{"error", e.what()}};
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::vector<SuiteResult> run_all(Scale scale, std::uint64_t seed) {
  std::vector<SuiteResult> out;
  for (int id : suite_ids()) out.push_back(run_suite(id, scale, seed));
  return out;
}

Json report_json(const std::vector<SuiteResult>& results, Scale scale, std::uint64_t seed) {
  Json suites = Json::array();
  bool all = true;
  for (const auto& r : results) {
    all = all && r.passed;
    suites.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.passed}, {"summary", r.summary},
                      {"details", r.details}});
  }
  return {{"scale", scale == Scale::full ? "full" : "quick"}, {"seed", seed}, {"all_pass", all},
          {"suites", suites}};
}

}  // namespace fishpath::verify
