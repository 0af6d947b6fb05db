#include "fishpath/sde.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "fishpath/errors.hpp"
#include "fishpath/rng.hpp"

namespace fishpath::sde {

DynamicsSpec DynamicsSpec::cucker_smale(VelocityConvention convention) {
  DynamicsSpec spec;
  spec.kind = DynamicsKind::cucker_smale;
  spec.convention = convention;
  return spec;
}

DynamicsSpec DynamicsSpec::make_generic(GenericCoefficients coefficients) {
  DynamicsSpec spec;
  spec.kind = DynamicsKind::generic;
  spec.generic = std::move(coefficients);
  return spec;
}

void DynamicsSpec::validate(std::size_t n_fish) const {
  if (kind == DynamicsKind::generic) {
    require(generic.mu1 && generic.mu2 && generic.sigma1 && generic.sigma2,
            "generic dynamics need mu1, mu2, sigma1 and sigma2");
  }
  require(position_bounds.size() <= 1 || position_bounds.size() == n_fish,
          "position_bounds must have 0, 1 or n_fish entries");
  for (const Interval& b : position_bounds) {
    require(std::isfinite(b.lo) && std::isfinite(b.hi) && b.lo < b.hi,
            "position bounds must be finite with lo < hi");
  }
}

Policy zero_policy() {
  return [](double, const SchoolState&, std::span<double> u) { std::fill(u.begin(), u.end(), 0.0); };
}

Policy constant_policy(double value) {
  return [value](double, const SchoolState&, std::span<double> u) {
    std::fill(u.begin(), u.end(), value);
  };
}

double drift_position(const DynamicsSpec& spec, const ModelParams&, const SchoolState& state,
                      std::span<const double> controls, std::size_t fish) {
  const double x = state.positions[fish];
  const double v = state.velocities[fish];
  const double u = controls[fish];
  if (spec.kind == DynamicsKind::generic) return spec.generic.mu1(state.time, x, v, u);
  return u * v;
}

double drift_velocity(const DynamicsSpec& spec, const ModelParams& params, const SchoolState& state,
                      std::span<const double> controls, std::size_t fish) {
  const double v = state.velocities[fish];
  const double u = controls[fish];
  if (spec.kind == DynamicsKind::generic) {
    return spec.generic.mu2(state.time, state.positions[fish], v, u);
  }
  double sum = 0.0;
  for (double vj : state.velocities) sum += v - vj;
  if (spec.convention == VelocityConvention::alignment) sum = -sum;
  return params.coupling / static_cast<double>(state.size()) * u * params.comm_rate * sum;
}

double diffusion_position(const DynamicsSpec& spec, const ModelParams& params,
                          const SchoolState& state, std::span<const double> controls,
                          std::size_t fish) {
  if (spec.kind == DynamicsKind::generic) {
    return spec.generic.sigma1(state.time, state.positions[fish], state.velocities[fish],
                               controls[fish]);
  }
  return params.sigma1[fish];
}

double diffusion_velocity(const DynamicsSpec& spec, const ModelParams& params,
                          const SchoolState& state, std::span<const double> controls,
                          std::size_t fish) {
  if (spec.kind == DynamicsKind::generic) {
    return spec.generic.sigma2(state.time, state.positions[fish], state.velocities[fish],
                               controls[fish]);
  }
  return std::sqrt(params.sigma2[fish]);
}

NoiseFactor NoiseFactor::from(double sigma1, double sigma2, double cross) {
  NoiseFactor f;
  const double var2 = sigma2 * sigma2;
  if (sigma1 > 0.0) {
    f.l11 = sigma1;
    f.l21 = cross / sigma1;
  } else {
    require(cross == 0.0, "cross covariance must vanish when sigma1 = 0");
  }
  const double rest = var2 - f.l21 * f.l21;
  if (rest < -1e-14 * std::max(1.0, var2)) {
    throw ValidationError(fmt::format(
        "diffusion covariance [[{0}, {2}], [{2}, {1}]] is not positive semidefinite",
        sigma1 * sigma1, var2, cross));
  }
  f.l22 = std::sqrt(std::max(rest, 0.0));
  return f;
}

namespace {

double reflect(double x, const Interval& b) {
  const double width = b.hi - b.lo;
  for (int k = 0; k < 4 && (x < b.lo || x > b.hi); ++k) {
    if (x > b.hi) x = 2.0 * b.hi - x;
    if (x < b.lo) x = 2.0 * b.lo - x;
  }
  if (x < b.lo || x > b.hi) x = b.lo + std::fmod(std::abs(x - b.lo), width);
  return std::clamp(x, b.lo, b.hi);
}

}  // namespace

EulerMaruyama::EulerMaruyama(const DynamicsSpec& spec, const ModelParams& params)
    : spec_(spec), params_(params) {}

void EulerMaruyama::advance(SchoolState& state, std::span<const double> controls, double dt,
                            std::span<const double> noise) {
  const std::size_t n = state.size();
  require(dt > 0.0, "dt must be positive");
  require(controls.size() == n, "one control per fish is required");
  require(noise.size() == 2 * n, "two noise draws per fish are required");
  dx_.resize(n);
  dv_.resize(n);
  const double sq = std::sqrt(dt);
  for (std::size_t i = 0; i < n; ++i) {
    dx_[i] = drift_position(spec_, params_, state, controls, i) * dt +
             diffusion_position(spec_, params_, state, controls, i) * sq * noise[2 * i];
    dv_[i] = drift_velocity(spec_, params_, state, controls, i) * dt +
             diffusion_velocity(spec_, params_, state, controls, i) * sq * noise[2 * i + 1];
  }
  for (std::size_t i = 0; i < n; ++i) {
    double x = state.positions[i] + dx_[i];
    const double v = state.velocities[i] + dv_[i];
    if (!std::isfinite(x) || !std::isfinite(v)) {
      throw NumericalError(fmt::format("non-finite state for fish {} at s={}", i, state.time));
    }
    if (!spec_.position_bounds.empty()) {
      x = reflect(x, spec_.position_bounds.size() == 1 ? spec_.position_bounds.front()
                                                       : spec_.position_bounds[i]);
    }
    state.positions[i] = x;
    state.velocities[i] = v;
  }
  state.time += dt;
}

SchoolState step_euler_maruyama(const DynamicsSpec& spec, const ModelParams& params,
                                const SchoolState& state, std::span<const double> controls,
                                double dt, std::span<const double> noise) {
  SchoolState next = state;
  EulerMaruyama stepper(spec, params);
  stepper.advance(next, controls, dt, noise);
  return next;
}

std::size_t step_count(double horizon, double dt) {
  require(dt > 0.0, "dt must be positive");
  require(horizon > 0.0, "horizon must be positive");
  const double ratio = horizon / dt;
  const double rounded = std::round(ratio);
  require(rounded >= 1.0 && std::abs(ratio - rounded) <= 1e-9 * std::max(1.0, ratio),
          fmt::format("horizon {} is not a whole number of steps of dt {}", horizon, dt));
  return static_cast<std::size_t>(rounded);
}

double simulate_path(const DynamicsSpec& spec, const ModelParams& params, const Policy& policy,
                     const SchoolState& initial, std::size_t n_steps, double dt,
                     std::uint64_t seed, std::uint64_t path_index, const PathVisitor& visitor,
                     const LogWeightRate& log_weight_rate) {
  const std::size_t n = initial.size();
  rng::NormalSource normal(seed, rng::Stream::paths, path_index);
  EulerMaruyama stepper(spec, params);
  SchoolState state = initial;
  std::vector<double> controls(n, 0.0);
  std::vector<double> noise(2 * n);
  double log_weight = 0.0;
  double prev_rate = log_weight_rate ? log_weight_rate(state.time, state) : 0.0;

  for (std::size_t step = 0;; ++step) {
    policy(state.time, state, controls);
    if (visitor) visitor(step, state, controls);
    if (step == n_steps) break;
    for (double& z : noise) z = normal();
    try {
      stepper.advance(state, controls, dt, noise);
    } catch (const NumericalError& e) {
      throw NumericalError(fmt::format("path {} step {}: {}", path_index, step, e.what()));
    }
    if (log_weight_rate) {
      const double rate = log_weight_rate(state.time, state);
      log_weight += 0.5 * (prev_rate + rate) * dt;
      prev_rate = rate;
      if (!std::isfinite(log_weight)) {
        throw NumericalError(
            fmt::format("path {} step {}: log-weight is not finite", path_index, step));
      }
    }
  }
  return log_weight;
}

SchoolState PathEnsemble::state(std::size_t path, std::size_t step) const {
  const Trajectory& t = paths.at(path);
  require(step <= n_steps, "step out of range");
  SchoolState s;
  s.time = time(step);
  s.positions.assign(t.positions.begin() + static_cast<std::ptrdiff_t>(step * n_fish),
                     t.positions.begin() + static_cast<std::ptrdiff_t>((step + 1) * n_fish));
  s.velocities.assign(t.velocities.begin() + static_cast<std::ptrdiff_t>(step * n_fish),
                      t.velocities.begin() + static_cast<std::ptrdiff_t>((step + 1) * n_fish));
  return s;
}

double PathEnsemble::control(std::size_t path, std::size_t step, std::size_t fish) const {
  return paths.at(path).controls.at(step * n_fish + fish);
}

PathEnsemble simulate(const DynamicsSpec& spec, const ModelParams& params, const Policy& policy,
                      const SchoolState& initial, double horizon, double dt, std::size_t n_paths,
                      std::uint64_t seed, const LogWeightRate& log_weight_rate) {
  params.validate();
  spec.validate(params.n_fish);
  initial.validate(params.n_fish);
  require(n_paths >= 1, "n_paths must be at least 1");
  require(static_cast<bool>(policy), "a policy is required");
  if (!spec.position_bounds.empty()) {
    require(initial.within(spec.position_bounds), "initial positions lie outside the bounds");
  }

  PathEnsemble out;
  out.n_paths = n_paths;
  out.n_steps = step_count(horizon, dt);
  out.n_fish = params.n_fish;
  out.dt = dt;
  out.start_time = initial.time;
  out.seed = seed;
  out.paths.resize(n_paths);

  const std::size_t stride = (out.n_steps + 1) * out.n_fish;
  for (std::size_t p = 0; p < n_paths; ++p) {
    Trajectory& t = out.paths[p];
    t.positions.resize(stride);
    t.velocities.resize(stride);
    t.controls.resize(stride);
    auto record = [&](std::size_t step, const SchoolState& s, std::span<const double> u) {
      const std::size_t base = step * out.n_fish;
      std::copy(s.positions.begin(), s.positions.end(), t.positions.begin() + base);
      std::copy(s.velocities.begin(), s.velocities.end(), t.velocities.begin() + base);
      std::copy(u.begin(), u.end(), t.controls.begin() + base);
    };
    t.log_weight =
        simulate_path(spec, params, policy, initial, out.n_steps, dt, seed, p, record, log_weight_rate);
  }
  return out;
}

// ---------------------------------------------------------------------------

SampleBox SampleBox::scaled(double factor) const {
  auto grow = [factor](Interval i) {
    const double c = 0.5 * (i.lo + i.hi);
    const double h = 0.5 * (i.hi - i.lo) * factor;
    return Interval{c - h, c + h};
  };
  return {s, grow(x), grow(v), grow(u)};
}

namespace {

struct Sample {
  double s, x, v, u, other;
};

double draw(rng::NormalSource& src, Interval i) { return i.lo + (i.hi - i.lo) * src.uniform(); }

struct Extremes {
  GrowthConstants k;
  GrowthWitness w[4];
};

Extremes estimate_constants(const GenericCoefficients& c, const SampleBox& box, std::size_t n,
                            std::uint64_t seed, std::uint64_t index) {
  rng::NormalSource src(seed, rng::Stream::growth_check, index);
  Extremes e;
  const char* names[4] = {"K1", "K2", "K3", "K4"};
  for (int j = 0; j < 4; ++j) e.w[j].constant = names[j];
  auto bump = [&](int j, double& slot, double ratio, const Sample& p) {
    if (std::isfinite(ratio) && ratio > slot) {
      slot = ratio;
      e.w[j] = {names[j], p.s, p.x, p.v, p.u, p.other, ratio};
    }
  };
  for (std::size_t k = 0; k < n; ++k) {
    Sample p{draw(src, box.s), draw(src, box.x), draw(src, box.v), draw(src, box.u), 0.0};
    const double scale = 1.0 + std::abs(p.x) + std::abs(p.v);
    const double m1 = c.mu1(p.s, p.x, p.v, p.u), s1 = c.sigma1(p.s, p.x, p.v, p.u);
    const double m2 = c.mu2(p.s, p.x, p.v, p.u), s2 = c.sigma2(p.s, p.x, p.v, p.u);
    bump(0, e.k.k1, (std::abs(m1) + std::abs(s1)) / scale, p);
    bump(1, e.k.k2, (std::abs(m2) + std::abs(s2)) / scale, p);

    Sample q = p;
    q.other = draw(src, box.x);
    if (q.other != p.x) {
      const double d = std::abs(c.mu1(p.s, q.other, p.v, p.u) - m1) +
                       std::abs(c.sigma1(p.s, q.other, p.v, p.u) - s1);
      bump(2, e.k.k3, d / std::abs(q.other - p.x), q);
    }
    q.other = draw(src, box.v);
    if (q.other != p.v) {
      const double d = std::abs(c.mu2(p.s, p.x, q.other, p.u) - m2) +
                       std::abs(c.sigma2(p.s, p.x, q.other, p.u) - s2);
      bump(3, e.k.k4, d / std::abs(q.other - p.v), q);
    }
  }
  return e;
}

}  // namespace

GrowthReport check_growth_lipschitz(const GenericCoefficients& coefficients, const SampleBox& box,
                                    std::size_t n_samples, std::uint64_t seed,
                                    double growth_threshold) {
  require(coefficients.mu1 && coefficients.mu2 && coefficients.sigma1 && coefficients.sigma2,
          "growth check needs all four coefficients");
  require(n_samples >= 1, "growth check needs at least one sample");
  const Extremes base = estimate_constants(coefficients, box, n_samples, seed, 0);
  const Extremes wide = estimate_constants(coefficients, box.scaled(2.0), n_samples, seed, 1);

  GrowthReport report;
  report.box = base.k;
  report.doubled = wide.k;
  const double b[4] = {base.k.k1, base.k.k2, base.k.k3, base.k.k4};
  const double d[4] = {wide.k.k1, wide.k.k2, wide.k.k3, wide.k.k4};
  for (int j = 0; j < 4; ++j) {
    const bool grew = d[j] > growth_threshold * b[j] && d[j] > 1e-12;
    if (grew || !std::isfinite(d[j])) report.violations.push_back(wide.w[j]);
  }
  report.conforms = report.violations.empty();
  return report;
}

GenericCoefficients coefficients_for_fish(const DynamicsSpec& spec, const ModelParams& params,
                                          const SchoolState& school, std::size_t fish) {
  require(fish < school.size(), "fish index out of range");
  if (spec.kind == DynamicsKind::generic) return spec.generic;
  auto at = [spec, params, school, fish](auto member) {
    return [=](double s, double x, double v, double u) {
      SchoolState st = school;
      st.time = s;
      st.positions[fish] = x;
      st.velocities[fish] = v;
      std::vector<double> controls(st.size(), 0.0);
      controls[fish] = u;
      return member(spec, params, st, controls, fish);
    };
  };
  return {at(drift_position), at(drift_velocity), at(diffusion_position), at(diffusion_velocity)};
}

// ---------------------------------------------------------------------------

double Diffusion2D::cross_covariance() const {
  return fishpath::cross_covariance(sigma1, sigma2, corr, cross);
}

NoiseFactor Diffusion2D::noise_factor() const {
  return NoiseFactor::from(sigma1, sigma2, cross_covariance());
}

void Diffusion2D::validate() const {
  require(mu1 && mu2, "diffusion needs both drifts");
  require(sigma1 >= 0.0 && sigma2 >= 0.0, "diffusion constants must be nonnegative");
  require(std::abs(corr) < 1.0, "corr must lie in (-1, 1)");
  noise_factor();
}

double generator_apply(const Diffusion2D& d, const StateFunction& h, StatePoint p, double e) {
  require(e > 0.0, "finite-difference step must be positive");
  const double s = p.s, x = p.x, v = p.v;
  const double h0 = h(s, x, v);
  const double hs = (h(s + e, x, v) - h(s - e, x, v)) / (2 * e);
  const double hx = (h(s, x + e, v) - h(s, x - e, v)) / (2 * e);
  const double hv = (h(s, x, v + e) - h(s, x, v - e)) / (2 * e);
  const double hxx = (h(s, x + e, v) - 2 * h0 + h(s, x - e, v)) / (e * e);
  const double hvv = (h(s, x, v + e) - 2 * h0 + h(s, x, v - e)) / (e * e);
  const double hxv = (h(s, x + e, v + e) - h(s, x + e, v - e) - h(s, x - e, v + e) +
                      h(s, x - e, v - e)) /
                     (4 * e * e);
  return hs + d.mu1(s, x, v) * hx + d.mu2(s, x, v) * hv +
         0.5 * (d.sigma1 * d.sigma1 * hxx + 2.0 * d.cross_covariance() * hxv +
                d.sigma2 * d.sigma2 * hvv);
}

Estimate generator_mc(const Diffusion2D& d, const StateFunction& h, StatePoint p, double dt,
                      std::size_t n, std::uint64_t seed) {
  d.validate();
  require(dt > 0.0, "dt must be positive");
  require(n >= 2, "generator_mc needs at least two samples");
  const NoiseFactor f = d.noise_factor();
  const double sq = std::sqrt(dt);
  const double h0 = h(p.s, p.x, p.v);
  const double x1 = p.x + d.mu1(p.s, p.x, p.v) * dt;
  const double v1 = p.v + d.mu2(p.s, p.x, p.v) * dt;
  rng::NormalSource normal(seed, rng::Stream::generator, 0);
  RunningStats stats;
  for (std::size_t k = 0; k < n; ++k) {
    const double z1 = normal();
    const double z2 = normal();
    const double x = x1 + f.l11 * sq * z1;
    const double v = v1 + (f.l21 * z1 + f.l22 * z2) * sq;
    stats.add((h(p.s + dt, x, v) - h0) / dt);
  }
  return stats.estimate();
}

}  // namespace fishpath::sde
