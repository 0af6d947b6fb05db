#include <doctest.h>

#include <cmath>

#include "fishpath/errors.hpp"
#include "fishpath/io.hpp"
#include "fishpath/rng.hpp"
#include "fishpath/sde.hpp"
#include "fishpath/verify/oracles.hpp"

using namespace fishpath;

namespace {

ModelParams pair_params() {
  ModelParams p;
  p.n_fish = 2;
  p.comm_rate = 1.0;
  p.coupling = 1.0;
  return p;
}

}  // namespace

TEST_CASE("position drift is u v") {
  const auto spec = sde::DynamicsSpec::cucker_smale();
  auto p = pair_params();
  SchoolState st{0.0, {0.0, 1.0}, {3.0, 0.0}};
  std::vector<double> u{0.0, 0.0};
  CHECK(sde::drift_position(spec, p, st, u, 0) == 0.0);
  u = {2.0, 0.0};
  CHECK(sde::drift_position(spec, p, st, u, 0) == 6.0);

  sde::GenericCoefficients g;
  g.mu1 = [](double, double, double v, double) { return v; };
  g.mu2 = [](double, double, double, double) { return 0.0; };
  g.sigma1 = g.sigma2 = [](double, double, double, double) { return 0.0; };
  const auto generic = sde::DynamicsSpec::make_generic(g);
  st.velocities = {1.5, 0.0};
  CHECK(sde::drift_position(generic, p, st, u, 0) == 1.5);
}

TEST_CASE("velocity drift in both conventions") {
  auto p = pair_params();
  SchoolState st{0.0, {0.0, 1.0}, {1.0, 0.0}};
  const std::vector<double> u{1.0, 1.0};
  CHECK(sde::drift_velocity(sde::DynamicsSpec::cucker_smale(), p, st, u, 0) == doctest::Approx(0.5));
  CHECK(sde::drift_velocity(sde::DynamicsSpec::cucker_smale(sde::VelocityConvention::alignment), p,
                            st, u, 0) == doctest::Approx(-0.5));
  st.velocities = {0.7, 0.7};
  CHECK(sde::drift_velocity(sde::DynamicsSpec::cucker_smale(), p, st, u, 1) == 0.0);
  CHECK(sde::drift_velocity(sde::DynamicsSpec::cucker_smale(sde::VelocityConvention::alignment), p,
                            st, u, 1) == 0.0);
}

TEST_CASE("deterministic Euler steps") {
  const auto spec = sde::DynamicsSpec::cucker_smale();
  auto p = pair_params();
  const SchoolState st{0.0, {0.0, 1.0}, {0.5, 0.5}};
  const std::vector<double> zero{0.0, 0.0}, noise{0.3, -1.2, 0.8, 2.0};
  const auto next = sde::step_euler_maruyama(spec, p, st, zero, 0.1, noise);
  CHECK(next.positions == st.positions);
  CHECK(next.velocities == st.velocities);
  CHECK(next.time == doctest::Approx(0.1));

  p.n_fish = 1;
  const SchoolState one{0.0, {1.0}, {2.0}};
  const std::vector<double> u{1.0}, z{0.5, 0.5};
  const auto moved = sde::step_euler_maruyama(spec, p, one, u, 0.1, z);
  CHECK(moved.positions[0] == doctest::Approx(1.2));
  CHECK(moved.velocities[0] == 2.0);
}

TEST_CASE("Euler increment has the drift as mean") {
  const auto spec = sde::DynamicsSpec::cucker_smale();
  ModelParams p;
  p.n_fish = 1;
  p.sigma1 = 0.8;
  p.sigma2 = 0.5;
  const SchoolState st{0.0, {0.0}, {1.3}};
  const std::vector<double> u{0.6};
  const double dt = 0.01;
  rng::NormalSource src(17, rng::Stream::verification, 0);
  RunningStats stats;
  std::vector<double> z(2);
  for (int k = 0; k < 100000; ++k) {
    z[0] = src();
    z[1] = src();
    stats.add(sde::step_euler_maruyama(spec, p, st, u, dt, z).positions[0]);
  }
  const auto e = stats.estimate();
  CHECK(std::abs(e.mean - 0.6 * 1.3 * dt) <= 4.0 * e.std_error);
}

TEST_CASE("step count must be integral") {
  CHECK(sde::step_count(1.0, 0.01) == 100);
  CHECK_THROWS_AS(sde::step_count(1.0, 0.3), ValidationError);
}

TEST_CASE("noise-free single path follows the ODE") {
  auto p = pair_params();
  p.comm_rate = 0.7;
  p.horizon = 1.0;
  const double dt = 1e-3;
  const SchoolState init{0.0, {0.0, 1.0}, {1.0, -0.5}};
  const auto e = sde::simulate(sde::DynamicsSpec::cucker_smale(sde::VelocityConvention::alignment),
                               p, sde::constant_policy(1.0), init, 1.0, dt, 1, 4);
  const auto last = e.state(0, e.n_steps);
  // Two fish with alignment: the velocity gap decays at rate lambda psi, the mean is conserved.
  const double gap0 = 1.5, rate = 0.7, mean = 0.25;
  const double gap = gap0 * std::exp(-rate);
  CHECK(std::abs(last.velocities[0] - (mean + gap / 2)) < 10 * dt);
  CHECK(std::abs(last.velocities[1] - (mean - gap / 2)) < 10 * dt);
  const double x0 = mean + gap0 / (2 * rate) * (1 - std::exp(-rate));
  CHECK(std::abs(last.positions[0] - x0) < 10 * dt);
}

TEST_CASE("same seed gives identical ensembles") {
  auto p = pair_params();
  p.sigma1 = 0.3;
  p.sigma2 = 0.4;
  const SchoolState init{0.0, {0.0, 1.0}, {1.0, -0.5}};
  auto run = [&](std::uint64_t seed) {
    return io::trajectories_csv(sde::simulate(sde::DynamicsSpec::cucker_smale(), p,
                                              sde::constant_policy(0.8), init, 0.5, 0.01, 5, seed));
  };
  CHECK(run(42) == run(42));
  CHECK(run(42) != run(43));
}

TEST_CASE("alignment contracts the velocity spread") {
  ModelParams p;
  p.n_fish = 6;
  p.comm_rate = 0.9;
  p.coupling = 1.1;
  const SchoolState init{0.0, {0, 1, 2, 3, 4, 5}, {2.0, -1.0, 0.3, 1.7, -0.4, 0.9}};
  double prev = verify::velocity_spread(init.velocities);
  bool monotone = true;
  sde::simulate_path(sde::DynamicsSpec::cucker_smale(sde::VelocityConvention::alignment), p,
                     sde::constant_policy(1.0), init, 1000, 0.01, 1, 0,
                     [&](std::size_t, const SchoolState& st, std::span<const double>) {
                       const double s = verify::velocity_spread(st.velocities);
                       if (s > prev + 1e-12) monotone = false;
                       prev = s;
                     });
  CHECK(monotone);
  CHECK(prev < 0.01);
}

TEST_CASE("reflecting bounds keep positions inside") {
  auto p = pair_params();
  p.sigma1 = 2.0;
  auto spec = sde::DynamicsSpec::cucker_smale();
  spec.position_bounds = {{-1.0, 1.0}};
  const SchoolState init{0.0, {0.0, 0.5}, {1.0, -0.5}};
  const auto e = sde::simulate(spec, p, sde::constant_policy(1.0), init, 1.0, 0.01, 4, 8);
  for (std::size_t k = 0; k < e.n_paths; ++k) {
    for (std::size_t s = 0; s <= e.n_steps; ++s) CHECK(e.state(k, s).within(spec.position_bounds));
  }
}

namespace {

sde::GenericCoefficients coefficients(sde::Coefficient mu1) {
  sde::GenericCoefficients g;
  g.mu1 = std::move(mu1);
  g.mu2 = [](double, double, double v, double) { return -0.5 * v; };
  g.sigma1 = [](double, double, double, double) { return 0.3; };
  g.sigma2 = [](double, double, double, double) { return 0.3; };
  return g;
}

}  // namespace

TEST_CASE("growth check") {
  const sde::SampleBox box;
  const auto linear = sde::check_growth_lipschitz(
      coefficients([](double, double, double v, double) { return v; }), box, 2000, 1);
  CHECK(linear.conforms);
  CHECK(linear.doubled.k1 <= 1.5 * linear.box.k1);

  const auto square = sde::check_growth_lipschitz(
      coefficients([](double, double x, double, double) { return x * x; }), box, 2000, 1);
  CHECK_FALSE(square.conforms);
  CHECK(square.doubled.k3 > 1.5 * square.box.k3);

  sde::GenericCoefficients zero;
  zero.mu1 = zero.mu2 = [](double, double, double, double) { return 0.0; };
  zero.sigma1 = zero.sigma2 = [](double, double, double, double) { return 0.25; };
  const auto flat = sde::check_growth_lipschitz(zero, box, 2000, 1);
  CHECK(flat.conforms);
  CHECK(flat.box.k1 <= 0.25 + 1e-12);
  CHECK(flat.box.k3 == 0.0);
}

namespace {

sde::Diffusion2D still() {
  sde::Diffusion2D d;
  d.mu1 = [](double, double, double) { return 0.0; };
  d.mu2 = [](double, double, double) { return 0.0; };
  return d;
}

}  // namespace

TEST_CASE("generator on simple test functions") {
  auto d = still();
  d.sigma1 = 1.0;
  CHECK(sde::generator_apply(d, [](double, double x, double) { return x * x; }, {0.0, 0.3, 0.1}) ==
        doctest::Approx(1.0).epsilon(1e-6));
  auto drift = still();
  drift.mu1 = [](double, double, double) { return 2.5; };
  CHECK(sde::generator_apply(drift, [](double, double x, double) { return x; }, {0.0, 0.3, 0.1}) ==
        doctest::Approx(2.5).epsilon(1e-8));
}

TEST_CASE("Monte Carlo generator matches the closed form") {
  sde::Diffusion2D d;
  d.mu1 = [](double, double x, double v) { return -0.5 * x + 0.2 * v; };
  d.mu2 = [](double, double x, double v) { return 0.3 * x - 0.4 * v; };
  d.sigma1 = 0.5;
  d.sigma2 = 0.7;
  d.corr = 0.4;
  d.cross = CrossTerm::conventional;
  const verify::LinearDiffusion lin{-0.5, 0.2, 0.3, -0.4, 0.25, 0.4 * 0.35, 0.49};
  const auto e = sde::generator_mc(d, [](double, double x, double v) { return x * x + v * v; },
                                   {0.0, 0.5, -0.3}, 1e-3, 100000, 21);
  CHECK(std::abs(e.mean - verify::generator_x2_plus_v2(lin, 0.5, -0.3)) <= 4.0 * e.std_error);
}

TEST_CASE("noise factor rejects an indefinite covariance") {
  CHECK_THROWS_AS(sde::NoiseFactor::from(1.0, 1.0, 1.5), ValidationError);
  const auto f = sde::NoiseFactor::from(0.5, 0.7, 0.1);
  CHECK(f.l11 * f.l11 == doctest::Approx(0.25));
  CHECK(f.l11 * f.l21 == doctest::Approx(0.1));
  CHECK(f.l21 * f.l21 + f.l22 * f.l22 == doctest::Approx(0.49));
}
