#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fishpath/errors.hpp"
#include "fishpath/feynman.hpp"
#include "fishpath/verify/oracles.hpp"

using namespace fishpath;
using feynman::ActionSpec;
using feynman::GaussianMode;
using feynman::KernelBlock;

namespace {

ActionSpec example_spec() {
  ActionSpec spec;
  spec.reward = RewardSpec::example1();
  spec.discount = 0.2;
  spec.weight = 1.5;
  spec.survival = 0.8;
  spec.mu1 = [](double, double, double v, double u) { return u * v; };
  spec.mu2 = [](double, double x, double, double) { return -0.3 * x; };
  spec.sigma1 = 0.4;
  spec.sigma2 = 0.6;
  spec.corr = 0.3;
  return spec;
}

}  // namespace

TEST_CASE("action increment") {
  auto spec = example_spec();
  const double s = 0.3, x = 1.2, v = -0.7, u = 0.9, dt = 0.01;
  const double reward = std::exp(-0.2 * s) * 1.5 * 0.8 * x * v * u * u * dt;
  const feynman::SliceIncrement inc{0.05, -0.02, 0.1, -0.3};
  CHECK(feynman::action_increment(spec, s, x, v, u, inc, dt) == doctest::Approx(reward));

  spec.mult1 = 0.7;
  spec.mult2 = -1.3;
  const double dB1 = 0.08, dB2 = -0.05;
  const feynman::SliceIncrement on{u * v * dt + 0.4 * dB1, -0.3 * x * dt + 0.6 * dB2, dB1, dB2};
  CHECK(feynman::action_increment(spec, s, x, v, u, on, dt) == doctest::Approx(reward));

  ActionSpec surface;
  surface.mult3 = 1.0;
  const feynman::SliceIncrement none{};
  CHECK(feynman::action_increment(surface, s, x, v, u, none, dt) == doctest::Approx(dt));
}

TEST_CASE("f function") {
  ActionSpec spec;
  spec.ansatz = feynman::constant_ansatz(2.3);
  CHECK(feynman::f_function(spec, 0.1, 1.0, 1.0, 1.0) == doctest::Approx(2.3));

  auto ex = example_spec();
  ex.ansatz = feynman::constant_ansatz(0.0);
  const double s = 0.4, x = 1.1, v = 0.6, u = -1.2;
  CHECK(feynman::f_function(ex, s, x, v, u) ==
        doctest::Approx(std::exp(-0.2 * s) * 1.5 * 0.8 * x * v * u * u));
}

TEST_CASE("finite-difference ansatz on a smooth function") {
  auto g = [](double s, double x, double v) { return std::exp(0.3 * s + 0.2 * x * v); };
  const auto p = feynman::finite_difference_ansatz(g)(0.5, 0.7, -0.4);
  const double g0 = g(0.5, 0.7, -0.4);
  CHECK(p.g == doctest::Approx(g0));
  CHECK(p.g_s == doctest::Approx(0.3 * g0).epsilon(1e-7));
  CHECK(p.g_x == doctest::Approx(0.2 * -0.4 * g0).epsilon(1e-7));
  CHECK(p.g_xv == doctest::Approx((0.2 + 0.04 * 0.7 * -0.4) * g0).epsilon(1e-5));
  CHECK(feynman::hessian_asymmetry(g, {{0.5, 0.7, -0.4}, {0.1, -1.0, 2.0}}) < 1e-6);
}

TEST_CASE("shifted Gaussian integral") {
  KernelBlock b;
  CHECK(feynman::shifted_gaussian_integral(b, GaussianMode::exact) == doctest::Approx(std::numbers::pi));
  CHECK(feynman::shifted_gaussian_integral(b, GaussianMode::paper) == doctest::Approx(std::numbers::pi));
  b.epsilon = 4.0;
  const double exact = feynman::shifted_gaussian_integral(b, GaussianMode::exact);
  CHECK(exact == doctest::Approx(std::numbers::pi / 4.0));
  CHECK(verify::gaussian_integral_quadrature(b.hessian, b.gradient, b.epsilon) ==
        doctest::Approx(0.785398163).epsilon(1e-8));
  b.epsilon = 1.0;
  b.gradient = {2.0, 0.0};
  CHECK(feynman::shifted_gaussian_integral(b, GaussianMode::exact) ==
        doctest::Approx(std::numbers::pi * std::exp(1.0)));
  CHECK(verify::gaussian_integral_quadrature(b.hessian, b.gradient, 1.0) ==
        doctest::Approx(8.53973).epsilon(1e-6));
}

TEST_CASE("kernel block validation") {
  KernelBlock b;
  b.hessian = {1.0, 2.0, 2.0, 1.0};
  CHECK_THROWS_WITH_AS(b.validate(), doctest::Contains("not positive definite"), NumericalError);
  b.hessian = {1.0, 0.1, 0.2, 1.0};
  CHECK_THROWS_AS(b.validate(), ValidationError);
  b.hessian = {1.0, 0.0, 0.0, 1.0};
  b.epsilon = 0.0;
  CHECK_THROWS_AS(b.validate(), ValidationError);
}

TEST_CASE("transition step") {
  const Axis axis{-4.0, 4.0, 161};
  const auto psi = ValueGrid::from_function(axis, axis, 0.0, GridTag::psi, [](double x, double v) {
    return std::exp(-(x * x + v * v) / 8.0);
  });
  KernelBlock b;
  b.epsilon = 200.0;
  auto zero = [](double, double) { return 0.0; };
  const auto out = feynman::transition_step(psi, zero, b, GaussianMode::exact);
  double worst = 0.0;
  for (std::size_t i = 0; i < axis.n; ++i) {
    for (std::size_t j = 0; j < axis.n; ++j) {
      if (std::abs(axis.at(i)) <= 3.0 && std::abs(axis.at(j)) <= 3.0) {
        worst = std::max(worst, std::abs(out(i, j) - psi(i, j)));
      }
    }
  }
  CHECK(worst <= 1e-3);

  const double c = 0.002;
  const auto shifted = feynman::transition_step(psi, [c](double, double) { return c; }, b, GaussianMode::exact);
  for (std::size_t k = 0; k < psi.size(); k += 97) {
    CHECK(shifted.values[k] == doctest::Approx(std::exp(-b.epsilon * c) * out.values[k]).epsilon(1e-12));
  }

  const ValueGrid none(axis, axis, 0.0, GridTag::psi, 0.0);
  for (double v : feynman::transition_step(none, zero, b, GaussianMode::exact).values) CHECK(v == 0.0);
}

TEST_CASE("Feynman-Kac trivial cases") {
  hjb::HjbProblem p;
  p.W = [](double, double, double) { return 0.0; };
  p.diffusion.mu1 = [](double, double x, double) { return -x; };
  p.diffusion.mu2 = [](double, double, double) { return 0.1; };
  p.diffusion.sigma1 = 0.5;
  p.diffusion.sigma2 = 0.5;
  const auto unit = feynman::feynman_kac_estimate(p, {0.0, 0.2, 0.1}, 1.0, p.omega(), 500, 1);
  CHECK(unit.mean == 1.0);
  CHECK(unit.std_error == 0.0);

  p.W = [](double, double, double) { return 0.4; };
  const double omega = p.omega();
  const auto e = feynman::feynman_kac_estimate(p, {0.2, 0.2, 0.1}, 1.0, omega, 500, 1);
  CHECK(std::abs(e.mean - std::exp(-0.4 / omega * 0.8)) <= 3.0 * e.std_error + 1e-12);

  feynman::FeynmanKacOptions odd;
  odd.n_steps = 41;
  CHECK_THROWS_AS(feynman::feynman_kac_estimate(p, {0.0, 0.0, 0.0}, 1.0, omega, 10, 1, odd), ValidationError);
}

TEST_CASE("wave evolution") {
  const Axis axis{-1.0, 1.0, 5};
  const auto psi0 = ValueGrid::from_function(axis, axis, 0.0, GridTag::psi,
                                             [](double x, double v) { return 1.0 + x * v; });
  const auto same = feynman::wave_evolution(psi0, [](double, double, double) { return 3.0; }, 0.0);
  CHECK(same.values == psi0.values);
  const auto flat = feynman::wave_evolution(psi0, [](double, double, double) { return 0.0; }, 1.7);
  CHECK(flat.values == psi0.values);
  const ValueGrid ones(axis, axis, 0.0, GridTag::psi, 1.0);
  const auto decayed = feynman::wave_evolution(ones, [](double, double, double) { return 1.0; }, 2.0);
  for (double v : decayed.values) CHECK(v == doctest::Approx(0.135335283));
}

TEST_CASE("wave PDE residual") {
  const std::vector<std::array<double, 2>> probes{{0.1, 0.2}, {-0.5, 0.7}, {1.0, -1.0}};
  auto psi0 = [](double x, double v) { return std::exp(-0.5 * (x * x + v * v)); };
  auto f = [](double, double x, double v) { return 0.3 + 0.1 * x * v; };
  CHECK(feynman::wave_pde_residual(psi0, f, 0.8, probes) <= 1e-8);
  CHECK(feynman::wave_pde_residual(psi0, [](double, double, double) { return 0.0; }, 0.8, probes) == 0.0);
  CHECK(feynman::wave_pde_residual([](double, double) { return 0.0; }, f, 0.8, probes) == 0.0);
}
