#include <doctest.h>

#include <cmath>

#include "fishpath/errors.hpp"
#include "fishpath/feynman.hpp"
#include "fishpath/hjb.hpp"
#include "fishpath/verify/oracles.hpp"

using namespace fishpath;

namespace {

hjb::HjbProblem flat_problem(double w) {
  hjb::HjbProblem p;
  p.W = [w](double, double, double) { return w; };
  p.diffusion.mu1 = [](double, double, double) { return 0.0; };
  p.diffusion.mu2 = [](double, double, double) { return 0.0; };
  p.omega_override = 1.0;
  return p;
}

hjb::HjbProblem ou_problem() {
  hjb::HjbProblem p;
  p.W = [](double, double x, double v) { return 0.25 * (x * x + v * v); };
  p.diffusion.mu1 = [](double, double x, double) { return -0.5 * x; };
  p.diffusion.mu2 = [](double, double, double v) { return -0.5 * v; };
  p.diffusion.sigma1 = 0.5;
  p.diffusion.sigma2 = 0.5;
  p.diffusion.corr = 0.4;
  return p;
}

const Axis small{-1.0, 1.0, 11};

bool interior(const ValueGrid& g, std::size_t i, std::size_t j) {
  return i > 0 && j > 0 && i + 1 < g.x.n && j + 1 < g.v.n;
}

}  // namespace

TEST_CASE("quadratic control") {
  CHECK(hjb::optimal_control_quadratic(0.0, 0.0, 3.0) == 0.0);
  CHECK(hjb::optimal_control_quadratic(1.0, 2.0, 1.0) == 3.0);
  CHECK(hjb::optimal_control_quadratic(1.0, 1.0, 2.0) == 1.0);
  CHECK_THROWS_AS(hjb::optimal_control_quadratic(1.0, 1.0, 0.0), ValidationError);
}

TEST_CASE("HJB right-hand sides") {
  const ValueGrid flat(small, small, 0.0, GridTag::phi_bar, 2.0);
  for (double v : hjb::hjb_rhs_nonlinear(flat, flat_problem(0.0)).values) CHECK(v == doctest::Approx(0.0));
  for (double v : hjb::hjb_rhs_linearized(flat, flat_problem(0.0)).values) CHECK(v == doctest::Approx(0.0));
  for (double v : hjb::hjb_rhs_nonlinear(flat, flat_problem(0.7)).values) CHECK(v == doctest::Approx(0.7));

  const double m = 0.3, R = 2.0;
  auto p = flat_problem(0.0);
  p.diffusion.mu1 = [m](double, double, double) { return m; };
  p.R = R;
  const auto phi = ValueGrid::from_function(small, small, 0.0, GridTag::phi_bar,
                                            [](double x, double) { return x; });
  const auto nl = hjb::hjb_rhs_nonlinear(phi, p);
  const auto lin = hjb::hjb_rhs_linearized(phi, p);
  for (std::size_t i = 0; i < small.n; ++i) {
    for (std::size_t j = 0; j < small.n; ++j) {
      if (!interior(phi, i, j)) continue;
      CHECK(nl(i, j) == doctest::Approx(m + 1.0 / (2.0 * R)));
      CHECK(lin(i, j) == doctest::Approx(m));
      CHECK(nl(i, j) - lin(i, j) == doctest::Approx(1.0 / (2.0 * R)));
    }
  }
}

TEST_CASE("Cole-Hopf transform") {
  const ValueGrid one(small, small, 0.0, GridTag::theta, 1.0);
  for (double v : hjb::cole_hopf_forward(one, 1.5).values) CHECK(v == 0.0);
  const ValueGrid e(small, small, 0.0, GridTag::theta, std::exp(1.0));
  for (double v : hjb::cole_hopf_forward(e, 2.0).values) CHECK(v == doctest::Approx(-2.0));
  const auto back = hjb::cole_hopf_inverse(hjb::cole_hopf_forward(e, 2.0), 2.0);
  for (double v : back.values) CHECK(v == doctest::Approx(std::exp(1.0)));
  CHECK(hjb::omega_of(1.0, 1.0, 1.0, 0.5) == doctest::Approx(3.0));
  const ValueGrid negative(small, small, 0.0, GridTag::theta, -1.0);
  CHECK_THROWS(hjb::cole_hopf_forward(negative, 1.0));
  CHECK_THROWS_AS(hjb::cole_hopf_forward(one, 0.0), NumericalError);
}

TEST_CASE("backward solve of a constant potential") {
  const ValueGrid term(small, small, 1.0, GridTag::theta, 1.0);
  const auto theta = hjb::solve_theta_backward(flat_problem(0.5), term, 0.0, 1.0, 100);
  for (double v : theta.values) CHECK(v == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
  const auto still = hjb::solve_theta_backward(flat_problem(0.0), term, 0.0, 1.0, 10);
  for (double v : still.values) CHECK(v == 1.0);
}

TEST_CASE("backward solve rejects an unstable step") {
  const auto p = ou_problem();
  const Axis fine{-4.0, 4.0, 101};
  const ValueGrid term(fine, fine, 1.0, GridTag::theta, 1.0);
  CHECK_THROWS_WITH_AS(hjb::solve_theta_backward(p, term, 0.0, 1.0, 10),
                       doctest::Contains("time steps"), ValidationError);
}

TEST_CASE("backward solve agrees with Feynman-Kac at probes") {
  const auto p = ou_problem();
  const Axis axis{-4.0, 4.0, 101};
  const ValueGrid term(axis, axis, 1.0, GridTag::theta, 1.0);
  const auto theta = hjb::solve_theta_backward(
      p, term, 0.0, 1.0, 4 * hjb::min_stable_steps(p, axis, axis, 0.0, 1.0, 0.25));
  int within = 0;
  std::uint64_t seed = 100;
  for (auto [x, v] : {std::pair{0.0, 0.0}, {0.4, -0.48}, {-1.2, 0.96}, {0.8, 0.8}, {-0.4, -0.4}}) {
    const auto e = feynman::feynman_kac_estimate(p, {0.0, x, v}, 1.0, p.omega(), 20000, seed++);
    if (std::abs(e.mean - theta.interpolate(x, v)) <= 3.0 * e.std_error) ++within;
  }
  CHECK(within >= 4);
}

TEST_CASE("backward solve matches the Riccati desirability") {
  const auto p = ou_problem();
  const Axis axis{-4.0, 4.0, 101};
  const ValueGrid term(axis, axis, 1.0, GridTag::theta, 1.0);
  const auto theta = hjb::solve_theta_backward(
      p, term, 0.0, 1.0, 4 * hjb::min_stable_steps(p, axis, axis, 0.0, 1.0, 0.25));
  const verify::OuDesirability exact{0.5, 0.5, p.omega(), {0.25, p.diffusion.cross_covariance(), 0.25}, 1.0};
  for (auto [x, v] : {std::pair{0.0, 0.0}, {1.2, -0.96}, {-0.4, 0.48}}) {
    CHECK(std::abs(theta.interpolate(x, v) - exact.theta(0.0, x, v)) < 5e-4);
  }
}

TEST_CASE("control field from theta") {
  const ValueGrid flat(small, small, 0.0, GridTag::theta, 0.3);
  for (double v : hjb::control_field_from_theta(flat, 1.0, 1.0).values) CHECK(v == doctest::Approx(0.0));

  const double omega = 0.8, R = 2.0;
  const Axis ax{-1.0, 1.0, 41};
  const auto theta = ValueGrid::from_function(ax, ax, 0.0, GridTag::theta,
                                              [omega](double x, double) { return std::exp(-x / omega); });
  const auto u = hjb::control_field_from_theta(theta, omega, R);
  CHECK(u.tag == GridTag::control);
  for (std::size_t i = 1; i + 1 < ax.n; ++i) CHECK(u(i, 20) == doctest::Approx(1.0 / R).epsilon(1e-9));
}

TEST_CASE("LQ control matches Riccati feedback") {
  hjb::HjbProblem p;
  p.W = [](double, double x, double) { return 0.5 * x * x; };
  p.diffusion.mu1 = [](double, double x, double) { return -0.5 * x; };
  p.diffusion.mu2 = [](double, double, double) { return 0.0; };
  p.diffusion.sigma1 = 1.0;
  const Axis ax{-5.0, 5.0, 201}, av{-1.0, 1.0, 3};
  const ValueGrid term(ax, av, 1.0, GridTag::theta, 1.0);
  const auto theta =
      hjb::solve_theta_backward(p, term, 0.0, 1.0, hjb::min_stable_steps(p, ax, av, 0.0, 1.0, 0.25));
  const auto u = hjb::control_field_from_theta(theta, p.omega(), 1.0);
  const double P = verify::lq_riccati_gain(1.0, -0.5, 1.0, 1.0, 0.0);
  for (std::size_t i = 80; i <= 120; ++i) CHECK(std::abs(u(i, 1) - P * ax.at(i)) < 1e-3);
}
