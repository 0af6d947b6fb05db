#include <doctest.h>

#include <cmath>

#include "fishpath/errors.hpp"
#include "fishpath/model.hpp"
#include "fishpath/objective.hpp"
#include "fishpath/sde.hpp"
#include "fishpath/strategy.hpp"
#include "fishpath/verify/oracles.hpp"

using namespace fishpath;

TEST_CASE("example reward is x v u^2") {
  const auto r = RewardSpec::example1();
  CHECK(evaluate_reward(r, 0.0, 2.0, 3.0, 0.5) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(evaluate_reward(r, 0.7, -4.0, 9.0, 0.0) == 0.0);
  CHECK(evaluate_reward(r, 0.0, 1.0, -1.0, 1.0) == -1.0);
  CHECK(evaluate_reward(RewardSpec::constant(2.5), 0.3, 1.0, 1.0, 1.0) == 2.5);
}

TEST_CASE("discounted running weight") {
  ModelParams p;
  p.discount = 0.1;
  CHECK(discounted_running_weight(p, 0.0) == 1.0);
  p.discount = 0.5;
  p.weight = 2.0;
  p.survival = 0.5;
  CHECK(discounted_running_weight(p, 0.0) == 1.0);
  p.discount = 1.0;
  p.weight = 1.0;
  p.survival = 1.0;
  CHECK(discounted_running_weight(p, std::log(2.0)) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("parameter validation names the invariant") {
  ModelParams p;
  p.validate();
  p.dt = 0.0;
  CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("dt must be positive"), ValidationError);
  p = {};
  p.corr = 1.0;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p = {};
  p.survival = 1.5;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p = {};
  p.quad_cost = 0.0;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p = {};
  p.n_fish = 0;
  CHECK_THROWS_AS(p.validate(), ValidationError);
}

TEST_CASE("omega and cross covariance") {
  ModelParams p;
  p.quad_cost = 1.0;
  p.sigma1 = 1.0;
  p.sigma2 = 1.0;
  p.corr = 0.5;
  CHECK(p.omega() == doctest::Approx(3.0));
  p.sigma1 = 0.5;
  p.sigma2 = 0.8;
  CHECK(p.cross_covariance() == doctest::Approx(0.5 * 0.125));
  p.cross_term = CrossTerm::conventional;
  CHECK(p.cross_covariance() == doctest::Approx(0.5 * 0.4));
}

TEST_CASE("school state validation") {
  SchoolState s{0.0, {1.0, 2.0}, {0.5}};
  CHECK_THROWS_AS(s.validate(2), ValidationError);
  s.velocities.push_back(NAN);
  CHECK_THROWS_AS(s.validate(2), ValidationError);
  s.velocities.back() = 1.0;
  s.validate(2);
  const std::vector<Interval> box{{0.0, 1.5}};
  CHECK_FALSE(s.within(box));
  const std::vector<Interval> wide{{0.0, 3.0}};
  CHECK(s.within(wide));
}

TEST_CASE("running stats") {
  RunningStats st;
  for (double v : {1.0, 2.0, 3.0, 4.0}) st.add(v);
  const auto e = st.estimate();
  CHECK(e.mean == doctest::Approx(2.5));
  CHECK(e.std_error == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
  CHECK(e.samples == 4);
}

namespace {

ModelParams two_fish() {
  ModelParams p;
  p.n_fish = 2;
  p.discount = 0.3;
  p.weight = 1.2;
  p.survival = 0.9;
  p.comm_rate = 0.8;
  p.coupling = 0.6;
  p.horizon = 1.0;
  p.dt = 0.01;
  return p;
}

}  // namespace

TEST_CASE("zero reward gives a zero objective") {
  auto p = two_fish();
  p.sigma1 = 0.3;
  p.sigma2 = 0.2;
  const SchoolState init{0.0, {1.0, 2.0}, {1.0, 0.5}};
  const auto e = estimate_objective(p, sde::DynamicsSpec::cucker_smale(), RewardSpec::constant(0.0),
                                    sde::constant_policy(1.0), init, 64, 3);
  CHECK(e.mean == 0.0);
  CHECK(e.std_error == 0.0);
}

TEST_CASE("constant reward integrates the discount") {
  auto p = two_fish();
  p.n_fish = 1;
  p.sigma1 = 0.4;
  p.sigma2 = 0.4;
  const double c = 1.7;
  const SchoolState init{0.0, {1.0}, {1.0}};
  const auto e = estimate_objective(p, sde::DynamicsSpec::cucker_smale(), RewardSpec::constant(c),
                                    sde::constant_policy(0.5), init, 200, 11);
  const double rho = 0.3, exact = 1.2 * 0.9 * c * (1.0 - std::exp(-rho * 1.0)) / rho;
  CHECK(std::abs(e.mean - exact) <= 3.0 * e.std_error + 1e-5 * exact);
}

TEST_CASE("noise-free objective matches deterministic quadrature") {
  auto p = two_fish();
  p.dt = 2.5e-7;
  const SchoolState init{0.0, {1.0, 2.0}, {1.0, 0.4}};
  const double u = 0.7;
  const auto e = estimate_objective(p, sde::DynamicsSpec::cucker_smale(), RewardSpec::example1(),
                                    sde::constant_policy(u), init, 1, 5);
  const double oracle = verify::deterministic_objective({1.0, 2.0}, {1.0, 0.4}, u, p.coupling,
                                                        p.comm_rate, 0.3, 1.2, 0.9, 1.0);
  CHECK(std::abs(e.mean - oracle) / std::abs(oracle) < 1e-6);
}

TEST_CASE("identical policies are indistinguishable") {
  auto p = two_fish();
  p.sigma1 = 0.3;
  p.sigma2 = 0.3;
  const SchoolState init{0.0, {1.0, 2.0}, {1.0, 0.5}};
  const auto pol = sde::constant_policy(0.4);
  const auto r = compare_policies(p, sde::DynamicsSpec::cucker_smale(), RewardSpec::example1(), pol,
                                  pol, init, 50, 2);
  CHECK(r.gap == 0.0);
  CHECK(r.winner == "indistinguishable");
}

TEST_CASE("closed-form against zero control is reproducible and flags the floor") {
  auto p = two_fish();
  p.sigma1 = 0.1;
  p.sigma2 = 0.1;
  p.mult1 = 0.3;
  p.mult2 = 0.5;
  p.reward_floor = 1e6;
  strategy::Example1Context ctx;
  ctx.params = p;
  ctx.school = {0.0, {1.0, 2.0}, {1.0, 0.5}};
  const auto policy = strategy::closed_form_policy(ctx);
  const auto run = [&] {
    return compare_policies(p, sde::DynamicsSpec::cucker_smale(), RewardSpec::example1(), policy,
                            sde::zero_policy(), ctx.school, 40, 9);
  };
  const auto a = run(), b = run();
  CHECK(a.a.mean == b.a.mean);
  CHECK(a.gap == b.gap);
  CHECK(a.b.mean == 0.0);
  CHECK((a.winner == "A" || a.winner == "B" || a.winner == "indistinguishable"));
  CHECK(a.below_reward_floor);
}
