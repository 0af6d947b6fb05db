#include "fishpath/hjb.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>

#include "fishpath/errors.hpp"

namespace fishpath::hjb {

double omega_of(double R, double sigma1, double sigma2, double cross) {
  return R * (sigma1 * sigma1 + 2.0 * cross + sigma2 * sigma2);
}

double HjbProblem::omega() const {
  const double w = omega_override ? *omega_override
                                  : omega_of(R, diffusion.sigma1, diffusion.sigma2,
                                             diffusion.cross_covariance());
  if (!(std::abs(w) > omega_epsilon)) {
    throw NumericalError(fmt::format("omega degenerate: |omega| = {} <= {}", std::abs(w), omega_epsilon));
  }
  return w;
}

void HjbProblem::validate() const {
  require(static_cast<bool>(W), "HJB problem needs a running reward W");
  require(R > 0.0, "R must be positive");
  diffusion.validate();
}

double optimal_control_quadratic(double phi_x, double phi_v, double R) {
  require(R > 0.0, "R must be positive");
  return (phi_x + phi_v) / R;
}

namespace {

ValueGrid hjb_rhs(const ValueGrid& phi, const HjbProblem& p, bool squares) {
  p.validate();
  phi.validate();
  const auto px = d_dx(phi), pv = d_dv(phi);
  const auto pxx = d_dxx(phi), pvv = d_dvv(phi), pxv = d_dxv(phi);
  const auto& d = p.diffusion;
  const double c = d.cross_covariance();
  const double R = p.R;
  ValueGrid out = phi;
  out.tag = GridTag::phi_bar;
  const double s = phi.time;
  for (std::size_t i = 0; i < phi.x.n; ++i) {
    const double x = phi.x.at(i);
    for (std::size_t j = 0; j < phi.v.n; ++j) {
      const double v = phi.v.at(j);
      const std::size_t k = phi.index(i, j);
      const double fx = px[k], fv = pv[k];
      double rhs = p.W(s, x, v) + d.mu1(s, x, v) * fx + d.mu2(s, x, v) * fv +
                   (2.0 / R) * fx * fv +
                   0.5 * (d.sigma1 * d.sigma1 * pxx[k] + 2.0 * c * pxv[k] +
                          d.sigma2 * d.sigma2 * pvv[k]);
      if (squares) {
        rhs += -(0.5 / R) * (fx + fv) * (fx + fv) + (fx * fx + fv * fv) / R;
      }
      out.values[k] = rhs;
    }
  }
  return out;
}

void check_omega(double omega, double eps) {
  if (!(std::abs(omega) > eps)) {
    throw NumericalError(fmt::format("omega degenerate: |omega| = {} <= {}", std::abs(omega), eps));
  }
}

}  // namespace

ValueGrid hjb_rhs_nonlinear(const ValueGrid& phi, const HjbProblem& problem) {
  return hjb_rhs(phi, problem, true);
}

ValueGrid hjb_rhs_linearized(const ValueGrid& phi, const HjbProblem& problem) {
  return hjb_rhs(phi, problem, false);
}

ValueGrid cole_hopf_forward(const ValueGrid& theta, double omega, double omega_epsilon) {
  check_omega(omega, omega_epsilon);
  ValueGrid out = theta;
  out.tag = GridTag::phi_bar;
  for (std::size_t k = 0; k < theta.size(); ++k) {
    const double t = theta.values[k];
    require(t > 0.0 && std::isfinite(t),
            fmt::format("theta must be positive for the log transform (node {} holds {})", k, t));
    out.values[k] = -omega * std::log(t);
  }
  return out;
}

ValueGrid cole_hopf_inverse(const ValueGrid& phi, double omega, double omega_epsilon) {
  check_omega(omega, omega_epsilon);
  ValueGrid out = phi;
  out.tag = GridTag::theta;
  for (double& value : out.values) value = std::exp(-value / omega);
  return out;
}

double max_stable_step(const HjbProblem& problem, const Axis& x, const Axis& v, double factor) {
  const double s1 = problem.diffusion.sigma1, s2 = problem.diffusion.sigma2;
  const double diff = std::max(s1 * s1, s2 * s2);
  if (diff == 0.0) return std::numeric_limits<double>::infinity();
  const double h = std::min(x.step() * x.step(), v.step() * v.step());
  return factor * h / diff;
}

std::size_t min_stable_steps(const HjbProblem& problem, const Axis& x, const Axis& v,
                             double s_start, double s_end, double factor) {
  const double dt = max_stable_step(problem, x, v, factor);
  if (!std::isfinite(dt)) return 1;
  return static_cast<std::size_t>(std::ceil((s_end - s_start) / dt * (1.0 + 1e-12)));
}

ValueGrid solve_theta_backward(const HjbProblem& problem, const ValueGrid& terminal, double s_start,
                               double s_end, std::size_t n_time_steps,
                               const BackwardOptions& options) {
  problem.validate();
  terminal.validate();
  require(terminal.tag == GridTag::theta, "terminal data must be a theta grid");
  for (double value : terminal.values) require(value > 0.0, "terminal theta must be positive");
  require(s_end > s_start, "s_end must exceed s_start");
  require(n_time_steps >= 1, "n_time_steps must be at least 1");
  require(options.stability_factor > 0.0, "stability factor must be positive");
  const double omega = problem.omega();
  const double dt = (s_end - s_start) / static_cast<double>(n_time_steps);
  const double limit = max_stable_step(problem, terminal.x, terminal.v, options.stability_factor);
  require(dt <= limit * (1.0 + 1e-12),
          fmt::format("explicit scheme unstable: dt = {} exceeds the bound {} (need at least {} "
                      "time steps)",
                      dt, limit,
                      min_stable_steps(problem, terminal.x, terminal.v, s_start, s_end,
                                       options.stability_factor)));

  const auto& d = problem.diffusion;
  const std::size_t nx = terminal.x.n, nv = terminal.v.n;
  const double hx = terminal.x.step(), hv = terminal.v.step();
  const double a_xx = 0.5 * d.sigma1 * d.sigma1 / (hx * hx);
  const double a_vv = 0.5 * d.sigma2 * d.sigma2 / (hv * hv);
  const double a_xv = d.cross_covariance() / (4.0 * hx * hv);

  // Mirror ghost nodes give the zero-gradient boundary.
  auto mx = [nx](std::ptrdiff_t i) -> std::size_t {
    if (i < 0) return static_cast<std::size_t>(-i);
    if (i >= static_cast<std::ptrdiff_t>(nx)) return static_cast<std::size_t>(2 * (nx - 1) - i);
    return static_cast<std::size_t>(i);
  };
  auto mv = [nv](std::ptrdiff_t j) -> std::size_t {
    if (j < 0) return static_cast<std::size_t>(-j);
    if (j >= static_cast<std::ptrdiff_t>(nv)) return static_cast<std::size_t>(2 * (nv - 1) - j);
    return static_cast<std::size_t>(j);
  };

  std::vector<double> xs(nx), vs(nv);
  for (std::size_t i = 0; i < nx; ++i) xs[i] = terminal.x.at(i);
  for (std::size_t j = 0; j < nv; ++j) vs[j] = terminal.v.at(j);

  std::vector<double> cur = terminal.values, next(cur.size());
  auto at = [&](std::size_t i, std::size_t j) { return cur[i * nv + j]; };
  for (std::size_t step = 0; step < n_time_steps; ++step) {
    const double s = s_end - static_cast<double>(step) * dt;
    for (std::size_t i = 0; i < nx; ++i) {
      const auto ii = static_cast<std::ptrdiff_t>(i);
      const std::size_t ip = mx(ii + 1), im = mx(ii - 1);
      for (std::size_t j = 0; j < nv; ++j) {
        const auto jj = static_cast<std::ptrdiff_t>(j);
        const std::size_t jp = mv(jj + 1), jm = mv(jj - 1);
        const double t0 = at(i, j);
        const double tx = (at(ip, j) - at(im, j)) / (2.0 * hx);
        const double tv = (at(i, jp) - at(i, jm)) / (2.0 * hv);
        const double lap = a_xx * (at(ip, j) - 2.0 * t0 + at(im, j)) +
                           a_vv * (at(i, jp) - 2.0 * t0 + at(i, jm)) +
                           a_xv * (at(ip, jp) - at(ip, jm) - at(im, jp) + at(im, jm));
        const double x = xs[i], v = vs[j];
        const double transport = d.mu1(s, x, v) * tx + d.mu2(s, x, v) * tv + lap;
        next[i * nv + j] = std::exp(-problem.W(s, x, v) / omega * dt) * (t0 + dt * transport);
      }
    }
    for (std::size_t k = 0; k < next.size(); ++k) {
      if (!(next[k] > 0.0) || !std::isfinite(next[k])) {
        throw NumericalError(fmt::format(
            "theta lost positivity at backward step {} (s = {}, node {}, value {})", step + 1,
            s - dt, k, next[k]));
      }
    }
    std::swap(cur, next);
  }

  ValueGrid out = terminal;
  out.values = std::move(cur);
  out.time = s_start;
  out.tag = GridTag::theta;
  return out;
}

ValueGrid control_field_from_theta(const ValueGrid& theta, double omega, double R) {
  require(R > 0.0, "R must be positive");
  const ValueGrid phi = cole_hopf_forward(theta, omega);
  const auto px = d_dx(phi), pv = d_dv(phi);
  ValueGrid out = theta;
  out.tag = GridTag::control;
  for (std::size_t k = 0; k < out.size(); ++k) out.values[k] = (px[k] + pv[k]) / R;
  return out;
}

}  // namespace fishpath::hjb
