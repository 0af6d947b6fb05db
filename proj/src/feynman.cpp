#include "fishpath/feynman.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <fmt/format.h>

#include "fishpath/errors.hpp"
#include "fishpath/rng.hpp"

namespace fishpath::feynman {

GAnsatz finite_difference_ansatz(std::function<double(double, double, double)> g) {
  return [g = std::move(g)](double s, double x, double v) {
    const double es = 1e-5 * std::max(1.0, std::abs(s));
    const double ex = 1e-5 * std::max(1.0, std::abs(x));
    const double ev = 1e-5 * std::max(1.0, std::abs(v));
    const double hx = 1e-4 * std::max(1.0, std::abs(x));
    const double hv = 1e-4 * std::max(1.0, std::abs(v));
    GPartials p;
    p.g = g(s, x, v);
    p.g_s = (g(s + es, x, v) - g(s - es, x, v)) / (2 * es);
    p.g_x = (g(s, x + ex, v) - g(s, x - ex, v)) / (2 * ex);
    p.g_v = (g(s, x, v + ev) - g(s, x, v - ev)) / (2 * ev);
    p.g_xx = (g(s, x + hx, v) - 2 * p.g + g(s, x - hx, v)) / (hx * hx);
    p.g_vv = (g(s, x, v + hv) - 2 * p.g + g(s, x, v - hv)) / (hv * hv);
    p.g_xv = (g(s, x + hx, v + hv) - g(s, x + hx, v - hv) - g(s, x - hx, v + hv) +
              g(s, x - hx, v - hv)) /
             (4 * hx * hv);
    return p;
  };
}

GAnsatz constant_ansatz(double c) {
  return [c](double, double, double) {
    GPartials p;
    p.g = c;
    return p;
  };
}

double hessian_asymmetry(const std::function<double(double, double, double)>& g,
                         const std::vector<std::array<double, 3>>& probes, double h) {
  double worst = 0.0;
  for (const auto& [s, x, v] : probes) {
    auto gx = [&](double vv) { return (g(s, x + h, vv) - g(s, x - h, vv)) / (2 * h); };
    auto gv = [&](double xx) { return (g(s, xx, v + h) - g(s, xx, v - h)) / (2 * h); };
    const double xv = (gx(v + h) - gx(v - h)) / (2 * h);
    const double vx = (gv(x + h) - gv(x - h)) / (2 * h);
    worst = std::max(worst, std::abs(xv - vx) / std::max(1.0, std::abs(xv)));
  }
  return worst;
}

double ActionSpec::field_value(double s) const {
  if (!field) return 0.0;
  return lqg::eval_field(*field, field_parameter(s));
}

double ActionSpec::cross_covariance() const {
  return fishpath::cross_covariance(sigma1, sigma2, corr, cross);
}

namespace {

double running_reward(const ActionSpec& spec, double s, double x, double v, double u) {
  return std::exp(-spec.discount * s) * spec.weight * spec.survival *
         evaluate_reward(spec.reward, s, x, v, u);
}

}  // namespace

double action_increment(const ActionSpec& spec, double s, double x, double v, double u,
                        const SliceIncrement& inc, double dt) {
  require(dt > 0.0, "dt must be positive");
  const double reward = running_reward(spec, s, x, v, u) * dt;
  const double r1 = inc.dx - spec.mu1(s, x, v, u) * dt - spec.sigma1 * inc.dB1;
  const double r2 = inc.dv - spec.mu2(s, x, v, u) * dt - spec.sigma2 * inc.dB2;
  double surface = 0.0;
  if (spec.mult3 != 0.0) {
    surface = spec.mult3 * lqg::metric_weight_of(lqg::kGamma, spec.field_value(s)) * dt;
  }
  const double total = reward + spec.mult1 * r1 + spec.mult2 * r2 + surface;
  if (!std::isfinite(total)) throw NumericalError("action increment is not finite");
  return total;
}

double f_from_partials(const ActionSpec& spec, const GPartials& p, double s, double x, double v,
                       double u) {
  const double c = spec.cross_covariance();
  const double value = running_reward(spec, s, x, v, u) + p.g + p.g_s +
                       p.g_x * spec.mu1(s, x, v, u) + p.g_v * spec.mu2(s, x, v, u) +
                       0.5 * (spec.sigma1 * spec.sigma1 * p.g_xx + 2.0 * c * p.g_xv +
                              spec.sigma2 * spec.sigma2 * p.g_vv);
  if (!std::isfinite(value)) {
    throw NumericalError(fmt::format("f is not finite at (s={}, x={}, v={}, u={})", s, x, v, u));
  }
  return value;
}

double f_function(const ActionSpec& spec, double s, double x, double v, double u) {
  require(static_cast<bool>(spec.ansatz), "action spec has no g ansatz");
  return f_from_partials(spec, spec.ansatz(s, x, v), s, x, v, u);
}

// ---------------------------------------------------------------------------

double KernelBlock::determinant() const {
  return hessian[0] * hessian[3] - hessian[1] * hessian[2];
}

void KernelBlock::validate() const {
  for (double h : hessian) require(std::isfinite(h), "kernel hessian must be finite");
  require(std::abs(hessian[1] - hessian[2]) <=
              1e-12 * std::max({1.0, std::abs(hessian[1]), std::abs(hessian[2])}),
          "kernel hessian must be symmetric");
  require(std::isfinite(epsilon) && epsilon > 0.0, "epsilon must be positive");
  if (!(hessian[0] > 0.0 && determinant() > 0.0)) {
    throw NumericalError("kernel block not positive definite");
  }
}

double kernel_normalisation(const KernelBlock& block, GaussianMode mode) {
  block.validate();
  const double det = block.determinant();
  const double eps = block.epsilon;
  return mode == GaussianMode::exact ? M_PI / (eps * std::sqrt(det)) : M_PI / std::sqrt(eps * det);
}

double shifted_gaussian_integral(const KernelBlock& block, GaussianMode mode) {
  const double mass = kernel_normalisation(block, mode);
  const double det = block.determinant();
  const auto& h = block.hessian;
  const auto& V = block.gradient;
  // V' H^-1 V with the explicit 2x2 inverse.
  const double quad = (h[3] * V[0] * V[0] - (h[1] + h[2]) * V[0] * V[1] + h[0] * V[1] * V[1]) / det;
  const double exponent = 0.25 * block.epsilon * quad;
  if (exponent > 709.0) throw NumericalError("shifted Gaussian integral overflows");
  return mass * std::exp(exponent);
}

ValueGrid transition_step(const ValueGrid& psi, const FEvaluator& f, const KernelBlock& block,
                          GaussianMode mode, const TransitionOptions& options) {
  psi.validate();
  block.validate();
  require(static_cast<bool>(f), "transition step needs an f evaluator");
  require(options.nodes == 32, "transition step uses 32 Gauss-Legendre nodes per axis");
  require(options.std_widths > 0.0, "window width must be positive");
  for (double value : psi.values) require(value >= 0.0, "psi must be nonnegative");

  const double eps = block.epsilon;
  const auto& H = block.hessian;
  const double norm = kernel_normalisation(block, mode);
  // Marginal standard deviations of the Gaussian exp(-eps xi.H.xi).
  const double det = block.determinant();
  const double sd_x = std::sqrt(H[3] / det / (2.0 * eps));
  const double sd_v = std::sqrt(H[0] / det / (2.0 * eps));

  using Rule = boost::math::quadrature::gauss<double, 32>;
  const auto& abscissa = Rule::abscissa();
  const auto& weights = Rule::weights();
  // Full symmetric node set from the half rule.
  std::vector<double> t, w;
  for (std::size_t k = 0; k < abscissa.size(); ++k) {
    if (abscissa[k] == 0.0) {
      t.push_back(0.0);
      w.push_back(weights[k]);
    } else {
      t.push_back(abscissa[k]);
      w.push_back(weights[k]);
      t.push_back(-abscissa[k]);
      w.push_back(weights[k]);
    }
  }

  ValueGrid out = psi;
  out.tag = GridTag::psi;
  for (std::size_t i = 0; i < psi.x.n; ++i) {
    const double x = psi.x.at(i);
    for (std::size_t j = 0; j < psi.v.n; ++j) {
      const double v = psi.v.at(j);
      double ax = options.std_widths * sd_x;
      double av = options.std_widths * sd_v;
      if (block.eta1) {
        require(x > 0.0, fmt::format("empty localization window at x = {}", x));
        ax = std::sqrt(*block.eta1 * eps / x);
      }
      if (block.eta2) {
        require(v > 0.0, fmt::format("empty localization window at v = {}", v));
        av = std::sqrt(*block.eta2 * eps / v);
      }
      double sum = 0.0;
      for (std::size_t a = 0; a < t.size(); ++a) {
        const double xi1 = ax * t[a];
        for (std::size_t b = 0; b < t.size(); ++b) {
          const double xi2 = av * t[b];
          const double quad = H[0] * xi1 * xi1 + (H[1] + H[2]) * xi1 * xi2 + H[3] * xi2 * xi2;
          const double p = psi.interpolate(x + xi1, v + xi2);
          if (p == 0.0) continue;
          sum += w[a] * w[b] * std::exp(-eps * (quad + f(x + xi1, v + xi2))) * p;
        }
      }
      out(i, j) = std::max(0.0, sum * ax * av / norm);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

Estimate feynman_kac_estimate(const hjb::HjbProblem& problem, sde::StatePoint point, double tau,
                              double omega, std::size_t n_paths, std::uint64_t seed,
                              const FeynmanKacOptions& options) {
  problem.validate();
  if (!(std::abs(omega) > problem.omega_epsilon)) {
    throw NumericalError(fmt::format("omega degenerate: |omega| = {}", std::abs(omega)));
  }
  require(tau > point.s, "tau must exceed the start time");
  require(n_paths >= 2, "Feynman-Kac estimate needs at least two paths");
  const std::size_t n = options.n_steps;
  require(n >= 1, "n_steps must be at least 1");
  require(!options.extrapolate || n % 2 == 0, "extrapolation needs an even number of steps");

  const auto& d = problem.diffusion;
  const sde::NoiseFactor nf = d.noise_factor();
  const double dt = (tau - point.s) / static_cast<double>(n);
  const double sq = std::sqrt(dt);
  const double inv_omega = 1.0 / omega;
  auto terminal = [&](double x, double v) {
    return options.terminal ? options.terminal(x, v) : 1.0;
  };
  auto check = [&](double logw, std::size_t path) {
    if (!std::isfinite(logw) || std::abs(logw) > 700.0) {
      throw NumericalError(fmt::format(
          "Feynman-Kac weight overflow on path {} (log-weight {}); rescale omega (currently {}) "
          "or shorten the horizon",
          path, logw, omega));
    }
  };

  RunningStats stats;
  for (std::size_t p = 0; p < n_paths; ++p) {
    rng::NormalSource normal(seed, rng::Stream::feynman_kac, p);
    double s = point.s;
    double x = point.x, v = point.v;
    double xc = point.x, vc = point.v;  // half-resolution path
    double logw = 0.0, logw_c = 0.0;
    double rate = problem.W(s, x, v) * inv_omega;
    double rate_c = rate;
    double bx = 0.0, bv = 0.0;  // fine noise accumulated over one coarse step
    for (std::size_t k = 0; k < n; ++k) {
      const double z1 = normal(), z2 = normal();
      const double ex = nf.l11 * z1 * sq;
      const double ev = (nf.l21 * z1 + nf.l22 * z2) * sq;
      const double mx = d.mu1(s, x, v), mv = d.mu2(s, x, v);
      x += mx * dt + ex;
      v += mv * dt + ev;
      s = point.s + static_cast<double>(k + 1) * dt;
      const double r = problem.W(s, x, v) * inv_omega;
      logw -= 0.5 * (rate + r) * dt;
      rate = r;
      if (!options.extrapolate) continue;
      bx += ex;
      bv += ev;
      if (k % 2 == 1) {
        const double sc = s - 2.0 * dt;
        const double mxc = d.mu1(sc, xc, vc), mvc = d.mu2(sc, xc, vc);
        xc += mxc * 2.0 * dt + bx;
        vc += mvc * 2.0 * dt + bv;
        const double rc = problem.W(s, xc, vc) * inv_omega;
        logw_c -= 0.5 * (rate_c + rc) * 2.0 * dt;
        rate_c = rc;
        bx = bv = 0.0;
      }
    }
    check(logw, p);
    const double fine = std::exp(logw) * terminal(x, v);
    if (options.extrapolate) {
      check(logw_c, p);
      stats.add(2.0 * fine - std::exp(logw_c) * terminal(xc, vc));
    } else {
      stats.add(fine);
    }
  }
  return stats.estimate();
}

// ---------------------------------------------------------------------------

ValueGrid wave_evolution(const ValueGrid& psi0, const FTimeEvaluator& f, double s) {
  require(s >= 0.0, "wave evolution needs s >= 0");
  require(static_cast<bool>(f), "wave evolution needs an f evaluator");
  ValueGrid out = psi0;
  out.tag = GridTag::psi;
  out.time = psi0.time + s;
  if (s == 0.0) return out;
  for (std::size_t i = 0; i < psi0.x.n; ++i) {
    for (std::size_t j = 0; j < psi0.v.n; ++j) {
      const double value = std::exp(-s * f(s, psi0.x.at(i), psi0.v.at(j))) * psi0(i, j);
      if (!std::isfinite(value)) throw NumericalError("wave evolution left the finite range");
      out(i, j) = value;
    }
  }
  return out;
}

double wave_pde_residual(const std::function<double(double, double)>& psi0, const FTimeEvaluator& f,
                         double s, const std::vector<std::array<double, 2>>& probes, double ds,
                         bool time_correction) {
  require(ds > 0.0, "ds must be positive");
  require(s >= ds, "wave residual needs s >= ds");
  double worst = 0.0;
  for (const auto& [x, v] : probes) {
    const double p0 = psi0(x, v);
    auto psi = [&](double r) { return std::exp(-r * f(r, x, v)) * p0; };
    const double dpsi = (psi(s + ds) - psi(s - ds)) / (2.0 * ds);
    double residual = dpsi + f(s, x, v) * psi(s);
    if (time_correction) {
      const double fs = (f(s + ds, x, v) - f(s - ds, x, v)) / (2.0 * ds);
      residual += s * fs * psi(s);
    }
    worst = std::max(worst, std::abs(residual));
  }
  return worst;
}

}  // namespace fishpath::feynman
