#include "crn/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "crn/error.hpp"
#include "crn/parser.hpp"

namespace crn {

LyapunovSpec LyapunovSpec::classic(std::vector<double> x_star) {
  LyapunovSpec spec;
  spec.indices.resize(x_star.size());
  std::iota(spec.indices.begin(), spec.indices.end(), std::size_t{0});
  spec.weights.assign(x_star.size(), 1.0);
  spec.x_star = std::move(x_star);
  return spec;
}

namespace {

void check_spec(const LyapunovSpec& spec, std::span<const double> x) {
  if (spec.indices.empty()) throw Error("pseudo_helmholtz: empty index subset");
  if (spec.indices.size() != spec.weights.size())
    throw Error("pseudo_helmholtz: weights/indices length mismatch");
  for (std::size_t k = 0; k < spec.indices.size(); ++k) {
    const std::size_t i = spec.indices[k];
    if (i >= x.size() || i >= spec.x_star.size())
      throw Error("pseudo_helmholtz: index out of range");
    if (!(spec.weights[k] > 0.0)) throw Error("pseudo_helmholtz: weights must be positive");
    if (!(x[i] > 0.0)) throw Error("pseudo_helmholtz: nonpositive concentration on subset");
    if (!(spec.x_star[i] > 0.0)) throw Error("pseudo_helmholtz: nonpositive reference state");
  }
}

}  // namespace

double pseudo_helmholtz(const LyapunovSpec& spec, std::span<const double> x) {
  check_spec(spec, x);
  double g = 0.0;
  for (std::size_t k = 0; k < spec.indices.size(); ++k) {
    const std::size_t i = spec.indices[k];
    g += spec.weights[k] * (spec.x_star[i] - x[i] - x[i] * std::log(spec.x_star[i] / x[i]));
  }
  return g;
}

std::vector<double> pseudo_helmholtz_gradient(const LyapunovSpec& spec,
                                              std::span<const double> x) {
  check_spec(spec, x);
  std::vector<double> grad(x.size(), 0.0);
  for (std::size_t k = 0; k < spec.indices.size(); ++k) {
    const std::size_t i = spec.indices[k];
    grad[i] = spec.weights[k] * std::log(x[i] / spec.x_star[i]);
  }
  return grad;
}

namespace {

/// Square augmented system for the in-class equilibrium: s independent rows
/// of S v(x), then kernel constraints N^T (x - x0).
struct EquilibriumSystem {
  const Network& net;
  std::vector<std::size_t> field_rows;  // independent rows of S
  Matrix kernel;                        // nullspace of S^T
  const std::vector<double>& x0;

  std::vector<double> residual(const std::vector<double>& x) const {
    const std::vector<double> f = net.field_at(x);
    std::vector<double> r;
    r.reserve(x.size());
    for (std::size_t i : field_rows) r.push_back(f[i]);
    for (std::size_t k = 0; k < kernel.cols(); ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) s += kernel(i, k) * (x[i] - x0[i]);
      r.push_back(s);
    }
    return r;
  }

  Matrix jacobian(const std::vector<double>& x) const {
    const std::size_t n = x.size();
    const std::vector<double> v = net.mass_action_rates(x);
    Matrix jac(n, n);
    for (std::size_t row = 0; row < field_rows.size(); ++row) {
      const std::size_t i = field_rows[row];
      for (std::size_t j = 0; j < net.num_reactions(); ++j) {
        const double sij = net.s()(i, j);
        if (sij == 0.0) continue;
        const Complex& reactant = net.reactions()[j].reactant;
        for (std::size_t k = 0; k < n; ++k) {
          const double e = reactant[k];
          if (e == 0.0) continue;
          // d v_j / d x_k = e * v_j / x_k on x > 0.
          jac(row, k) += sij * e * v[j] / x[k];
        }
      }
    }
    for (std::size_t k = 0; k < kernel.cols(); ++k)
      for (std::size_t i = 0; i < n; ++i) jac(field_rows.size() + k, i) = kernel(i, k);
    return jac;
  }
};

double clip_to_positive(const std::vector<double>& x, const std::vector<double>& step) {
  double lambda = 1.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (step[i] < 0.0) lambda = std::min(lambda, 0.9 * x[i] / -step[i]);
  return lambda;
}

}  // namespace

std::vector<double> newton_equilibrium(const Network& net, std::vector<double> x0,
                                       const NewtonOptions& opts) {
  const std::size_t n = net.num_species();
  if (x0.size() != n) throw Error("newton_equilibrium: initial point length mismatch");
  for (double xi : x0)
    if (!(xi > 0.0)) throw Error("newton_equilibrium: initial point must be positive");

  EquilibriumSystem sys{net, {}, nullspace(net.s().transposed(), 1e-9), x0};
  // Pivot columns of rref(S^T) index the independent rows of S.
  sys.field_rows = rref(net.s().transposed(), 1e-9).pivots;
  if (sys.field_rows.size() + sys.kernel.cols() != n)
    throw Error("newton_equilibrium: rank/kernel split inconsistent");

  std::vector<double> x = x0;
  std::vector<double> r = sys.residual(x);
  double rnorm = max_abs(r);
  auto interior = [&] {
    for (double xi : x)
      if (xi <= 1e-8) return false;
    return true;
  };
  auto boundary_error = [&]() -> Error {
    return Error("newton_equilibrium: iterates collapsed to the positive-orthant boundary; "
                 "no interior equilibrium found in this compatibility class");
  };
  auto polish = [&] {
    // one extra full step; quadratic convergence takes the residual to
    // machine precision once inside the basin
    for (int extra = 0; extra < 2; ++extra) {
      std::vector<double> step;
      try {
        step = solve(sys.jacobian(x), r);
      } catch (const Error&) {
        return;
      }
      std::vector<double> trial(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) trial[i] = x[i] - step[i];
      bool positive = true;
      for (double ti : trial) positive &= ti > 0.0;
      if (!positive) return;
      const std::vector<double> rt = sys.residual(trial);
      if (max_abs(rt) >= rnorm) return;
      x = trial;
      r = rt;
      rnorm = max_abs(rt);
    }
  };
  for (std::size_t iter = 0; iter < opts.max_iterations; ++iter) {
    if (rnorm < opts.tol && max_abs(net.field_at(x)) < opts.tol) {
      if (!interior()) throw boundary_error();
      polish();
      return x;
    }
    std::vector<double> step = solve(sys.jacobian(x), r);
    for (double& s : step) s = -s;
    double lambda = clip_to_positive(x, step);
    bool improved = false;
    for (int halving = 0; halving < 40; ++halving) {
      std::vector<double> trial(n);
      for (std::size_t i = 0; i < n; ++i) trial[i] = x[i] + lambda * step[i];
      const std::vector<double> rt = sys.residual(trial);
      const double tnorm = max_abs(rt);
      if (tnorm < rnorm * (1.0 - 0.25 * lambda) || tnorm < opts.tol) {
        x = std::move(trial);
        r = rt;
        rnorm = tnorm;
        improved = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!improved) break;
  }
  if (rnorm < opts.tol && max_abs(net.field_at(x)) < opts.tol) {
    if (!interior()) throw boundary_error();
    polish();
    return x;
  }
  std::ostringstream os;
  os << "newton_equilibrium: no convergence (residual " << rnorm << " at x = (";
  for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << format_double(x[i]);
  os << "))";
  throw Error(os.str());
}

namespace {

std::vector<double> rk_stage(const std::vector<double>& x, const std::vector<double>& k,
                             double factor) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + factor * k[i];
  return out;
}

bool state_admissible(const std::vector<double>& x, bool generalized) {
  for (double xi : x) {
    if (xi < -1e-9) return false;
    if (generalized && xi <= 0.0) return false;
  }
  return true;
}

void record_sample(Trajectory& traj, double t, const std::vector<double>& x,
                   const IntegrateOptions& opts, const std::vector<double>& totals0) {
  traj.times.push_back(t);
  traj.states.push_back(x);
  if (opts.conserved && !opts.conserved->empty()) {
    const std::vector<double> totals = opts.conserved->transposed() * x;
    double worst = 0.0;
    for (std::size_t k = 0; k < totals.size(); ++k)
      worst = std::max(worst, std::fabs(totals[k] - totals0[k]));
    traj.conservation_residual.push_back(worst);
  } else {
    traj.conservation_residual.push_back(0.0);
  }
  if (opts.lyapunov) traj.lyapunov.push_back(pseudo_helmholtz(*opts.lyapunov, x));
}

}  // namespace

Trajectory integrate(const Network& net, const std::vector<double>& x0, double t_end,
                     const IntegrateOptions& opts) {
  if (x0.size() != net.num_species()) throw Error("integrate: initial state length mismatch");
  if (!(t_end > 0.0)) throw Error("integrate: t_end must be positive");

  Trajectory traj;
  std::vector<double> totals0;
  if (opts.conserved && !opts.conserved->empty()) totals0 = opts.conserved->transposed() * x0;

  auto field = [&](const std::vector<double>& x) { return net.field_at(x); };

  std::vector<double> x = x0;
  double t = 0.0;
  record_sample(traj, t, x, opts, totals0);

  if (!opts.adaptive) {
    const double h = opts.dt;
    const auto steps = static_cast<std::size_t>(std::ceil(t_end / h - 1e-12));
    for (std::size_t s = 0; s < steps; ++s) {
      const double hs = std::min(h, t_end - t);
      try {
        const std::vector<double> k1 = field(x);
        const std::vector<double> k2 = field(rk_stage(x, k1, hs / 2));
        const std::vector<double> k3 = field(rk_stage(x, k2, hs / 2));
        const std::vector<double> k4 = field(rk_stage(x, k3, hs));
        for (std::size_t i = 0; i < x.size(); ++i)
          x[i] += hs / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
      } catch (const Error&) {
        // a stage left the rate-law domain
        traj.truncated = true;
        break;
      }
      t += hs;
      if (!state_admissible(x, net.generalized())) {
        traj.truncated = true;
        break;
      }
      record_sample(traj, t, x, opts, totals0);
    }
    return traj;
  }

  // Embedded Fehlberg 4(5) pair (autonomous field, so the nodes drop out).
  static const double b21 = 1.0 / 4;
  static const double b31 = 3.0 / 32, b32 = 9.0 / 32;
  static const double b41 = 1932.0 / 2197, b42 = -7200.0 / 2197, b43 = 7296.0 / 2197;
  static const double b51 = 439.0 / 216, b52 = -8.0, b53 = 3680.0 / 513, b54 = -845.0 / 4104;
  static const double b61 = -8.0 / 27, b62 = 2.0, b63 = -3544.0 / 2565, b64 = 1859.0 / 4104,
                      b65 = -11.0 / 40;
  static const double c1 = 16.0 / 135, c3 = 6656.0 / 12825, c4 = 28561.0 / 56430, c5 = -9.0 / 50,
                      c6 = 2.0 / 55;
  static const double d1 = 25.0 / 216, d3 = 1408.0 / 2565, d4 = 2197.0 / 4104, d5 = -1.0 / 5;

  double h = std::min(opts.dt > 0 ? opts.dt : 1e-3, t_end);
  const std::size_t n = x.size();
  while (t < t_end) {
    h = std::min(h, t_end - t);
    double err = 0.0, scale = 0.0;
    std::vector<double> x5(n);
    try {
      const auto k1 = field(x);
      std::vector<double> tmp(n);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h * b21 * k1[i];
      const auto k2 = field(tmp);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h * (b31 * k1[i] + b32 * k2[i]);
      const auto k3 = field(tmp);
      for (std::size_t i = 0; i < n; ++i)
        tmp[i] = x[i] + h * (b41 * k1[i] + b42 * k2[i] + b43 * k3[i]);
      const auto k4 = field(tmp);
      for (std::size_t i = 0; i < n; ++i)
        tmp[i] = x[i] + h * (b51 * k1[i] + b52 * k2[i] + b53 * k3[i] + b54 * k4[i]);
      const auto k5 = field(tmp);
      for (std::size_t i = 0; i < n; ++i)
        tmp[i] = x[i] + h * (b61 * k1[i] + b62 * k2[i] + b63 * k3[i] + b64 * k4[i] + b65 * k5[i]);
      const auto k6 = field(tmp);
      for (std::size_t i = 0; i < n; ++i) {
        x5[i] = x[i] + h * (c1 * k1[i] + c3 * k3[i] + c4 * k4[i] + c5 * k5[i] + c6 * k6[i]);
        const double x4 = x[i] + h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i]);
        err = std::max(err, std::fabs(x5[i] - x4));
        scale = std::max(scale, std::fabs(x[i]));
      }
    } catch (const Error&) {
      if (h > 1e-12) {
        h *= 0.2;  // retry the step well inside the domain
        continue;
      }
      traj.truncated = true;
      break;
    }
    const double tol = opts.rel_tol * std::max(scale, 1.0);
    if (err <= tol || h <= 1e-12) {
      t += h;
      x = std::move(x5);
      if (!state_admissible(x, net.generalized())) {
        traj.truncated = true;
        break;
      }
      record_sample(traj, t, x, opts, totals0);
    }
    const double factor = err > 0 ? 0.9 * std::pow(tol / err, 0.2) : 5.0;
    h *= std::clamp(factor, 0.2, 5.0);
  }
  return traj;
}

std::string trajectory_csv(const Trajectory& traj, const std::vector<std::string>& species_names) {
  std::ostringstream os;
  os << "t";
  for (const auto& name : species_names) os << "," << name;
  os << ",G,cons_residual\n";
  for (std::size_t s = 0; s < traj.times.size(); ++s) {
    os << format_double(traj.times[s]);
    for (double xi : traj.states[s]) os << "," << format_double(xi);
    os << "," << (s < traj.lyapunov.size() ? format_double(traj.lyapunov[s]) : "nan");
    os << "," << format_double(traj.conservation_residual[s]) << "\n";
  }
  return os.str();
}

DescentReport lyapunov_descent_check(const Network& net, const LyapunovSpec& spec,
                                     const Trajectory& traj,
                                     const std::vector<double>& equilibrium) {
  DescentReport rep;
  if (traj.states.empty()) return rep;
  double prev = pseudo_helmholtz(spec, traj.states.front());
  double max_g = prev;
  for (std::size_t s = 0; s < traj.states.size(); ++s) {
    const auto& x = traj.states[s];
    const double g = pseudo_helmholtz(spec, x);
    max_g = std::max(max_g, g);
    if (s > 0) rep.max_upward_step = std::max(rep.max_upward_step, g - prev);
    prev = g;
    const std::vector<double> grad = pseudo_helmholtz_gradient(spec, x);
    const std::vector<double> f = net.field_at(x);
    double dg = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) dg += grad[i] * f[i];
    rep.max_analytic_derivative = std::max(rep.max_analytic_derivative, dg);
  }
  const auto& last = traj.states.back();
  for (std::size_t i = 0; i < last.size(); ++i)
    rep.terminal_distance = std::max(rep.terminal_distance, std::fabs(last[i] - equilibrium[i]));
  rep.monotone = rep.max_upward_step <= 1e-9 * (1.0 + max_g);
  rep.derivative_nonpositive = rep.max_analytic_derivative <= 1e-9;
  return rep;
}

ClassEquilibriumResult class_equilibrium(const Network& recon, const std::vector<double>& d1,
                                         const std::vector<double>& x_star,
                                         const std::vector<double>& x0) {
  const std::size_t n = recon.num_species();
  if (d1.size() != n || x_star.size() != n || x0.size() != n)
    throw Error("class_equilibrium: dimension mismatch");
  for (std::size_t i = 0; i < n; ++i)
    if (!(d1[i] > 0.0) || !(x_star[i] > 0.0) || !(x0[i] > 0.0))
      throw Error("class_equilibrium: weights and states must be positive");

  ClassEquilibriumResult out;
  const Matrix kernel = nullspace(recon.s().transposed(), 1e-9);
  const std::size_t dim = kernel.cols();
  out.mu.assign(n, 0.0);
  if (dim == 0) {
    out.x_dagger = x_star;  // absolute concentration robustness case
    return out;
  }

  // phi(u) = sum d_i (x*_i e^{u_i} - x0_i u_i), minimized over u = N w.
  std::vector<double> w(dim, 0.0);
  auto u_of = [&](const std::vector<double>& wv) {
    std::vector<double> u(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < dim; ++k) u[i] += kernel(i, k) * wv[k];
    return u;
  };
  auto phi = [&](const std::vector<double>& wv) {
    const std::vector<double> u = u_of(wv);
    double value = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      value += d1[i] * (x_star[i] * std::exp(u[i]) - x0[i] * u[i]);
    return value;
  };

  double fval = phi(w);
  for (std::size_t iter = 0; iter < 200; ++iter) {
    const std::vector<double> u = u_of(w);
    std::vector<double> inner(n);  // D1 (x* . exp(u) - x0)
    for (std::size_t i = 0; i < n; ++i) inner[i] = d1[i] * (x_star[i] * std::exp(u[i]) - x0[i]);
    std::vector<double> grad(dim, 0.0);
    for (std::size_t k = 0; k < dim; ++k)
      for (std::size_t i = 0; i < n; ++i) grad[k] += kernel(i, k) * inner[i];
    if (max_abs(grad) < 1e-12 * (1.0 + max_abs(inner))) break;

    Matrix hess(dim, dim);
    for (std::size_t k = 0; k < dim; ++k)
      for (std::size_t l = 0; l < dim; ++l) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
          s += kernel(i, k) * d1[i] * x_star[i] * std::exp(u[i]) * kernel(i, l);
        hess(k, l) = s;
      }
    Matrix chol;
    if (!cholesky(hess, chol)) {
      out.hessian_pd = false;
      throw Error("class_equilibrium: Hessian not positive definite");
    }
    std::vector<double> step = solve_spd(hess, grad);
    for (double& s : step) s = -s;
    double lambda = 1.0;
    for (int halving = 0; halving < 60; ++halving) {
      std::vector<double> trial(dim);
      for (std::size_t k = 0; k < dim; ++k) trial[k] = w[k] + lambda * step[k];
      const double tval = phi(trial);
      if (tval < fval) {
        w = std::move(trial);
        fval = tval;
        break;
      }
      lambda *= 0.5;
    }
    ++out.iterations;
  }

  out.mu = u_of(w);
  out.x_dagger.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.x_dagger[i] = x_star[i] * std::exp(out.mu[i]);

  std::vector<double> z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = d1[i] * (out.x_dagger[i] - x0[i]);
  const std::vector<double> proj = project_onto_columns(recon.s(), z);
  for (std::size_t i = 0; i < n; ++i)
    out.projection_residual = std::max(out.projection_residual, std::fabs(z[i] - proj[i]));
  return out;
}

bool basin_hint(const std::vector<double>& x_star, const std::vector<double>& x0) {
  const LyapunovSpec spec = LyapunovSpec::classic(x_star);
  double limit = 0.0;
  for (double xi : x_star) limit += xi;
  return pseudo_helmholtz(spec, x0) < limit;
}

}  // namespace crn
