#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "crn/matrix.hpp"
#include "crn/model.hpp"

namespace crn {

/// Weighted pseudo-Helmholtz data: G(x) = sum over the index subset of
/// weights[k] * (x*_i - x_i - x_i ln(x*_i / x_i)).
struct LyapunovSpec {
  std::vector<std::size_t> indices;  // subset of species indices
  std::vector<double> weights;       // positive, one per index
  std::vector<double> x_star;        // full-length reference equilibrium

  /// Classic form: all weights 1 over every species.
  static LyapunovSpec classic(std::vector<double> x_star);
};

double pseudo_helmholtz(const LyapunovSpec& spec, std::span<const double> x);
std::vector<double> pseudo_helmholtz_gradient(const LyapunovSpec& spec, std::span<const double> x);

struct NewtonOptions {
  std::size_t max_iterations = 100;
  double tol = 1e-10;
};

/// Solves for the positive equilibrium in the stoichiometric compatibility
/// class of x0: a square system of s independent rows of S v(x) plus n-s
/// class constraints N^T (x - x0). Damped Newton with backtracking, steps
/// clipped to 90% of the distance to the positive-orthant boundary.
/// Throws on non-convergence, reporting the last iterate and residual.
std::vector<double> newton_equilibrium(const Network& net, std::vector<double> x0,
                                       const NewtonOptions& opts = {});

struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> states;
  std::vector<double> lyapunov;              // filled when a spec was supplied
  std::vector<double> conservation_residual; // max |C^T x(t) - C^T x(0)| per sample
  bool truncated = false;                    // state left x >= -1e-9
};

struct IntegrateOptions {
  double dt = 1e-3;
  bool adaptive = false;   // embedded 4(5) pair instead of fixed-step RK4
  double rel_tol = 1e-8;
  const Matrix* conserved = nullptr;       // optional C for residual tracking
  const LyapunovSpec* lyapunov = nullptr;  // optional G along the way
};

Trajectory integrate(const Network& net, const std::vector<double>& x0, double t_end,
                     const IntegrateOptions& opts = {});

std::string trajectory_csv(const Trajectory& traj, const std::vector<std::string>& species_names);

struct DescentReport {
  double max_upward_step = 0.0;        // largest increase of G between samples
  double max_analytic_derivative = 0.0;  // max of grad(G) . f over samples
  double terminal_distance = 0.0;      // |x(t_end) - equilibrium|_inf
  bool monotone = false;
  bool derivative_nonpositive = false;
};

/// Evaluates G along the trajectory and the analytic derivative
/// grad(G)^T S v(x) at every sample. Thresholds: upward steps up to
/// 1e-9 * (1 + max G) pass, analytic derivative up to 1e-9 passes.
DescentReport lyapunov_descent_check(const Network& net, const LyapunovSpec& spec,
                                     const Trajectory& traj,
                                     const std::vector<double>& equilibrium);

struct ClassEquilibriumResult {
  std::vector<double> x_dagger;
  std::vector<double> mu;  // Ln(x_dagger / x_star), lies in Ker(S^T)
  double projection_residual = 0.0;  // distance of D1 (x_dagger - x0) to Im(S)
  std::size_t iterations = 0;
  bool hessian_pd = true;  // Cholesky succeeded at every Newton iterate
};

/// In-class equilibrium of a complex balanced network: minimizes
/// phi(u) = sum d_i (x*_i e^{u_i} - x0_i u_i) over u in Ker(S^T) by Newton
/// with backtracking line search and returns x_dagger = x* . exp(u).
/// A trivial kernel returns x* directly.
ClassEquilibriumResult class_equilibrium(const Network& recon, const std::vector<double>& d1,
                                         const std::vector<double>& x_star,
                                         const std::vector<double>& x0);

/// G(x0) < sum x*_i with the classic pseudo-Helmholtz function: a
/// sufficient condition for the trajectory from x0 not to approach the
/// origin.
bool basin_hint(const std::vector<double>& x_star, const std::vector<double>& x0);

}  // namespace crn
