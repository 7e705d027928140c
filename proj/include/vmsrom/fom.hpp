#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vmsrom/fem.hpp"
#include "vmsrom/mesh.hpp"

namespace vmsrom {

// f(x, t) -> forcing value; empty means no forcing.
using ForcingFn = std::function<double(double, double)>;

struct FomConfig {
  double nu = 1e-3;
  double dt = 1e-3;
  double t_end = 1.0;
  // Nodal initial values on the interior nodes; empty selects the step profile
  // (1 for x <= midpoint, 0 beyond).
  Eigen::VectorXd initial_condition;
  ForcingFn forcing;

  int fp_max_iters = 100;
  double fp_tol = 1e-12;

  void validate() const {
    if (!(nu > 0.0)) throw std::invalid_argument("FomConfig: nu must be > 0");
    if (!(dt > 0.0)) throw std::invalid_argument("FomConfig: dt must be > 0");
    if (!(t_end > 0.0)) throw std::invalid_argument("FomConfig: t_end must be > 0");
  }
};

struct FomTrajectory {
  std::vector<double> times;
  Eigen::MatrixXd states;  // n_interior x n_times, one column per time
};

struct FomError : std::runtime_error {
  double residual;
  explicit FomError(const std::string& what, double res)
      : std::runtime_error(what), residual(res) {}
};

inline Eigen::VectorXd step_initial_condition(const Mesh1D& mesh) {
  const double mid = 0.5 * (mesh.x_lo + mesh.x_hi);
  const int n = mesh.n_interior();
  Eigen::VectorXd u0(n);
  for (int i = 0; i < n; ++i) u0[i] = (mesh.node(i) <= mid + 1e-14) ? 1.0 : 0.0;
  return u0;
}

namespace detail {

// Weak convective term N_i(u) = \int u u_x phi_i, 2-point Gauss per element
// (exact for the degree-2 integrand of linear FE).
inline Eigen::VectorXd burgers_nonlinear(const Mesh1D& mesh, const Eigen::VectorXd& u) {
  const int n = mesh.n_interior();
  const double h = mesh.h();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  constexpr double g = 0.2886751345948128822545744;  // 1/(2 sqrt(3))
  const double xi[2] = {0.5 - g, 0.5 + g};
  for (int e = 0; e < mesh.n_cells; ++e) {
    const double uL = (e == 0) ? 0.0 : u[e - 1];
    const double uR = (e == mesh.n_cells - 1) ? 0.0 : u[e];
    const double du = (uR - uL) / h;
    for (double x : xi) {
      const double val = uL * (1.0 - x) + uR * x;
      const double w = 0.5 * h * val * du;
      if (e > 0) out[e - 1] += w * (1.0 - x);
      if (e < mesh.n_cells - 1) out[e] += w * x;
    }
  }
  return out;
}

// (f(., t), phi_i) by 2-point Gauss per element.
inline Eigen::VectorXd forcing_load(const Mesh1D& mesh, const ForcingFn& f, double t) {
  const int n = mesh.n_interior();
  const double h = mesh.h();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  constexpr double g = 0.2886751345948128822545744;
  const double xi[2] = {0.5 - g, 0.5 + g};
  for (int e = 0; e < mesh.n_cells; ++e) {
    const double xe = mesh.x_lo + e * h;
    for (double x : xi) {
      const double w = 0.5 * h * f(xe + x * h, t);
      if (e > 0) out[e - 1] += w * (1.0 - x);
      if (e < mesh.n_cells - 1) out[e] += w * x;
    }
  }
  return out;
}

}  // namespace detail

// Crank-Nicolson in time, damped fixed-point iteration on the quadratic term.
inline FomTrajectory run_fom(const FomConfig& config, const FemSystem& sys) {
  config.validate();
  const Mesh1D& mesh = sys.mesh;
  const int n = mesh.n_interior();

  Eigen::VectorXd u = config.initial_condition.size()
                          ? config.initial_condition
                          : step_initial_condition(mesh);
  if (u.size() != n) throw std::invalid_argument("run_fom: initial condition size mismatch");

  const double dt = config.dt;
  const int n_steps = static_cast<int>(std::llround(config.t_end / dt));

  // System matrix M/dt + nu K/2 (tridiagonal).
  Eigen::VectorXd sys_diag = sys.mass.diag / dt + 0.5 * config.nu * sys.stiffness.diag;
  Eigen::VectorXd sys_off = sys.mass.off / dt + 0.5 * config.nu * sys.stiffness.off;

  FomTrajectory traj;
  traj.times.reserve(n_steps + 1);
  traj.states.resize(n, n_steps + 1);
  traj.times.push_back(0.0);
  traj.states.col(0) = u;

  for (int s = 0; s < n_steps; ++s) {
    const double t_mid = (s + 0.5) * dt;
    Eigen::VectorXd fixed = sys.mass.apply(u) / dt - 0.5 * config.nu * sys.stiffness.apply(u);
    if (config.forcing) fixed += detail::forcing_load(mesh, config.forcing, t_mid);

    Eigen::VectorXd u_new = u;
    double prev_delta = std::numeric_limits<double>::infinity();
    double omega = 1.0;
    bool converged = false;
    for (int it = 0; it < config.fp_max_iters; ++it) {
      Eigen::VectorXd u_mid = 0.5 * (u + u_new);
      Eigen::VectorXd rhs = fixed - detail::burgers_nonlinear(mesh, u_mid);
      Eigen::VectorXd cand = solve_tridiag(sys_off, sys_diag, sys_off, rhs);
      Eigen::VectorXd next = (1.0 - omega) * u_new + omega * cand;
      const double delta = sys.l2_norm(next - u_new);
      if (!std::isfinite(delta))
        throw FomError("run_fom: NaN at t=" + std::to_string((s + 1) * dt), delta);
      u_new = next;
      if (delta <= config.fp_tol) {
        converged = true;
        break;
      }
      if (delta > prev_delta) omega *= 0.5;
      prev_delta = delta;
    }
    if (!converged)
      throw FomError("run_fom: fixed-point iteration did not converge at t=" +
                         std::to_string((s + 1) * dt),
                     prev_delta);
    u = u_new;
    traj.times.push_back((s + 1) * dt);
    traj.states.col(s + 1) = u;
  }
  return traj;
}

}  // namespace vmsrom
