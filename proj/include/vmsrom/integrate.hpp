#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "vmsrom/closure.hpp"
#include "vmsrom/galerkin.hpp"

namespace vmsrom {

enum class Integrator : uint8_t { CrankNicolson = 0, Rk4 = 1 };

// Square Galerkin operators plus an optional learned correction. The 3S model
// enters through its stacked form, so 2S and 3S share one evaluation path.
struct RomModel {
  Eigen::MatrixXd linear;                  // r x r, A (+ A-tilde)
  std::vector<Eigen::MatrixXd> quadratic;  // r slices, B (+ B-tilde)

  int r() const { return static_cast<int>(linear.rows()); }

  static RomModel galerkin(const RomOperators& ops) {
    if (ops.rows() != ops.cols())
      throw std::invalid_argument("RomModel: operators must be square");
    return RomModel{ops.linear, ops.quadratic};
  }

  static RomModel closed(const RomOperators& ops, const ClosureOperators& closure) {
    RomModel m = galerkin(ops);
    if (closure.r() != m.r()) throw std::invalid_argument("RomModel: closure r mismatch");
    m.linear += closure.a_tilde;
    for (int i = 0; i < m.r(); ++i) m.quadratic[i] += closure.b_tilde[i];
    return m;
  }

  static RomModel closed(const RomOperators& ops, const ClosureOperators3S& closure) {
    return closed(ops, closure.stacked());
  }

  Eigen::VectorXd quad(const Eigen::VectorXd& a) const {
    Eigen::VectorXd out(r());
    for (int i = 0; i < r(); ++i) out[i] = a.dot(quadratic[i] * a);
    return out;
  }

  Eigen::VectorXd rhs(const Eigen::VectorXd& a) const { return linear * a + quad(a); }
};

struct RomTrajectory {
  std::vector<double> times;
  Eigen::MatrixXd coefficients;  // r x n_times recorded
  bool blew_up = false;

  int r() const { return static_cast<int>(coefficients.rows()); }
  int n_times() const { return static_cast<int>(coefficients.cols()); }
};

constexpr double kBlowupThreshold = 1e6;

// Crank-Nicolson with fixed-point iteration on the quadratic term (tolerance
// 1e-12, max 100 iterations). Divergence is recorded as data: the trajectory
// is truncated and flagged, never thrown.
inline RomTrajectory integrate_rom(const RomModel& model, const Eigen::VectorXd& a0,
                                   double dt, double t0, double t_end,
                                   Integrator scheme = Integrator::CrankNicolson) {
  if (a0.size() != model.r()) throw std::invalid_argument("integrate_rom: a0 size mismatch");
  if (!(dt > 0.0) || !(t_end > t0)) throw std::invalid_argument("integrate_rom: bad time window");

  const int r = model.r();
  const int n_steps = static_cast<int>(std::llround((t_end - t0) / dt));

  RomTrajectory traj;
  traj.times.reserve(n_steps + 1);
  traj.coefficients.resize(r, n_steps + 1);
  traj.times.push_back(t0);
  traj.coefficients.col(0) = a0;

  std::optional<Eigen::PartialPivLU<Eigen::MatrixXd>> lu;
  if (scheme == Integrator::CrankNicolson) {
    lu.emplace(Eigen::MatrixXd::Identity(r, r) - 0.5 * dt * model.linear);
  }

  Eigen::VectorXd a = a0;
  for (int s = 0; s < n_steps; ++s) {
    Eigen::VectorXd a_next;
    bool ok = true;
    if (scheme == Integrator::CrankNicolson) {
      const Eigen::VectorXd base = a + 0.5 * dt * (model.linear * a);
      a_next = a;
      ok = false;
      for (int it = 0; it < 100; ++it) {
        Eigen::VectorXd a_mid = 0.5 * (a + a_next);
        Eigen::VectorXd cand = lu->solve(base + dt * model.quad(a_mid));
        const double delta = (cand - a_next).lpNorm<Eigen::Infinity>();
        a_next = cand;
        if (!std::isfinite(delta) || a_next.lpNorm<Eigen::Infinity>() > kBlowupThreshold) break;
        if (delta <= 1e-12) {
          ok = true;
          break;
        }
      }
    } else {
      const Eigen::VectorXd k1 = model.rhs(a);
      const Eigen::VectorXd k2 = model.rhs(a + 0.5 * dt * k1);
      const Eigen::VectorXd k3 = model.rhs(a + 0.5 * dt * k2);
      const Eigen::VectorXd k4 = model.rhs(a + dt * k3);
      a_next = a + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    if (!ok || !a_next.allFinite() || a_next.lpNorm<Eigen::Infinity>() > kBlowupThreshold) {
      traj.blew_up = true;
      traj.coefficients.conservativeResize(r, s + 1);
      return traj;
    }
    a = a_next;
    traj.times.push_back(t0 + (s + 1) * dt);
    traj.coefficients.col(s + 1) = a;
  }
  return traj;
}

}  // namespace vmsrom
