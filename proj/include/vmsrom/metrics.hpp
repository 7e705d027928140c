#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "vmsrom/integrate.hpp"
#include "vmsrom/mesh.hpp"
#include "vmsrom/pod.hpp"

namespace vmsrom {

struct ErrorReport {
  double average_error = 0.0;          // mean over snapshots of the L2 norm
  std::vector<double> times;
  std::vector<double> per_time_error;
};

namespace detail {

// Indices (rom_idx, fom_idx) of matching times within 1e-9; every FOM
// snapshot inside the ROM window must match.
inline std::vector<std::pair<int, int>> align_times(const RomTrajectory& rom,
                                                    const std::vector<double>& fom_times) {
  std::vector<std::pair<int, int>> pairs;
  int ri = 0;
  const int nr = rom.n_times();
  if (nr == 0) return pairs;
  for (int j = 0; j < static_cast<int>(fom_times.size()); ++j) {
    const double t = fom_times[j];
    if (t < rom.times.front() - 1e-9 || t > rom.times.back() + 1e-9) continue;
    while (ri < nr && rom.times[ri] < t - 1e-9) ++ri;
    if (ri >= nr || std::abs(rom.times[ri] - t) > 1e-9)
      throw std::invalid_argument("metrics: ROM/FOM time misalignment");
    pairs.emplace_back(ri, j);
  }
  return pairs;
}

}  // namespace detail

// Average L2 error vs the FOM projection onto the first r modes. By basis
// orthonormality the field norm equals the Euclidean norm of the coefficient
// difference. A blown-up trajectory scores +inf.
inline ErrorReport avg_l2_error(const RomTrajectory& rom, const CoeffHistory& fom_coeffs,
                                int r) {
  if (rom.r() != r) throw std::invalid_argument("avg_l2_error: r mismatch");
  if (fom_coeffs.n_modes() < r)
    throw std::invalid_argument("avg_l2_error: coefficient history has fewer than r modes");
  ErrorReport report;
  if (rom.blew_up) {
    report.average_error = std::numeric_limits<double>::infinity();
    return report;
  }
  const auto pairs = detail::align_times(rom, fom_coeffs.times);
  if (pairs.empty()) throw std::invalid_argument("avg_l2_error: no aligned snapshots");
  double sum = 0.0;
  for (const auto& [ri, fj] : pairs) {
    const double e =
        (rom.coefficients.col(ri) - fom_coeffs.coefficients.row(fj).head(r).transpose())
            .norm();
    report.times.push_back(rom.times[ri]);
    report.per_time_error.push_back(e);
    sum += e;
  }
  report.average_error = sum / pairs.size();
  return report;
}

// KE(t) = ||a(t)||^2 / 2 under an orthonormal basis.
inline std::vector<double> kinetic_energy_series(const RomTrajectory& traj) {
  std::vector<double> ke(traj.n_times());
  for (int j = 0; j < traj.n_times(); ++j)
    ke[j] = 0.5 * traj.coefficients.col(j).squaredNorm();
  return ke;
}

// Squared L2 norm of the difference of time-averaged fields, in coefficient
// space. With full_reference the FOM mean is taken over all available modes,
// adding the tail energy beyond r.
inline double time_avg_field_error(const RomTrajectory& rom, const CoeffHistory& fom_coeffs,
                                   int r, bool full_reference = false) {
  if (rom.r() != r) throw std::invalid_argument("time_avg_field_error: r mismatch");
  const auto pairs = detail::align_times(rom, fom_coeffs.times);
  if (pairs.empty()) throw std::invalid_argument("time_avg_field_error: no aligned snapshots");
  Eigen::VectorXd rom_mean = Eigen::VectorXd::Zero(r);
  Eigen::VectorXd fom_mean = Eigen::VectorXd::Zero(fom_coeffs.n_modes());
  for (const auto& [ri, fj] : pairs) {
    rom_mean += rom.coefficients.col(ri);
    fom_mean += fom_coeffs.coefficients.row(fj).transpose();
  }
  rom_mean /= pairs.size();
  fom_mean /= pairs.size();
  double err = (fom_mean.head(r) - rom_mean).squaredNorm();
  if (full_reference) err += fom_mean.tail(fom_coeffs.n_modes() - r).squaredNorm();
  return err;
}

// Pointwise probe u(x0, t) by linear interpolation of the modes.
inline std::vector<double> probe_series(const RomTrajectory& traj, const PodBasis& basis,
                                        const Mesh1D& mesh, double x0) {
  if (x0 < mesh.x_lo || x0 > mesh.x_hi)
    throw std::invalid_argument("probe_series: x0 outside domain");
  const int r = traj.r();
  const double h = mesh.h();
  // Element index and local coordinate; boundary nodes carry value zero.
  int e = std::min(static_cast<int>((x0 - mesh.x_lo) / h), mesh.n_cells - 1);
  const double xi = (x0 - (mesh.x_lo + e * h)) / h;
  Eigen::VectorXd phi_at_x0(r);
  for (int k = 0; k < r; ++k) {
    const double pL = (e == 0) ? 0.0 : basis.modes(e - 1, k);
    const double pR = (e == mesh.n_cells - 1) ? 0.0 : basis.modes(e, k);
    phi_at_x0[k] = pL * (1.0 - xi) + pR * xi;
  }
  std::vector<double> series(traj.n_times());
  for (int j = 0; j < traj.n_times(); ++j)
    series[j] = phi_at_x0.dot(traj.coefficients.col(j).head(r));
  return series;
}

// Direct DFT magnitude-squared per non-negative frequency bin.
inline std::vector<std::pair<double, double>> power_spectrum(
    const std::vector<double>& times, const std::vector<double>& series) {
  const int n = static_cast<int>(series.size());
  if (n < 4) throw std::invalid_argument("power_spectrum: need at least 4 samples");
  if (times.size() != series.size())
    throw std::invalid_argument("power_spectrum: times/series size mismatch");
  const double dt = times[1] - times[0];
  for (int j = 1; j < n; ++j)
    if (std::abs((times[j] - times[j - 1]) - dt) > 1e-9 * std::max(1.0, std::abs(dt)))
      throw std::invalid_argument("power_spectrum: non-uniform sampling");
  std::vector<std::pair<double, double>> spec;
  const double two_pi = 2.0 * M_PI;
  for (int k = 0; k <= n / 2; ++k) {
    double re = 0.0, im = 0.0;
    for (int j = 0; j < n; ++j) {
      const double ang = two_pi * k * j / n;
      re += series[j] * std::cos(ang);
      im -= series[j] * std::sin(ang);
    }
    spec.emplace_back(k / (n * dt), re * re + im * im);
  }
  return spec;
}

}  // namespace vmsrom
