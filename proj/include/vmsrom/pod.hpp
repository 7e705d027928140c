#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "vmsrom/snapshot.hpp"

namespace vmsrom {

struct PodBasis {
  Eigen::MatrixXd modes;        // N x R, orthonormal in the weighted inner product
  Eigen::VectorXd eigenvalues;  // length R, non-increasing
  InnerProduct weight;

  int n_dof() const { return static_cast<int>(modes.rows()); }
  int rank() const { return static_cast<int>(modes.cols()); }
};

struct CoeffHistory {
  std::vector<double> times;    // length M
  Eigen::MatrixXd coefficients; // M x R, row j = a^FOM(t_j)

  int n_snapshots() const { return static_cast<int>(coefficients.rows()); }
  int n_modes() const { return static_cast<int>(coefficients.cols()); }
};

// Method of snapshots: eigen-decomposition of the M x M Gram matrix
// C_jk = (u_j, u_k)_W / M. Modes with eigenvalue below 1e-13 * lambda_1
// are dropped, so the returned rank may be below r_max.
inline PodBasis compute_pod(const SnapshotSet& set, int r_max) {
  set.validate();
  const int m = set.n_snapshots();
  if (r_max < 1 || r_max > std::min<int>(set.n_dof(), m))
    throw std::invalid_argument("compute_pod: r_max out of range");

  Eigen::MatrixXd wu = set.weight.apply(set.data);          // N x M
  Eigen::MatrixXd gram = (set.data.transpose() * wu) / m;   // M x M
  gram = 0.5 * (gram + gram.transpose().eval());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("compute_pod: eigen-decomposition failed");

  const Eigen::VectorXd& lam_asc = eig.eigenvalues();
  const double lam_max = lam_asc[m - 1];
  if (!(lam_max > 0.0)) throw std::runtime_error("compute_pod: all-zero snapshot set");
  const double cutoff = 1e-13 * lam_max;

  PodBasis basis;
  basis.weight = set.weight;
  std::vector<int> keep;
  for (int i = m - 1; i >= 0 && static_cast<int>(keep.size()) < r_max; --i) {
    if (lam_asc[i] < cutoff) break;
    keep.push_back(i);
  }
  const int r = static_cast<int>(keep.size());
  basis.modes.resize(set.n_dof(), r);
  basis.eigenvalues.resize(r);
  for (int k = 0; k < r; ++k) {
    const double lam = lam_asc[keep[k]];
    Eigen::VectorXd phi = set.data * eig.eigenvectors().col(keep[k]) / std::sqrt(m * lam);
    // Deterministic sign: largest-magnitude entry positive.
    int imax;
    phi.cwiseAbs().maxCoeff(&imax);
    if (phi[imax] < 0.0) phi = -phi;
    basis.modes.col(k) = phi;
    basis.eigenvalues[k] = lam;
  }
  return basis;
}

inline Eigen::VectorXd project_coefficients(const PodBasis& basis,
                                            const Eigen::VectorXd& field) {
  if (field.size() != basis.n_dof())
    throw std::invalid_argument("project_coefficients: dimension mismatch");
  return basis.modes.transpose() * basis.weight.apply(field);
}

inline CoeffHistory project_history(const PodBasis& basis, const SnapshotSet& set) {
  if (set.n_dof() != basis.n_dof())
    throw std::invalid_argument("project_history: dimension mismatch");
  CoeffHistory hist;
  hist.times = set.times;
  hist.coefficients = (basis.modes.transpose() * basis.weight.apply(set.data)).transpose();
  return hist;
}

inline Eigen::VectorXd reconstruct(const PodBasis& basis, const Eigen::VectorXd& a, int r) {
  if (r < 1 || r > basis.rank()) throw std::invalid_argument("reconstruct: r out of range");
  if (a.size() < r) throw std::invalid_argument("reconstruct: coefficient vector too short");
  return basis.modes.leftCols(r) * a.head(r);
}

// Basis files reuse the snapshot container: modes as columns, eigenvalues in
// the times slot, version tag 2.
inline void save_basis(const PodBasis& basis, const std::string& path) {
  SnapshotSet carrier;
  carrier.data = basis.modes;
  carrier.times.assign(basis.eigenvalues.data(), basis.eigenvalues.data() + basis.rank());
  carrier.weight = basis.weight;
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("save_basis: cannot open " + path);
  detail::write_snapshot_payload(os, carrier, detail::kVersionBasis);
  if (!os) throw std::runtime_error("save_basis: write failure on " + path);
}

inline PodBasis load_basis(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("load_basis: cannot open " + path);
  SnapshotSet carrier = detail::read_snapshot_payload(is, detail::kVersionBasis);
  PodBasis basis;
  basis.modes = carrier.data;
  basis.eigenvalues =
      Eigen::Map<const Eigen::VectorXd>(carrier.times.data(), carrier.times.size());
  basis.weight = carrier.weight;
  return basis;
}

}  // namespace vmsrom
