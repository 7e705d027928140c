#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cstdint>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <vector>

#include "vmsrom/galerkin.hpp"
#include "vmsrom/pod.hpp"

namespace vmsrom {

enum class TargetMode : uint8_t { NonlinearOnly = 0, FullRhs = 1 };

// Exact closure target time series tau_i(t_j), evaluated from the FOM
// coefficient history through the extended (r x d) operators.
struct ClosureTargets {
  std::vector<double> times;
  Eigen::MatrixXd targets;  // M x r
  TargetMode mode = TargetMode::NonlinearOnly;
  int d = 0;

  int n_snapshots() const { return static_cast<int>(targets.rows()); }
  int r() const { return static_cast<int>(targets.cols()); }
};

inline ClosureTargets compute_closure_targets(const RomOperators& extended_ops,
                                              const RomOperators& square_ops,
                                              const CoeffHistory& coeffs,
                                              TargetMode mode) {
  const int r = square_ops.rows();
  const int d = extended_ops.cols();
  if (square_ops.cols() != r) throw std::invalid_argument("closure targets: square ops not square");
  if (extended_ops.rows() != r || d < r)
    throw std::invalid_argument("closure targets: extended ops must be r x d with d >= r");
  if (coeffs.n_modes() < d)
    throw std::invalid_argument("closure targets: coefficient history has fewer than d modes");
  if (coeffs.n_snapshots() < 2)
    throw std::invalid_argument("closure targets: need at least 2 snapshots");

  ClosureTargets out;
  out.times = coeffs.times;
  out.mode = mode;
  out.d = d;
  out.targets.resize(coeffs.n_snapshots(), r);
  for (int j = 0; j < coeffs.n_snapshots(); ++j) {
    Eigen::VectorXd a_d = coeffs.coefficients.row(j).head(d).transpose();
    Eigen::VectorXd a_r = a_d.head(r);
    for (int i = 0; i < r; ++i) {
      double tau = a_d.dot(extended_ops.quadratic[i] * a_d) -
                   a_r.dot(square_ops.quadratic[i] * a_r);
      if (mode == TargetMode::FullRhs)
        tau += extended_ops.linear.row(i).dot(a_d) - square_ops.linear.row(i).dot(a_r);
      out.targets(j, i) = tau;
    }
  }
  return out;
}

// Feature rows [a_1..a_r, a_m a_n row-major], one row per snapshot.
struct DataMatrix {
  Eigen::MatrixXd values;  // M x (r + r^2)
  int r = 0;
};

inline DataMatrix build_data_matrix(const CoeffHistory& coeffs, int r) {
  if (coeffs.n_modes() < r)
    throw std::invalid_argument("build_data_matrix: coefficient history has fewer than r modes");
  DataMatrix d;
  d.r = r;
  const int m = coeffs.n_snapshots();
  d.values.resize(m, r + r * r);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < r; ++i) d.values(j, i) = coeffs.coefficients(j, i);
    for (int p = 0; p < r; ++p)
      for (int q = 0; q < r; ++q)
        d.values(j, r + p * r + q) =
            coeffs.coefficients(j, p) * coeffs.coefficients(j, q);
  }
  return d;
}

struct TsvdReport {
  Eigen::VectorXd singular_values;
  int retained = 0;     // after tie expansion
  double tol = 0.0;     // sigma_m
  double residual = 0.0;
};

// Precomputed thin SVD; one factorization serves every truncation level and
// every target column.
struct TsvdFactors {
  Eigen::MatrixXd u;      // M x k
  Eigen::MatrixXd v;      // cols x k
  Eigen::VectorXd sigma;  // length k, non-increasing
  int numerical_rank = 0;

  static TsvdFactors factorize(const Eigen::MatrixXd& d) {
    TsvdFactors f;
    Eigen::BDCSVD<Eigen::MatrixXd> svd(d, Eigen::ComputeThinU | Eigen::ComputeThinV);
    f.u = svd.matrixU();
    f.v = svd.matrixV();
    f.sigma = svd.singularValues();
    const double eps = std::numeric_limits<double>::epsilon();
    double thresh = 0.0;
    if (f.sigma.size() > 0)
      thresh = eps * f.sigma[0] * static_cast<double>(std::max(d.rows(), d.cols()));
    f.numerical_rank = 0;
    for (int i = 0; i < f.sigma.size(); ++i)
      if (f.sigma[i] > thresh) ++f.numerical_rank;
    return f;
  }

  // Retained set {i : sigma_i >= sigma_m}; ties at the cutoff keep all equal
  // values.
  int retained_count(int m) const {
    const double tol = sigma[m - 1];
    int keep = m;
    while (keep < numerical_rank && sigma[keep] >= tol) ++keep;
    return keep;
  }

  // Minimum-norm solution of the rank-truncated problem, per column.
  // Columns are solved independently in a fixed summation order, so a column
  // block solve is bit-identical to solving the same columns individually.
  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs, int m, TsvdReport* report = nullptr) const {
    if (m < 1 || m > numerical_rank)
      throw std::invalid_argument("tsvd_solve: m outside [1, rank]");
    const int keep = retained_count(m);
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(v.rows(), rhs.cols());
    for (int c = 0; c < rhs.cols(); ++c) {
      for (int i = 0; i < keep; ++i) {
        const double coef = u.col(i).dot(rhs.col(c)) / sigma[i];
        x.col(c) += coef * v.col(i);
      }
    }
    if (report) {
      report->singular_values = sigma;
      report->retained = keep;
      report->tol = sigma[m - 1];
      Eigen::MatrixXd resid = rhs - u * (sigma.asDiagonal() * (v.transpose() * x));
      report->residual = resid.norm();
    }
    return x;
  }
};

inline std::pair<Eigen::MatrixXd, TsvdReport> tsvd_solve(const DataMatrix& d,
                                                         const Eigen::MatrixXd& rhs,
                                                         int m) {
  if (d.values.isZero(0.0)) throw std::invalid_argument("tsvd_solve: all-zero data matrix");
  if (rhs.rows() != d.values.rows())
    throw std::invalid_argument("tsvd_solve: rhs row count mismatch");
  TsvdFactors f = TsvdFactors::factorize(d.values);
  TsvdReport report;
  Eigen::MatrixXd x = f.solve(rhs, m, &report);
  return {x, report};
}

// Learned two-scale correction operators.
struct ClosureOperators {
  Eigen::MatrixXd a_tilde;                 // r x r
  std::vector<Eigen::MatrixXd> b_tilde;    // r slices, each r x r
  TsvdReport report;

  int r() const { return static_cast<int>(a_tilde.rows()); }
};

struct ClosureOperators3S {
  Eigen::MatrixXd a_tilde_large;               // r1 x r
  std::vector<Eigen::MatrixXd> b_tilde_large;  // r1 slices, r x r
  Eigen::MatrixXd a_tilde_small;               // (r - r1) x r
  std::vector<Eigen::MatrixXd> b_tilde_small;  // (r - r1) slices, r x r
  int r1 = 0;
  TsvdReport report_large;
  TsvdReport report_small;

  int r() const {
    return static_cast<int>(a_tilde_large.rows() + a_tilde_small.rows());
  }

  // Rows 1..r1 from the large-scale solve stacked over the small-scale rows.
  ClosureOperators stacked() const {
    ClosureOperators out;
    const int rr = r();
    out.a_tilde.resize(rr, rr);
    out.a_tilde.topRows(r1) = a_tilde_large;
    out.a_tilde.bottomRows(rr - r1) = a_tilde_small;
    out.b_tilde = b_tilde_large;
    out.b_tilde.insert(out.b_tilde.end(), b_tilde_small.begin(), b_tilde_small.end());
    return out;
  }
};

namespace detail {

// Unpack column i of the solution into row i of A-tilde and slice i of
// B-tilde; ordering matches build_data_matrix.
inline void unpack_column(const Eigen::VectorXd& x, int r, int i, Eigen::MatrixXd& a_tilde,
                          std::vector<Eigen::MatrixXd>& b_tilde) {
  a_tilde.row(i) = x.head(r).transpose();
  Eigen::MatrixXd slice(r, r);
  for (int p = 0; p < r; ++p)
    for (int q = 0; q < r; ++q) slice(p, q) = x[r + p * r + q];
  b_tilde[i] = slice;
}

}  // namespace detail

inline ClosureOperators train_2s(const ClosureTargets& targets, const TsvdFactors& factors,
                                 int m) {
  const int r = targets.r();
  TsvdReport report;
  Eigen::MatrixXd x = factors.solve(targets.targets, m, &report);
  ClosureOperators ops;
  ops.a_tilde.resize(r, r);
  ops.b_tilde.resize(r);
  for (int i = 0; i < r; ++i)
    detail::unpack_column(x.col(i), r, i, ops.a_tilde, ops.b_tilde);
  ops.report = report;
  return ops;
}

inline ClosureOperators train_2s(const ClosureTargets& targets, const DataMatrix& d, int m) {
  if (d.r != targets.r()) throw std::invalid_argument("train_2s: r mismatch");
  return train_2s(targets, TsvdFactors::factorize(d.values), m);
}

inline ClosureOperators3S train_3s(const ClosureTargets& targets, const TsvdFactors& factors,
                                   int r1, int m_large, int m_small) {
  const int r = targets.r();
  if (r1 < 1 || r1 >= r) throw std::invalid_argument("train_3s: need 1 <= r1 < r");
  ClosureOperators3S ops;
  ops.r1 = r1;
  Eigen::MatrixXd xl =
      factors.solve(targets.targets.leftCols(r1), m_large, &ops.report_large);
  Eigen::MatrixXd xs =
      factors.solve(targets.targets.rightCols(r - r1), m_small, &ops.report_small);
  ops.a_tilde_large.resize(r1, r);
  ops.b_tilde_large.resize(r1);
  ops.a_tilde_small.resize(r - r1, r);
  ops.b_tilde_small.resize(r - r1);
  for (int i = 0; i < r1; ++i)
    detail::unpack_column(xl.col(i), r, i, ops.a_tilde_large, ops.b_tilde_large);
  for (int i = 0; i < r - r1; ++i)
    detail::unpack_column(xs.col(i), r, i, ops.a_tilde_small, ops.b_tilde_small);
  return ops;
}

inline ClosureOperators3S train_3s(const ClosureTargets& targets, const DataMatrix& d, int r1,
                                   int m_large, int m_small) {
  if (d.r != targets.r()) throw std::invalid_argument("train_3s: r mismatch");
  return train_3s(targets, TsvdFactors::factorize(d.values), r1, m_large, m_small);
}

inline Eigen::VectorXd closure_rhs(const ClosureOperators& ops, const Eigen::VectorXd& a) {
  if (a.size() != ops.r()) throw std::invalid_argument("closure_rhs: dimension mismatch");
  Eigen::VectorXd out = ops.a_tilde * a;
  for (int i = 0; i < ops.r(); ++i) out[i] += a.dot(ops.b_tilde[i] * a);
  return out;
}

inline Eigen::VectorXd closure_rhs(const ClosureOperators3S& ops, const Eigen::VectorXd& a) {
  return closure_rhs(ops.stacked(), a);
}

}  // namespace vmsrom
