#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "vmsrom/mesh.hpp"

namespace vmsrom {

// Symmetric tridiagonal matrix stored as diagonal + one off-diagonal.
struct SymTridiag {
  Eigen::VectorXd diag;
  Eigen::VectorXd off;  // size diag.size() - 1

  int size() const { return static_cast<int>(diag.size()); }

  Eigen::VectorXd apply(const Eigen::VectorXd& v) const {
    const int n = size();
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
      double s = diag[i] * v[i];
      if (i > 0) s += off[i - 1] * v[i - 1];
      if (i + 1 < n) s += off[i] * v[i + 1];
      y[i] = s;
    }
    return y;
  }

  Eigen::MatrixXd apply(const Eigen::MatrixXd& V) const {
    Eigen::MatrixXd Y(V.rows(), V.cols());
    for (int c = 0; c < V.cols(); ++c) Y.col(c) = apply(Eigen::VectorXd(V.col(c)));
    return Y;
  }

  double quad(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const {
    return u.dot(apply(v));
  }
};

// Thomas algorithm for a (possibly shifted) tridiagonal system a*x = b
// with lower/diag/upper bands. Exact to round-off, O(n).
inline Eigen::VectorXd solve_tridiag(const Eigen::VectorXd& lower,
                                     const Eigen::VectorXd& diag,
                                     const Eigen::VectorXd& upper,
                                     const Eigen::VectorXd& rhs) {
  const int n = static_cast<int>(diag.size());
  Eigen::VectorXd c(n), d(n), x(n);
  c[0] = upper.size() ? upper[0] / diag[0] : 0.0;
  d[0] = rhs[0] / diag[0];
  for (int i = 1; i < n; ++i) {
    const double m = diag[i] - lower[i - 1] * c[i - 1];
    c[i] = (i + 1 < n) ? upper[i] / m : 0.0;
    d[i] = (rhs[i] - lower[i - 1] * d[i - 1]) / m;
  }
  x[n - 1] = d[n - 1];
  for (int i = n - 2; i >= 0; --i) x[i] = d[i] - c[i] * x[i + 1];
  return x;
}

inline Eigen::VectorXd solve_sym_tridiag(const SymTridiag& m, const Eigen::VectorXd& rhs) {
  return solve_tridiag(m.off, m.diag, m.off, rhs);
}

// Linear FE mass and stiffness matrices over the interior nodes.
struct FemSystem {
  Mesh1D mesh;
  SymTridiag mass;       // diag 2h/3, off h/6
  SymTridiag stiffness;  // diag 2/h, off -1/h

  double l2_norm(const Eigen::VectorXd& v) const { return std::sqrt(mass.quad(v, v)); }
};

inline FemSystem assemble_fem(const Mesh1D& mesh) {
  const int n = mesh.n_interior();
  const double h = mesh.h();
  FemSystem sys;
  sys.mesh = mesh;
  sys.mass.diag = Eigen::VectorXd::Constant(n, 2.0 * h / 3.0);
  sys.mass.off = Eigen::VectorXd::Constant(n > 0 ? n - 1 : 0, h / 6.0);
  sys.stiffness.diag = Eigen::VectorXd::Constant(n, 2.0 / h);
  sys.stiffness.off = Eigen::VectorXd::Constant(n > 0 ? n - 1 : 0, -1.0 / h);
  return sys;
}

}  // namespace vmsrom
