#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "vmsrom/fem.hpp"
#include "vmsrom/pod.hpp"

namespace vmsrom {

// Galerkin operators for quadratic dynamics a' = A a + a^T B a.
// Possibly rectangular: rows output modes, cols input modes, for
// closure-target evaluation with cols > rows.
struct RomOperators {
  Eigen::MatrixXd linear;                 // rows x cols
  std::vector<Eigen::MatrixXd> quadratic; // rows slices, each cols x cols
  double nu = 0.0;

  int rows() const { return static_cast<int>(linear.rows()); }
  int cols() const { return static_cast<int>(linear.cols()); }
};

inline RomOperators assemble_rom_operators(const PodBasis& basis, const FemSystem& sys,
                                           double nu, int rows, int cols) {
  if (rows < 1 || rows > cols || cols > basis.rank())
    throw std::invalid_argument("assemble_rom_operators: need 1 <= rows <= cols <= R");
  const Mesh1D& mesh = sys.mesh;
  const int n = mesh.n_interior();
  if (basis.n_dof() != n)
    throw std::invalid_argument("assemble_rom_operators: basis/mesh mismatch");

  RomOperators ops;
  ops.nu = nu;
  ops.linear = -nu * basis.modes.leftCols(rows).transpose() *
               sys.stiffness.apply(basis.modes.leftCols(cols));

  ops.quadratic.assign(rows, Eigen::MatrixXd::Zero(cols, cols));

  // B_imn = -int phi_m phi_n' phi_i, 2-point Gauss per element (exact: the
  // integrand is degree 2 in each element).
  const double h = mesh.h();
  constexpr double g = 0.2886751345948128822545744;
  const double xi[2] = {0.5 - g, 0.5 + g};
  Eigen::VectorXd vals(cols), ders(cols);
  for (int e = 0; e < mesh.n_cells; ++e) {
    for (int k = 0; k < cols; ++k) {
      const double pL = (e == 0) ? 0.0 : basis.modes(e - 1, k);
      const double pR = (e == mesh.n_cells - 1) ? 0.0 : basis.modes(e, k);
      ders[k] = (pR - pL) / h;
    }
    for (double x : xi) {
      for (int k = 0; k < cols; ++k) {
        const double pL = (e == 0) ? 0.0 : basis.modes(e - 1, k);
        const double pR = (e == mesh.n_cells - 1) ? 0.0 : basis.modes(e, k);
        vals[k] = pL * (1.0 - x) + pR * x;
      }
      const double w = 0.5 * h;
      for (int i = 0; i < rows; ++i) {
        const double wi = -w * vals[i];
        Eigen::MatrixXd& slice = ops.quadratic[i];
        for (int m = 0; m < cols; ++m) {
          const double vm = wi * vals[m];
          for (int nn = 0; nn < cols; ++nn) slice(m, nn) += vm * ders[nn];
        }
      }
    }
  }
  return ops;
}

inline Eigen::VectorXd grom_rhs(const RomOperators& ops, const Eigen::VectorXd& a) {
  if (a.size() != ops.cols()) throw std::invalid_argument("grom_rhs: dimension mismatch");
  Eigen::VectorXd out = ops.linear * a;
  for (int i = 0; i < ops.rows(); ++i) out[i] += a.dot(ops.quadratic[i] * a);
  return out;
}

// Flat binary cache format: magic, rows, cols, nu, A row-major, B slices row-major.
inline void save_operators(const RomOperators& ops, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("save_operators: cannot open " + path);
  os.write("ROMOPS1\0", 8);
  detail::write_pod(os, static_cast<uint64_t>(ops.rows()));
  detail::write_pod(os, static_cast<uint64_t>(ops.cols()));
  detail::write_pod(os, ops.nu);
  for (int i = 0; i < ops.rows(); ++i)
    for (int m = 0; m < ops.cols(); ++m) detail::write_pod(os, ops.linear(i, m));
  for (const auto& slice : ops.quadratic)
    for (int m = 0; m < ops.cols(); ++m)
      for (int n = 0; n < ops.cols(); ++n) detail::write_pod(os, slice(m, n));
}

inline RomOperators load_operators(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("load_operators: cannot open " + path);
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, "ROMOPS1\0", 8) != 0)
    throw std::runtime_error("load_operators: bad magic");
  const auto rows = detail::read_pod<uint64_t>(is);
  const auto cols = detail::read_pod<uint64_t>(is);
  RomOperators ops;
  ops.nu = detail::read_pod<double>(is);
  ops.linear.resize(rows, cols);
  for (uint64_t i = 0; i < rows; ++i)
    for (uint64_t m = 0; m < cols; ++m) ops.linear(i, m) = detail::read_pod<double>(is);
  ops.quadratic.assign(rows, Eigen::MatrixXd::Zero(cols, cols));
  for (uint64_t i = 0; i < rows; ++i)
    for (uint64_t m = 0; m < cols; ++m)
      for (uint64_t n = 0; n < cols; ++n) ops.quadratic[i](m, n) = detail::read_pod<double>(is);
  return ops;
}

}  // namespace vmsrom
