#pragma once

#include <stdexcept>
#include <vector>

namespace vmsrom {

// Uniform 1D grid on [x_lo, x_hi] with homogeneous Dirichlet ends.
// Interior nodes carry the degrees of freedom.
struct Mesh1D {
  int n_cells = 0;
  double x_lo = 0.0;
  double x_hi = 1.0;

  double h() const { return (x_hi - x_lo) / n_cells; }
  int n_interior() const { return n_cells - 1; }

  double node(int i) const { return x_lo + (i + 1) * h(); }  // interior node i

  std::vector<double> interior_nodes() const {
    std::vector<double> x(n_interior());
    for (int i = 0; i < n_interior(); ++i) x[i] = node(i);
    return x;
  }
};

inline Mesh1D build_mesh(int n_cells, double x_lo, double x_hi) {
  if (n_cells < 2) throw std::invalid_argument("build_mesh: n_cells must be >= 2");
  if (!(x_hi > x_lo)) throw std::invalid_argument("build_mesh: degenerate interval");
  return Mesh1D{n_cells, x_lo, x_hi};
}

}  // namespace vmsrom
