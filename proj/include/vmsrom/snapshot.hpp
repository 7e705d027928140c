#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "vmsrom/fem.hpp"

namespace vmsrom {

enum class WeightKind : uint8_t { Identity = 0, Diagonal = 1, Tridiagonal = 2 };

// Discrete inner-product weight: identity, diagonal, or symmetric tridiagonal.
struct InnerProduct {
  WeightKind kind = WeightKind::Identity;
  Eigen::VectorXd diag;  // Diagonal / Tridiagonal
  Eigen::VectorXd off;   // Tridiagonal only

  static InnerProduct identity() { return {}; }
  static InnerProduct diagonal(Eigen::VectorXd d) {
    return {WeightKind::Diagonal, std::move(d), {}};
  }
  static InnerProduct tridiagonal(Eigen::VectorXd d, Eigen::VectorXd o) {
    return {WeightKind::Tridiagonal, std::move(d), std::move(o)};
  }
  static InnerProduct from_mass(const SymTridiag& m) {
    return tridiagonal(m.diag, m.off);
  }

  Eigen::VectorXd apply(const Eigen::VectorXd& v) const {
    switch (kind) {
      case WeightKind::Identity:
        return v;
      case WeightKind::Diagonal:
        return diag.cwiseProduct(v);
      case WeightKind::Tridiagonal: {
        SymTridiag m{diag, off};
        return m.apply(v);
      }
    }
    throw std::logic_error("InnerProduct: bad kind");
  }

  Eigen::MatrixXd apply(const Eigen::MatrixXd& V) const {
    if (kind == WeightKind::Identity) return V;
    Eigen::MatrixXd Y(V.rows(), V.cols());
    for (int c = 0; c < V.cols(); ++c) Y.col(c) = apply(Eigen::VectorXd(V.col(c)));
    return Y;
  }

  double dot(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const {
    return u.dot(apply(v));
  }
  double norm(const Eigen::VectorXd& v) const { return std::sqrt(dot(v, v)); }
};

struct SnapshotSet {
  std::vector<double> times;  // length M, increasing
  Eigen::MatrixXd data;       // N x M, one column per snapshot
  InnerProduct weight;
  std::string provenance;

  int n_dof() const { return static_cast<int>(data.rows()); }
  int n_snapshots() const { return static_cast<int>(data.cols()); }

  void validate() const {
    if (n_snapshots() < 2) throw std::invalid_argument("SnapshotSet: need M >= 2 snapshots");
    if (static_cast<int>(times.size()) != n_snapshots())
      throw std::invalid_argument("SnapshotSet: times/data size mismatch");
    for (size_t j = 1; j < times.size(); ++j)
      if (!(times[j] > times[j - 1]))
        throw std::invalid_argument("SnapshotSet: times must be strictly increasing");
    if (weight.kind != WeightKind::Identity &&
        weight.diag.size() != data.rows())
      throw std::invalid_argument("SnapshotSet: weight dimension mismatch");
  }
};

namespace detail {

constexpr char kSnapMagic[8] = {'R', 'O', 'M', 'S', 'N', 'A', 'P', '1'};
constexpr uint32_t kVersionSnapshots = 1;
constexpr uint32_t kVersionBasis = 2;

template <typename T>
void write_pod(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is) {
  T v;
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("snapshot file: truncated payload");
  return v;
}

inline void write_doubles(std::ostream& os, const double* p, size_t n) {
  os.write(reinterpret_cast<const char*>(p), n * sizeof(double));
}

inline void read_doubles(std::istream& is, double* p, size_t n) {
  is.read(reinterpret_cast<char*>(p), n * sizeof(double));
  if (!is) throw std::runtime_error("snapshot file: truncated payload");
}

inline void write_snapshot_payload(std::ostream& os, const SnapshotSet& set,
                                   uint32_t version) {
  if (!set.data.allFinite())
    throw std::invalid_argument("save_snapshots: non-finite data rejected");
  os.write(kSnapMagic, 8);
  write_pod(os, version);
  write_pod(os, static_cast<uint64_t>(set.data.rows()));
  write_pod(os, static_cast<uint64_t>(set.data.cols()));
  write_pod(os, static_cast<uint8_t>(set.weight.kind));
  if (set.weight.kind != WeightKind::Identity)
    write_doubles(os, set.weight.diag.data(), set.weight.diag.size());
  if (set.weight.kind == WeightKind::Tridiagonal)
    write_doubles(os, set.weight.off.data(), set.weight.off.size());
  write_doubles(os, set.times.data(), set.times.size());
  write_doubles(os, set.data.data(), static_cast<size_t>(set.data.size()));
}

inline SnapshotSet read_snapshot_payload(std::istream& is, uint32_t expect_version) {
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kSnapMagic, 8) != 0)
    throw std::runtime_error("snapshot file: bad magic");
  const auto version = read_pod<uint32_t>(is);
  if (version != expect_version)
    throw std::runtime_error("snapshot file: unsupported version " + std::to_string(version));
  const auto n = read_pod<uint64_t>(is);
  const auto m = read_pod<uint64_t>(is);
  const auto kind = static_cast<WeightKind>(read_pod<uint8_t>(is));
  SnapshotSet set;
  set.weight.kind = kind;
  if (kind != WeightKind::Identity) {
    set.weight.diag.resize(n);
    read_doubles(is, set.weight.diag.data(), n);
  }
  if (kind == WeightKind::Tridiagonal) {
    set.weight.off.resize(n > 0 ? n - 1 : 0);
    read_doubles(is, set.weight.off.data(), n > 0 ? n - 1 : 0);
  }
  set.times.resize(m);
  read_doubles(is, set.times.data(), m);
  set.data.resize(n, m);
  read_doubles(is, set.data.data(), n * m);
  return set;
}

}  // namespace detail

inline void save_snapshots(const SnapshotSet& set, const std::string& path) {
  set.validate();
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("save_snapshots: cannot open " + path);
  detail::write_snapshot_payload(os, set, detail::kVersionSnapshots);
  if (!os) throw std::runtime_error("save_snapshots: write failure on " + path);
}

inline SnapshotSet load_snapshots(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("load_snapshots: cannot open " + path);
  SnapshotSet set = detail::read_snapshot_payload(is, detail::kVersionSnapshots);
  set.validate();
  return set;
}

inline SnapshotSet window(const SnapshotSet& set, double t0, double t1) {
  if (!(t0 < t1)) throw std::invalid_argument("window: need t0 < t1");
  int lo = 0, hi = set.n_snapshots();
  while (lo < hi && set.times[lo] < t0 - 1e-12) ++lo;
  int end = lo;
  while (end < hi && set.times[end] <= t1 + 1e-12) ++end;
  if (end - lo < 2) throw std::invalid_argument("window: fewer than 2 snapshots in range");
  SnapshotSet out;
  out.times.assign(set.times.begin() + lo, set.times.begin() + end);
  out.data = set.data.middleCols(lo, end - lo);
  out.weight = set.weight;
  out.provenance = set.provenance;
  return out;
}

}  // namespace vmsrom
