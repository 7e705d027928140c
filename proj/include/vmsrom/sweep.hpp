#pragma once

#include <Eigen/Dense>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>
#include <vector>

#include "vmsrom/closure.hpp"
#include "vmsrom/integrate.hpp"
#include "vmsrom/metrics.hpp"

namespace vmsrom {

// Shared read-only inputs for a tolerance sweep at a fixed r.
struct SweepContext {
  const RomOperators* square_ops = nullptr;
  const ClosureTargets* targets = nullptr;
  const TsvdFactors* factors = nullptr;
  const CoeffHistory* eval_coeffs = nullptr;  // FOM projection on the test window
  Eigen::VectorXd a0;
  double dt = 1e-3;
  double t0 = 0.0;
  double t_end = 1.0;
  Integrator scheme = Integrator::CrankNicolson;
  int jobs = 1;
};

struct SweepCandidate {
  int r1 = 0;       // 0 for two-scale sweeps
  int m_large = 0;  // == m for two-scale
  int m_small = 0;
  double tol_large = 0.0;
  double tol_small = 0.0;
  double error = std::numeric_limits<double>::infinity();
  bool diverged = false;
};

struct SweepResult {
  std::vector<SweepCandidate> table;
  int argmin = -1;
  int tie_count = 0;

  const SweepCandidate& best() const { return table.at(argmin); }
};

namespace detail {

template <typename Fn>
void parallel_for(int n, int jobs, Fn&& fn) {
  if (jobs <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  const int workers = std::min(jobs, n);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

// Deterministic argmin: candidates are pre-sorted in tie-break order, so the
// first minimum wins regardless of evaluation order.
inline void reduce_argmin(SweepResult& result) {
  double best = std::numeric_limits<double>::infinity();
  result.argmin = -1;
  result.tie_count = 0;
  for (int i = 0; i < static_cast<int>(result.table.size()); ++i) {
    const double e = result.table[i].error;
    if (e < best) {
      best = e;
      result.argmin = i;
      result.tie_count = 1;
    } else if (e == best && result.argmin >= 0) {
      ++result.tie_count;
    }
  }
  if (result.argmin < 0 && !result.table.empty()) result.argmin = 0;  // all diverged
}

inline double score(const SweepContext& ctx, const RomModel& model, bool* diverged) {
  RomTrajectory traj = integrate_rom(model, ctx.a0, ctx.dt, ctx.t0, ctx.t_end, ctx.scheme);
  *diverged = traj.blew_up;
  if (traj.blew_up) return std::numeric_limits<double>::infinity();
  return avg_l2_error(traj, *ctx.eval_coeffs, ctx.square_ops->rows()).average_error;
}

}  // namespace detail

inline SweepResult sweep_2s(const SweepContext& ctx, const std::vector<int>& m_grid) {
  if (m_grid.empty()) throw std::invalid_argument("sweep_2s: empty grid");
  SweepResult result;
  result.table.resize(m_grid.size());
  detail::parallel_for(static_cast<int>(m_grid.size()), ctx.jobs, [&](int i) {
    const int m = m_grid[i];
    SweepCandidate& cand = result.table[i];
    cand.m_large = cand.m_small = m;
    ClosureOperators closure = train_2s(*ctx.targets, *ctx.factors, m);
    cand.tol_large = cand.tol_small = closure.report.tol;
    cand.error = detail::score(ctx, RomModel::closed(*ctx.square_ops, closure), &cand.diverged);
  });
  detail::reduce_argmin(result);
  return result;
}

inline SweepResult sweep_3s(const SweepContext& ctx, const std::vector<int>& r1_grid,
                            const std::vector<int>& m_large_grid,
                            const std::vector<int>& m_small_grid) {
  if (r1_grid.empty() || m_large_grid.empty() || m_small_grid.empty())
    throw std::invalid_argument("sweep_3s: empty grid");
  SweepResult result;
  // Lexicographic (r1, m_L, m_S) order fixes the tie-break.
  for (int r1 : r1_grid)
    for (int ml : m_large_grid)
      for (int ms : m_small_grid) {
        SweepCandidate cand;
        cand.r1 = r1;
        cand.m_large = ml;
        cand.m_small = ms;
        result.table.push_back(cand);
      }
  detail::parallel_for(static_cast<int>(result.table.size()), ctx.jobs, [&](int i) {
    SweepCandidate& cand = result.table[i];
    ClosureOperators3S closure =
        train_3s(*ctx.targets, *ctx.factors, cand.r1, cand.m_large, cand.m_small);
    cand.tol_large = closure.report_large.tol;
    cand.tol_small = closure.report_small.tol;
    cand.error = detail::score(ctx, RomModel::closed(*ctx.square_ops, closure), &cand.diverged);
  });
  detail::reduce_argmin(result);
  return result;
}

}  // namespace vmsrom
