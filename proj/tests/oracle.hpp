#pragma once

// Test-only reference routines, written against the definitions instead of
// the library's linear-algebra shortcuts so the two can disagree.

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "causamix/mixing.hpp"
#include "causamix/model.hpp"

namespace causamix::testing {

// Total causal effect of src on dst as the sum over every directed path of
// the product of edge weights; 1 on the diagonal. Exponential on purpose.
inline double path_sum(const WeightedDag& dag, int src, int dst) {
  if (src == dst) return 1.0;
  double total = 0.0;
  for (int mid : dag.children(src)) {
    total += dag.weight(src, mid) * path_sum(dag, mid, dst);
  }
  return total;
}

// Distance of `a` from the best rescaling of `b`.
inline double scaled_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  double bb = b.squaredNorm();
  if (bb == 0.0) return a.norm();
  double s = a.dot(b) / bb;
  return (a - s * b).norm();
}

// Worst per-column mismatch after pairing each column of `a` with a distinct
// column of `b` up to scale. Pairs are accepted in ascending distance order;
// on the exact-up-to-permutation inputs the tests feed in, true matches sit
// near zero and everything else is far, so the greedy pairing is the optimal
// one. Infinity on shape mismatch.
inline double column_match_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    return std::numeric_limits<double>::infinity();
  }
  const int n = static_cast<int>(a.cols());
  struct Pair {
    double dist;
    int i, j;
  };
  std::vector<Pair> pairs;
  pairs.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      pairs.push_back({scaled_distance(a.col(i), b.col(j)), i, j});
    }
  }
  std::sort(pairs.begin(), pairs.end(),
            [](const Pair& x, const Pair& y) { return x.dist < y.dist; });
  std::vector<bool> used_a(n, false), used_b(n, false);
  double worst = 0.0;
  int matched = 0;
  for (const Pair& p : pairs) {
    if (used_a[p.i] || used_b[p.j]) continue;
    used_a[p.i] = used_b[p.j] = true;
    worst = std::max(worst, p.dist);
    if (++matched == n) break;
  }
  return worst;
}

// Same pairing, exact values required (no rescaling): worst entry error over
// the best column permutation found greedily.
inline double column_perm_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    return std::numeric_limits<double>::infinity();
  }
  const int n = static_cast<int>(a.cols());
  std::vector<bool> used(n, false);
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    int arg = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
      if (used[j]) continue;
      double d = (a.col(i) - b.col(j)).lpNorm<Eigen::Infinity>();
      if (d < best) {
        best = d;
        arg = j;
      }
    }
    used[arg] = true;
    worst = std::max(worst, best);
  }
  return worst;
}

// Random DAG over ids {base, base+stride, ...}: a shuffled order, each
// forward pair wired with probability p_edge, weights uniform away from zero
// with random signs.
inline WeightedDag random_dag(int n, double p_edge, std::mt19937_64& rng,
                              int base = 0, int stride = 1) {
  WeightedDag dag;
  std::vector<int> ids(n);
  for (int i = 0; i < n; ++i) ids[i] = base + stride * i;
  for (int id : ids) {
    dag.add_node(id, "V" + std::to_string(id), NodeKind::ObservedUnderlying);
  }
  std::vector<int> order = ids;
  std::shuffle(order.begin(), order.end(), rng);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_real_distribution<double> mag(0.5, 1.5);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (coin(rng) >= p_edge) continue;
      double w = mag(rng) * (coin(rng) < 0.5 ? -1.0 : 1.0);
      dag.set_edge(order[i], order[j], w);
    }
  }
  return dag;
}

// Unordered-partition equality between two groupings' member sets.
inline bool same_partition(const std::vector<std::vector<int>>& a,
                           const std::vector<std::vector<int>>& b) {
  auto canon = [](std::vector<std::vector<int>> gs) {
    for (auto& g : gs) std::sort(g.begin(), g.end());
    std::sort(gs.begin(), gs.end());
    return gs;
  };
  return canon(a) == canon(b);
}

}  // namespace causamix::testing
