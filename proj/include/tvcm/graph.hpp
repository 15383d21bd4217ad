#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "tvcm/model.hpp"
#include "tvcm/penalty.hpp"

namespace tvcm {

struct TrajectoryMoments {
  double mean = 0.0;      // (1/T) sum_t b_t
  double variance = 0.0;  // (1/T) sum_t (b_t - mean)^2
};

template <typename Getter>
TrajectoryMoments time_moments(int T, Getter&& value_at) {
  TrajectoryMoments mo;
  if (T == 0) return mo;
  for (int t = 0; t < T; ++t) mo.mean += value_at(t);
  mo.mean /= T;
  for (int t = 0; t < T; ++t) {
    const double d = value_at(t) - mo.mean;
    mo.variance += d * d;
  }
  mo.variance /= T;
  return mo;
}

/// Thresholds estimated coefficient trajectories. Edge j -> i is absent iff
/// both |time mean| and time variance of b_hat_{ij,t} fall below the
/// threshold; the same rule applies per lag to c_hat^(s).
inline CausalGraph determine_graph(const LatentTrajectory& estimate, double threshold) {
  if (!(threshold > 0.0)) throw Error(ErrorKind::InvalidInput, "threshold must be positive");
  const int T = estimate.length();
  if (T == 0) throw Error(ErrorKind::InvalidInput, "empty trajectory");
  const int m = static_cast<int>(estimate.B[0].rows());
  const int s_lag = static_cast<int>(estimate.C.size());
  CausalGraph g = CausalGraph::empty(m, s_lag);

  auto decide = [&](auto&& value_at, int& edge, double& score) {
    const auto mo = time_moments(T, value_at);
    if (!std::isfinite(mo.mean) || !std::isfinite(mo.variance))
      throw Error(ErrorKind::InvalidInput, "nonfinite trajectory");
    score = std::max(std::abs(mo.mean), mo.variance);
    edge = (std::abs(mo.mean) < threshold && mo.variance < threshold) ? 0 : 1;
  };

  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      decide([&](int t) { return estimate.B[t](i, j); }, g.instantaneous(j, i), g.edge_scores(j, i));
    }
  for (int s = 0; s < s_lag; ++s)
    for (int i = 0; i < m; ++i)
      for (int k = 0; k < m; ++k)
        decide([&](int t) { return estimate.C[s][t](i, k); }, g.lagged[s](k, i), g.lagged_scores[s](k, i));
  return g;
}

/// reach(a, b) = 1 iff there is a directed path a -> ... -> b of length >= 1.
inline MatrixXi reachability(const MatrixXi& adj) {
  const int m = static_cast<int>(adj.rows());
  MatrixXi r = adj;
  for (int k = 0; k < m; ++k)
    for (int a = 0; a < m; ++a)
      if (r(a, k))
        for (int b = 0; b < m; ++b)
          if (r(k, b)) r(a, b) = 1;
  return r;
}

/// Removes the lowest-scoring edge that lies on a cycle until the
/// instantaneous graph is acyclic. Removed edges are appended to `removed`
/// as (from, to) pairs.
inline CausalGraph enforce_acyclicity(const CausalGraph& graph, std::vector<std::pair<int, int>>* removed = nullptr) {
  CausalGraph g = graph;
  const int m = g.size();
  while (!validate_acyclic(g.instantaneous)) {
    const MatrixXi reach = reachability(g.instantaneous);
    int best_a = -1, best_b = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        if (g.instantaneous(a, b) && reach(b, a) && g.edge_scores(a, b) < best) {
          best = g.edge_scores(a, b);
          best_a = a;
          best_b = b;
        }
    g.instantaneous(best_a, best_b) = 0;
    if (removed) removed->emplace_back(best_a, best_b);
  }
  return g;
}

struct MarkovBlanket {
  std::vector<int> parents;
  std::vector<int> children;
  std::vector<int> spouses;

  std::vector<int> members() const {
    std::vector<int> all = parents;
    all.insert(all.end(), children.begin(), children.end());
    all.insert(all.end(), spouses.begin(), spouses.end());
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    return all;
  }
};

/// Parents, children and spouses (other parents of children) of `target` in
/// the instantaneous graph.
inline MarkovBlanket markov_blanket(const CausalGraph& graph, int target) {
  const int m = graph.size();
  if (target < 0 || target >= m) throw Error(ErrorKind::InvalidInput, "target index out of range");
  MarkovBlanket mb;
  std::vector<char> spouse(m, 0);
  for (int k = 0; k < m; ++k) {
    if (graph.has_edge(k, target)) mb.parents.push_back(k);
    if (graph.has_edge(target, k)) {
      mb.children.push_back(k);
      for (int p = 0; p < m; ++p)
        if (p != target && graph.has_edge(p, k)) spouse[p] = 1;
    }
  }
  for (int p = 0; p < m; ++p)
    if (spouse[p]) mb.spouses.push_back(p);
  return mb;
}

}  // namespace tvcm
