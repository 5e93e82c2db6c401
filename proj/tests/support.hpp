#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ricci/generators.hpp"
#include "ricci/graph.hpp"

namespace ricci::testing {

inline Graph from_pairs(std::size_t n, const std::vector<std::pair<VertexId, VertexId>>& pairs,
                        const std::vector<double>& weights = {}) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < pairs.size(); ++i)
    edges.push_back({pairs[i].first, pairs[i].second, weights.empty() ? 1.0 : weights[i]});
  return Graph(n, std::move(edges));
}

inline Graph complete(std::size_t n) {
  std::vector<std::pair<VertexId, VertexId>> pairs;
  for (VertexId a = 0; a < n; ++a)
    for (VertexId b = a + 1; b < n; ++b) pairs.emplace_back(a, b);
  return from_pairs(n, pairs);
}

inline Graph path(std::size_t n) {
  std::vector<std::pair<VertexId, VertexId>> pairs;
  for (VertexId a = 0; a + 1 < n; ++a) pairs.emplace_back(a, a + 1);
  return from_pairs(n, pairs);
}

/// Centres 0 and 1 joined by the bridge edge 0; each centre has k leaves.
/// Leaves of 0 are 2..k+1, leaves of 1 are k+2..2k+1.
inline Graph two_star(std::size_t k, bool matched) {
  std::vector<std::pair<VertexId, VertexId>> pairs{{0, 1}};
  for (VertexId i = 0; i < k; ++i) pairs.emplace_back(0, 2 + i);
  for (VertexId i = 0; i < k; ++i) pairs.emplace_back(1, static_cast<VertexId>(2 + k + i));
  if (matched)
    for (VertexId i = 0; i < k; ++i) pairs.emplace_back(2 + i, static_cast<VertexId>(2 + k + i));
  return from_pairs(2 * k + 2, pairs);
}

/// Random connected graph: a random spanning tree plus extra edges with
/// probability p, weights uniform in [lo, hi].
inline Graph random_connected(std::size_t n, double p, std::uint64_t seed, double lo = 1.0,
                              double hi = 1.0) {
  Rng rng(seed, 99);
  std::vector<std::pair<VertexId, VertexId>> pairs;
  for (VertexId v = 1; v < n; ++v) pairs.emplace_back(static_cast<VertexId>(rng.below(v)), v);
  for (VertexId a = 0; a < n; ++a)
    for (VertexId b = a + 1; b < n; ++b)
      if (rng.uniform() < p &&
          std::find(pairs.begin(), pairs.end(), std::pair{a, b}) == pairs.end())
        pairs.emplace_back(a, b);
  std::vector<double> w(pairs.size());
  for (auto& x : w) x = lo + (hi - lo) * rng.uniform();
  return from_pairs(n, pairs, w);
}

/// All-pairs shortest paths by Floyd-Warshall.
inline Eigen::MatrixXd floyd_warshall(const Graph& g, const DistanceState& s) {
  const auto n = static_cast<Eigen::Index>(g.vertex_count());
  Eigen::MatrixXd d = Eigen::MatrixXd::Constant(n, n, std::numeric_limits<double>::infinity());
  for (Eigen::Index i = 0; i < n; ++i) d(i, i) = 0.0;
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const auto& ed = g.edge(e);
    d(ed.u, ed.v) = std::min(d(ed.u, ed.v), s[e]);
    d(ed.v, ed.u) = d(ed.u, ed.v);
  }
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) d(i, j) = std::min(d(i, j), d(i, k) + d(k, j));
  return d;
}

/// Edge distances equal to the shortest-path metric, so every edge is a
/// geodesic (the dual oracle's precondition).
inline DistanceState metric_state(const Graph& g, const DistanceState& raw) {
  const auto d = floyd_warshall(g, raw);
  Eigen::VectorXd v(static_cast<Eigen::Index>(g.edge_count()));
  for (EdgeId e = 0; e < g.edge_count(); ++e) v[e] = d(g.edge(e).u, g.edge(e).v);
  return DistanceState(std::move(v));
}

}  // namespace ricci::testing
