#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ricci/graph.hpp"
#include "ricci/shortest_paths.hpp"

namespace ricci {

/// Which per-edge values weight the neighbourhood measures.
enum class WeightMode {
  fixed_w,     // the graph's original weights
  evolving_d,  // the current distances
};

std::string_view to_string(WeightMode mode);
WeightMode parse_weight_mode(std::string_view text);

/// How distance matrices are produced for the all-edges pass.
enum class PathMethod {
  sssd_per_edge,        // per-edge tasks, one early-exit Dijkstra per cell
  ssmd_per_edge,        // per-edge tasks, one multi-destination run per source
  ssmd_vertex_arranged  // vertex-arranged tasks with multi-destination runs
};

struct CurvatureConfig {
  double alpha0 = 0.99;
  /// Second idleness used to confirm alpha0 sits on the last linear
  /// segment of kappa(alpha); disabled when empty.
  std::optional<double> slope_check_alpha = 0.97;
  WeightMode weight_mode = WeightMode::fixed_w;
  PathMethod path_method = PathMethod::ssmd_vertex_arranged;
  unsigned worker_count = 1;

  /// Throws InvalidParams when alpha0 is outside [0.5, 1) or the slope check
  /// is not below alpha0.
  void validate() const;
};

/// Probability measure over a set of distinct vertices.
struct MassDistribution {
  std::vector<VertexId> support;
  Eigen::VectorXd mass;
};

/// Measures of the edge (x, y): alpha at the endpoint, the rest spread over
/// its neighbours in proportion to the weights selected by `mode`. Zero-mass
/// entries are left out of the support. Throws DegenerateNeighborhood.
std::pair<MassDistribution, MassDistribution> edge_distributions(
    const Graph& g, const DistanceState& s, VertexId x, VertexId y, double alpha,
    WeightMode mode = WeightMode::fixed_w);

/// Same, with x = edge.u and y = edge.v.
std::pair<MassDistribution, MassDistribution> edge_distributions(
    const Graph& g, const DistanceState& s, EdgeId e, double alpha,
    WeightMode mode = WeightMode::fixed_w);

/// kappa(x, y, alpha) = 1 - W(mu_x, nu_y) / d(x, y) with d the current edge
/// distance and transport costs read from `dm` (rows must cover the support
/// of mu_x, columns that of nu_y). Throws IncompleteMatrix.
double alpha_curvature(const Graph& g, const DistanceState& s, VertexId x, VertexId y,
                       double alpha, const DistanceMatrix& dm,
                       WeightMode mode = WeightMode::fixed_w);

struct LlyCurvature {
  double kappa = 0.0;
  /// kappa(alpha)/(1 - alpha) at the slope-check idleness, when enabled.
  std::optional<double> check_kappa;
  /// The two secants disagree by more than 1e-6.
  bool segment_warning = false;
};

/// Limit-free curvature kappa(x, y, alpha0)/(1 - alpha0).
LlyCurvature lly_curvature(const Graph& g, const DistanceState& s, VertexId x, VertexId y,
                           const DistanceMatrix& dm, const CurvatureConfig& cfg);

/// Independent evaluation through the Lipschitz dual: minimise
/// (Lap f(x) - Lap f(y)) / d(x, y) over f with f(y) - f(x) = d(x, y) and
/// |f(s) - f(t)| <= d(s, t) on every edge. Lipschitz constraints are imposed
/// on edges only. Requires d(x, y) to be the shortest-path distance between
/// x and y (else DualInfeasible) and at most 200 vertices.
double lly_dual_oracle(const Graph& g, const DistanceState& s, VertexId x, VertexId y,
                       WeightMode mode = WeightMode::fixed_w);

struct CurvatureReport {
  Eigen::VectorXd kappa;  // indexed by EdgeId
  double alpha_used = 0.0;
  WeightMode weight_mode = WeightMode::fixed_w;
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
  std::size_t clamp_events = 0;
  std::size_t segment_warnings = 0;
  PathCounters counters;
};

/// Curvature of every edge. Throws NotConnected for a disconnected graph.
/// Each edge is evaluated with x = min(u, v); the result does not depend on
/// the worker count or the path method.
CurvatureReport all_curvatures(const Graph& g, const DistanceState& s, const CurvatureConfig& cfg);

}  // namespace ricci
