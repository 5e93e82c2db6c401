#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "ricci/curvature.hpp"
#include "ricci/graph.hpp"

namespace ricci {

struct FlowConfig {
  std::size_t max_iterations = 100;
  double std_tolerance = 0.02;
  CurvatureConfig curvature;

  void validate() const;
};

/// Statistics of one flow iteration. Curvature and distance statistics
/// describe the state the iteration started from; linf_step is the size of
/// the update it applied.
struct IterationRecord {
  std::size_t iteration = 0;
  double mean_kappa = 0.0;
  double std_kappa = 0.0;
  double mean_distance = 0.0;
  double std_distance = 0.0;
  double linf_step = 0.0;
  std::size_t clamp_events = 0;
};

struct FlowTrace {
  std::vector<IterationRecord> records;
  /// Iterations whose step size grew relative to the previous one.
  std::size_t settling_violations = 0;
};

struct RescaleResult {
  DistanceState state;
  std::size_t clamp_events = 0;
};

/// Normalises to mean edge distance 1, then clamps entries below
/// kDistanceFloor. Throws DegenerateState when the sum is not positive.
RescaleResult rescale(const Eigen::VectorXd& raw);

struct StepResult {
  DistanceState next;
  IterationRecord record;
  CurvatureReport report;  // curvature of the input state
};

/// d <- d (1 - kappa/2) followed by rescaling. Throws NotConnected.
StepResult step(const Graph& g, const DistanceState& s, const FlowConfig& cfg);

struct FlowResult {
  DistanceState state;
  FlowTrace trace;
  bool converged = false;
  /// Curvature of the state the last iteration started from.
  CurvatureReport last_report;
};

/// Iterates step() until the curvature spread drops below std_tolerance or
/// max_iterations is reached. On convergence `state` is the state whose
/// curvature met the tolerance; otherwise it is the last updated state.
FlowResult run(const Graph& g, const DistanceState& init, const FlowConfig& cfg);

struct ContractionGap {
  double before = 0.0;
  double after = 0.0;
};

/// L-infinity distance between two states before and after one step each.
ContractionGap contraction_gap(const Graph& g, const DistanceState& a, const DistanceState& b,
                               const FlowConfig& cfg);

double linf_distance(const DistanceState& a, const DistanceState& b);

}  // namespace ricci
