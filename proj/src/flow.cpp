#include "ricci/flow.hpp"

#include <cmath>

#include "ricci/error.hpp"

namespace ricci {

void FlowConfig::validate() const {
  if (max_iterations < 1) throw Error(ErrorCode::InvalidParams, "max_iterations must be at least 1");
  if (!(std_tolerance > 0.0)) throw Error(ErrorCode::InvalidParams, "std_tolerance must be positive");
  curvature.validate();
}

RescaleResult rescale(const Eigen::VectorXd& raw) {
  const double total = raw.sum();
  if (!(total > 0.0) || !std::isfinite(total))
    throw Error(ErrorCode::DegenerateState, "distance vector has no positive mass");
  Eigen::VectorXd d = raw * (static_cast<double>(raw.size()) / total);
  std::size_t clamps = 0;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (d[i] < kDistanceFloor) {
      d[i] = kDistanceFloor;
      ++clamps;
    }
  }
  return {DistanceState(std::move(d)), clamps};
}

double linf_distance(const DistanceState& a, const DistanceState& b) {
  if (a.size() == 0) return 0.0;
  return (a.values() - b.values()).cwiseAbs().maxCoeff();
}

namespace {

double population_std(const Eigen::VectorXd& v, double mean) {
  if (v.size() == 0) return 0.0;
  return std::sqrt((v.array() - mean).square().sum() / static_cast<double>(v.size()));
}

}  // namespace

StepResult step(const Graph& g, const DistanceState& s, const FlowConfig& cfg) {
  cfg.validate();
  if (!validate_connected(g)) throw Error(ErrorCode::NotConnected, "flow needs a connected graph");
  CurvatureReport report = all_curvatures(g, s, cfg.curvature);

  // kappa = 2 (e.g. K_2) zeroes the product; floor it so rescaling is defined.
  Eigen::VectorXd raw = s.values().array() * (1.0 - report.kappa.array() / 2.0);
  std::size_t floored = 0;
  for (double& d : raw) {
    if (d < kDistanceFloor) {
      d = kDistanceFloor;
      ++floored;
    }
  }
  RescaleResult rescaled = rescale(raw);

  IterationRecord record;
  record.mean_kappa = report.mean;
  record.std_kappa = report.std;
  record.mean_distance = s.mean();
  record.std_distance = population_std(s.values(), record.mean_distance);
  record.linf_step = linf_distance(s, rescaled.state);
  record.clamp_events = floored + rescaled.clamp_events;
  return {std::move(rescaled.state), record, std::move(report)};
}

FlowResult run(const Graph& g, const DistanceState& init, const FlowConfig& cfg) {
  cfg.validate();
  if (!validate_connected(g)) throw Error(ErrorCode::NotConnected, "flow needs a connected graph");
  FlowResult result;
  DistanceState current = init;
  for (std::size_t k = 1; k <= cfg.max_iterations; ++k) {
    StepResult r = step(g, current, cfg);
    r.record.iteration = k;
    auto& records = result.trace.records;
    if (!records.empty() && r.record.linf_step > records.back().linf_step + 1e-12)
      ++result.trace.settling_violations;
    records.push_back(r.record);
    result.last_report = std::move(r.report);
    if (r.record.std_kappa < cfg.std_tolerance) {
      result.converged = true;
      break;
    }
    current = std::move(r.next);
  }
  result.state = std::move(current);
  return result;
}

ContractionGap contraction_gap(const Graph& g, const DistanceState& a, const DistanceState& b,
                               const FlowConfig& cfg) {
  ContractionGap gap;
  gap.before = linf_distance(a, b);
  gap.after = linf_distance(step(g, a, cfg).next, step(g, b, cfg).next);
  return gap;
}

}  // namespace ricci
