#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ricci/curvature.hpp"
#include "ricci/graph.hpp"

namespace ricci {

enum class BenchMethod {
  sssd_per_edge,        // per-edge tasks, one sssd per matrix cell
  ssmd_no_arrangement,  // per-edge tasks, one ssmd per source
  ssmd_arrangement,     // vertex-arranged tasks with ssmd
};

std::string_view to_string(BenchMethod method);
/// Accepts "sssd-per-edge", "ssmd-no-arrangement", "ssmd-arrangement".
/// Throws InvalidMethod otherwise.
BenchMethod parse_bench_method(std::string_view name);
PathMethod path_method(BenchMethod method);

struct BenchResult {
  BenchMethod method = BenchMethod::ssmd_arrangement;
  std::string graph;
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t shortest_paths = 0;
  std::size_t settled_vertices = 0;
  double wall_seconds = 0.0;  // median over the timed repeats
  Eigen::VectorXd kappa;      // from a separate untimed curvature pass
};

/// Times the all-edges distance-matrix pass of `method` (one warm-up, then
/// the median of `repeats` runs) and records the counters of a single pass.
/// Curvature is computed with the same method for cross-checking.
BenchResult bench_curvature_pass(const Graph& g, const DistanceState& s, BenchMethod method,
                                 unsigned worker_count, std::string graph_name,
                                 std::size_t repeats = 3,
                                 const CurvatureConfig& curvature = {});

inline constexpr std::string_view kBenchCsvHeader =
    "method,arrangement,graph,n,m,shortest_paths,wall_seconds,settled_vertices";

/// One CSV row without the trailing newline.
std::string bench_csv_row(const BenchResult& r);

}  // namespace ricci
