#include "ricci/bench.hpp"

#include <algorithm>
#include <chrono>

#include "ricci/error.hpp"
#include "ricci/shortest_paths.hpp"

namespace ricci {

std::string_view to_string(BenchMethod method) {
  switch (method) {
    case BenchMethod::sssd_per_edge: return "sssd-per-edge";
    case BenchMethod::ssmd_no_arrangement: return "ssmd-no-arrangement";
    case BenchMethod::ssmd_arrangement: return "ssmd-arrangement";
  }
  return "unknown";
}

BenchMethod parse_bench_method(std::string_view name) {
  for (auto m : {BenchMethod::sssd_per_edge, BenchMethod::ssmd_no_arrangement, BenchMethod::ssmd_arrangement})
    if (to_string(m) == name) return m;
  throw Error(ErrorCode::InvalidMethod, "unknown bench method: " + std::string(name));
}

PathMethod path_method(BenchMethod method) {
  switch (method) {
    case BenchMethod::sssd_per_edge: return PathMethod::sssd_per_edge;
    case BenchMethod::ssmd_no_arrangement: return PathMethod::ssmd_per_edge;
    case BenchMethod::ssmd_arrangement: return PathMethod::ssmd_vertex_arranged;
  }
  throw Error(ErrorCode::InvalidMethod, "unknown bench method");
}

namespace {

PathCounters matrix_pass(const Graph& g, const DistanceState& s, std::span<const CurvatureTask> tasks,
                         MatrixMethod method, unsigned workers) {
  std::vector<DijkstraEngine> engines(workers, DijkstraEngine(g));
  std::vector<PathCounters> counters(workers);
  parallel_for_each_task(tasks.size(), workers, [&](std::size_t i, unsigned w) {
    const CurvatureTask& t = tasks[i];
    compute_distance_matrix(engines[w], s, t.sources, t.destinations, method, &counters[w]);
  });
  PathCounters total;
  for (const auto& c : counters) total += c;
  return total;
}

}  // namespace

BenchResult bench_curvature_pass(const Graph& g, const DistanceState& s, BenchMethod method,
                                 unsigned worker_count, std::string graph_name, std::size_t repeats,
                                 const CurvatureConfig& curvature) {
  if (!validate_connected(g)) throw Error(ErrorCode::NotConnected, "bench needs a connected graph");
  if (repeats == 0) throw Error(ErrorCode::InvalidParams, "bench needs at least one timed repeat");
  const unsigned workers = worker_count == 0 ? default_worker_count() : worker_count;
  const auto tasks = method == BenchMethod::ssmd_arrangement ? build_tasks(g) : build_edge_tasks(g);
  const auto matrix_method =
      method == BenchMethod::sssd_per_edge ? MatrixMethod::sssd_per_cell : MatrixMethod::ssmd;

  BenchResult r;
  r.method = method;
  r.graph = std::move(graph_name);
  r.n = g.vertex_count();
  r.m = g.edge_count();

  const PathCounters counters = matrix_pass(g, s, tasks, matrix_method, workers);  // warm-up
  r.shortest_paths = counters.shortest_paths;
  r.settled_vertices = counters.settled_vertices;

  std::vector<double> times;
  for (std::size_t i = 0; i < repeats; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    matrix_pass(g, s, tasks, matrix_method, workers);
    times.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  std::sort(times.begin(), times.end());
  r.wall_seconds = times[times.size() / 2];

  CurvatureConfig cfg = curvature;
  cfg.path_method = path_method(method);
  cfg.worker_count = workers;
  r.kappa = all_curvatures(g, s, cfg).kappa;
  return r;
}

std::string bench_csv_row(const BenchResult& r) {
  return std::string(to_string(r.method)) + "," +
         (r.method == BenchMethod::ssmd_arrangement ? "yes" : "no") + "," + r.graph + "," +
         std::to_string(r.n) + "," + std::to_string(r.m) + "," + std::to_string(r.shortest_paths) +
         "," + format_real(r.wall_seconds) + "," + std::to_string(r.settled_vertices);
}

}  // namespace ricci
