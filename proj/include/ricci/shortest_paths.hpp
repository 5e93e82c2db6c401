#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <span>
#include <thread>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ricci/graph.hpp"

namespace ricci {

/// Machine-independent work counters.
struct PathCounters {
  std::uint64_t settled_vertices = 0;
  std::uint64_t heap_pushes = 0;
  std::uint64_t shortest_paths = 0;

  PathCounters& operator+=(const PathCounters& o) {
    settled_vertices += o.settled_vertices;
    heap_pushes += o.heap_pushes;
    shortest_paths += o.shortest_paths;
    return *this;
  }
};

/// Dijkstra with a reusable workspace. Heap ties are broken by VertexId so
/// the settle order, and therefore every distance bit, is deterministic.
/// One engine per thread.
class DijkstraEngine {
 public:
  explicit DijkstraEngine(const Graph& g);

  /// Stops as soon as `dst` is settled. Throws Unreachable.
  double sssd(const DistanceState& s, VertexId src, VertexId dst,
              PathCounters* counters = nullptr);

  /// One run from `src`, continued until every vertex in `dsts` is settled.
  /// `out[i]` receives the distance to `dsts[i]`. Throws Unreachable.
  void ssmd(const DistanceState& s, VertexId src, std::span<const VertexId> dsts,
            std::span<double> out, PathCounters* counters = nullptr);

  /// Full single-source run; unreachable vertices get +infinity.
  Eigen::VectorXd all_distances(const DistanceState& s, VertexId src,
                                PathCounters* counters = nullptr);

 private:
  void begin();
  bool has_dist(VertexId v) const { return stamp_[v] == epoch_; }

  const Graph* graph_;
  std::uint32_t epoch_ = 0;
  std::vector<double> dist_;
  std::vector<std::uint32_t> stamp_;
  std::vector<std::uint32_t> settled_;
  std::vector<std::uint32_t> target_;
  std::vector<std::pair<double, VertexId>> heap_;
};

double sssd(const Graph& g, const DistanceState& s, VertexId src, VertexId dst,
            PathCounters* counters = nullptr);

/// Distances aligned with `dsts`. Throws InvalidParams for an empty set.
std::vector<double> ssmd(const Graph& g, const DistanceState& s, VertexId src,
                         std::span<const VertexId> dsts, PathCounters* counters = nullptr);

/// A batch of edges sharing one endpoint (the init vertex) whose transport
/// problems all read from a single sources x destinations matrix.
struct CurvatureTask {
  VertexId init_vertex = 0;
  std::vector<EdgeId> edges;
  /// N(init) in VertexId order followed by init itself.
  std::vector<VertexId> sources;
  /// init, then for every claimed edge (init, s): s and N(s), deduplicated
  /// in first-appearance order.
  std::vector<VertexId> destinations;
};

/// Vertex-arranged tasks: vertices in VertexId order, each claiming its
/// not-yet-claimed edges; tasks that claim nothing are omitted. The tasks
/// partition E and every edge is oriented with init_vertex = min(u, v).
std::vector<CurvatureTask> build_tasks(const Graph& g);

/// One task per edge (in EdgeId order), init_vertex = min(u, v) and the
/// destinations reduced to the other endpoint's neighbourhood support.
std::vector<CurvatureTask> build_edge_tasks(const Graph& g);

class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  DistanceMatrix(std::vector<VertexId> sources, std::vector<VertexId> destinations);

  const std::vector<VertexId>& sources() const { return sources_; }
  const std::vector<VertexId>& destinations() const { return destinations_; }
  Eigen::MatrixXd& values() { return values_; }
  const Eigen::MatrixXd& values() const { return values_; }

  std::optional<Eigen::Index> row_of(VertexId v) const { return find(row_index_, v); }
  std::optional<Eigen::Index> col_of(VertexId v) const { return find(col_index_, v); }

  /// Entry for (src, dst); nullopt when either is not covered.
  std::optional<double> at(VertexId src, VertexId dst) const;

 private:
  using Index = std::vector<std::pair<VertexId, Eigen::Index>>;
  static std::optional<Eigen::Index> find(const Index& index, VertexId v);

  std::vector<VertexId> sources_;
  std::vector<VertexId> destinations_;
  Index row_index_;
  Index col_index_;
  Eigen::MatrixXd values_;
};

enum class MatrixMethod {
  ssmd,           // one multi-destination run per source
  sssd_per_cell,  // one early-exit run per (source, destination) cell
};

DistanceMatrix compute_distance_matrix(DijkstraEngine& engine, const DistanceState& s,
                                       std::vector<VertexId> sources,
                                       std::vector<VertexId> destinations,
                                       MatrixMethod method = MatrixMethod::ssmd,
                                       PathCounters* counters = nullptr);

DistanceMatrix task_distance_matrix(const Graph& g, const DistanceState& s,
                                    const CurvatureTask& task,
                                    MatrixMethod method = MatrixMethod::ssmd,
                                    PathCounters* counters = nullptr);

unsigned default_worker_count();

/// Runs fn(index, worker) for index in [0, count) on `workers` threads that
/// pull from a shared counter. If any call throws, indices above the lowest
/// failing one are skipped and the exception of the lowest failing index is
/// rethrown, so the reported error does not depend on scheduling.
template <class Fn>
void parallel_for_each_task(std::size_t count, unsigned workers, Fn&& fn) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> first_failure{count};
  std::mutex error_mutex;
  std::exception_ptr error;
  std::size_t error_index = count;

  auto body = [&](unsigned worker) {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count || i > first_failure.load()) return;
      try {
        fn(i, worker);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
          first_failure.store(i);
        }
      }
    }
  };

  if (workers == 1) {
    body(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body, w);
  }
  if (error) std::rethrow_exception(error);
}

/// Executes per-task work and scatters the per-edge results into EdgeId
/// slots. `fn(task, worker)` must return one value per entry of task.edges.
template <class T, class Fn>
std::vector<T> run_tasks_parallel(std::span<const CurvatureTask> tasks, std::size_t edge_count,
                                  unsigned workers, Fn&& fn) {
  std::vector<T> slots(edge_count);
  parallel_for_each_task(tasks.size(), workers, [&](std::size_t i, unsigned worker) {
    const CurvatureTask& task = tasks[i];
    std::vector<T> values = fn(task, worker);
    for (std::size_t k = 0; k < task.edges.size(); ++k) slots[task.edges[k]] = std::move(values[k]);
  });
  return slots;
}

}  // namespace ricci
