#include "ricci/shortest_paths.hpp"

#include <functional>
#include <limits>
#include <string>

#include "ricci/error.hpp"

namespace ricci {

namespace {

using HeapEntry = std::pair<double, VertexId>;
constexpr auto kHeapOrder = std::greater<HeapEntry>{};

}  // namespace

DijkstraEngine::DijkstraEngine(const Graph& g)
    : graph_(&g),
      dist_(g.vertex_count(), 0.0),
      stamp_(g.vertex_count(), 0),
      settled_(g.vertex_count(), 0),
      target_(g.vertex_count(), 0) {}

void DijkstraEngine::begin() {
  if (++epoch_ == 0) {
    std::fill(stamp_.begin(), stamp_.end(), 0);
    std::fill(settled_.begin(), settled_.end(), 0);
    std::fill(target_.begin(), target_.end(), 0);
    epoch_ = 1;
  }
  heap_.clear();
}

double DijkstraEngine::sssd(const DistanceState& s, VertexId src, VertexId dst,
                            PathCounters* counters) {
  double out = 0.0;
  const VertexId dsts[1] = {dst};
  ssmd(s, src, dsts, std::span<double>(&out, 1), counters);
  return out;
}

void DijkstraEngine::ssmd(const DistanceState& s, VertexId src, std::span<const VertexId> dsts,
                          std::span<double> out, PathCounters* counters) {
  const Graph& g = *graph_;
  begin();
  std::size_t remaining = 0;
  for (VertexId d : dsts) {
    if (target_[d] != epoch_) {
      target_[d] = epoch_;
      ++remaining;
    }
  }

  PathCounters local;
  dist_[src] = 0.0;
  stamp_[src] = epoch_;
  heap_.emplace_back(0.0, src);
  ++local.heap_pushes;

  while (remaining > 0 && !heap_.empty()) {
    std::pop_heap(heap_.begin(), heap_.end(), kHeapOrder);
    const auto [du, u] = heap_.back();
    heap_.pop_back();
    if (settled_[u] == epoch_ || du > dist_[u]) continue;
    settled_[u] = epoch_;
    ++local.settled_vertices;
    if (target_[u] == epoch_ && --remaining == 0) break;
    for (const Neighbor& nb : g.neighbors(u)) {
      if (settled_[nb.vertex] == epoch_) continue;
      const double candidate = du + s[nb.edge];
      if (!has_dist(nb.vertex) || candidate < dist_[nb.vertex]) {
        dist_[nb.vertex] = candidate;
        stamp_[nb.vertex] = epoch_;
        heap_.emplace_back(candidate, nb.vertex);
        std::push_heap(heap_.begin(), heap_.end(), kHeapOrder);
        ++local.heap_pushes;
      }
    }
  }

  for (std::size_t i = 0; i < dsts.size(); ++i) {
    if (settled_[dsts[i]] != epoch_)
      throw Error(ErrorCode::Unreachable, "vertex '" + g.label(dsts[i]) + "' from '" +
                                              g.label(src) + "'");
    out[i] = dist_[dsts[i]];
  }
  local.shortest_paths = dsts.size();
  if (counters) *counters += local;
}

Eigen::VectorXd DijkstraEngine::all_distances(const DistanceState& s, VertexId src,
                                              PathCounters* counters) {
  const Graph& g = *graph_;
  begin();
  PathCounters local;
  dist_[src] = 0.0;
  stamp_[src] = epoch_;
  heap_.emplace_back(0.0, src);
  ++local.heap_pushes;
  while (!heap_.empty()) {
    std::pop_heap(heap_.begin(), heap_.end(), kHeapOrder);
    const auto [du, u] = heap_.back();
    heap_.pop_back();
    if (settled_[u] == epoch_ || du > dist_[u]) continue;
    settled_[u] = epoch_;
    ++local.settled_vertices;
    for (const Neighbor& nb : g.neighbors(u)) {
      if (settled_[nb.vertex] == epoch_) continue;
      const double candidate = du + s[nb.edge];
      if (!has_dist(nb.vertex) || candidate < dist_[nb.vertex]) {
        dist_[nb.vertex] = candidate;
        stamp_[nb.vertex] = epoch_;
        heap_.emplace_back(candidate, nb.vertex);
        std::push_heap(heap_.begin(), heap_.end(), kHeapOrder);
        ++local.heap_pushes;
      }
    }
  }
  Eigen::VectorXd out(static_cast<Eigen::Index>(g.vertex_count()));
  for (VertexId v = 0; v < g.vertex_count(); ++v)
    out[v] = settled_[v] == epoch_ ? dist_[v] : std::numeric_limits<double>::infinity();
  local.shortest_paths = g.vertex_count();
  if (counters) *counters += local;
  return out;
}

double sssd(const Graph& g, const DistanceState& s, VertexId src, VertexId dst,
            PathCounters* counters) {
  DijkstraEngine engine(g);
  return engine.sssd(s, src, dst, counters);
}

std::vector<double> ssmd(const Graph& g, const DistanceState& s, VertexId src,
                         std::span<const VertexId> dsts, PathCounters* counters) {
  if (dsts.empty()) throw Error(ErrorCode::InvalidParams, "ssmd needs at least one destination");
  DijkstraEngine engine(g);
  std::vector<double> out(dsts.size());
  engine.ssmd(s, src, dsts, out, counters);
  return out;
}

namespace {

std::vector<VertexId> closed_neighborhood_sources(const Graph& g, VertexId x) {
  std::vector<VertexId> out;
  out.reserve(g.degree(x) + 1);
  for (const Neighbor& nb : g.neighbors(x)) out.push_back(nb.vertex);
  out.push_back(x);
  return out;
}

}  // namespace

std::vector<CurvatureTask> build_tasks(const Graph& g) {
  std::vector<CurvatureTask> tasks;
  std::vector<bool> claimed(g.edge_count(), false);
  std::vector<std::uint32_t> seen(g.vertex_count(), 0);
  std::uint32_t mark = 0;
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    CurvatureTask task;
    task.init_vertex = v;
    for (const Neighbor& nb : g.neighbors(v)) {
      if (!claimed[nb.edge]) {
        claimed[nb.edge] = true;
        task.edges.push_back(nb.edge);
      }
    }
    if (task.edges.empty()) continue;
    task.sources = closed_neighborhood_sources(g, v);

    ++mark;
    auto add = [&](VertexId w) {
      if (seen[w] != mark) {
        seen[w] = mark;
        task.destinations.push_back(w);
      }
    };
    add(v);
    for (EdgeId e : task.edges) {
      const VertexId s = g.edge(e).other(v);
      add(s);
      for (const Neighbor& nb : g.neighbors(s)) add(nb.vertex);
    }
    tasks.push_back(std::move(task));
  }
  return tasks;
}

std::vector<CurvatureTask> build_edge_tasks(const Graph& g) {
  std::vector<CurvatureTask> tasks;
  tasks.reserve(g.edge_count());
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const Edge& edge = g.edge(e);
    const VertexId x = std::min(edge.u, edge.v);
    const VertexId y = std::max(edge.u, edge.v);
    CurvatureTask task;
    task.init_vertex = x;
    task.edges = {e};
    task.sources = closed_neighborhood_sources(g, x);
    task.destinations.push_back(y);
    for (const Neighbor& nb : g.neighbors(y)) task.destinations.push_back(nb.vertex);
    tasks.push_back(std::move(task));
  }
  return tasks;
}

DistanceMatrix::DistanceMatrix(std::vector<VertexId> sources, std::vector<VertexId> destinations)
    : sources_(std::move(sources)),
      destinations_(std::move(destinations)),
      values_(static_cast<Eigen::Index>(sources_.size()),
              static_cast<Eigen::Index>(destinations_.size())) {
  auto build = [](const std::vector<VertexId>& vs) {
    Index index;
    index.reserve(vs.size());
    for (std::size_t i = 0; i < vs.size(); ++i) index.emplace_back(vs[i], static_cast<Eigen::Index>(i));
    std::sort(index.begin(), index.end());
    return index;
  };
  row_index_ = build(sources_);
  col_index_ = build(destinations_);
}

std::optional<Eigen::Index> DistanceMatrix::find(const Index& index, VertexId v) {
  auto it = std::lower_bound(index.begin(), index.end(), v,
                             [](const auto& entry, VertexId key) { return entry.first < key; });
  if (it == index.end() || it->first != v) return std::nullopt;
  return it->second;
}

std::optional<double> DistanceMatrix::at(VertexId src, VertexId dst) const {
  auto r = row_of(src);
  auto c = col_of(dst);
  if (!r || !c) return std::nullopt;
  return values_(*r, *c);
}

DistanceMatrix compute_distance_matrix(DijkstraEngine& engine, const DistanceState& s,
                                       std::vector<VertexId> sources,
                                       std::vector<VertexId> destinations, MatrixMethod method,
                                       PathCounters* counters) {
  DistanceMatrix dm(std::move(sources), std::move(destinations));
  const auto& rows = dm.sources();
  const auto& cols = dm.destinations();
  std::vector<double> row(cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (method == MatrixMethod::ssmd) {
      engine.ssmd(s, rows[i], cols, row, counters);
    } else {
      for (std::size_t j = 0; j < cols.size(); ++j) row[j] = engine.sssd(s, rows[i], cols[j], counters);
    }
    for (std::size_t j = 0; j < cols.size(); ++j)
      dm.values()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j];
  }
  return dm;
}

DistanceMatrix task_distance_matrix(const Graph& g, const DistanceState& s,
                                    const CurvatureTask& task, MatrixMethod method,
                                    PathCounters* counters) {
  DijkstraEngine engine(g);
  return compute_distance_matrix(engine, s, task.sources, task.destinations, method, counters);
}

unsigned default_worker_count() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace ricci
