#include "ricci/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "ricci/error.hpp"

namespace ricci {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DuplicateEdge: return "DuplicateEdge";
    case ErrorCode::InvalidWeight: return "InvalidWeight";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::InvalidScale: return "InvalidScale";
    case ErrorCode::InvalidDistance: return "InvalidDistance";
    case ErrorCode::Unreachable: return "Unreachable";
    case ErrorCode::MassImbalance: return "MassImbalance";
    case ErrorCode::OracleTooLarge: return "OracleTooLarge";
    case ErrorCode::DegenerateNeighborhood: return "DegenerateNeighborhood";
    case ErrorCode::IncompleteMatrix: return "IncompleteMatrix";
    case ErrorCode::DualInfeasible: return "DualInfeasible";
    case ErrorCode::DegenerateState: return "DegenerateState";
    case ErrorCode::NotConnected: return "NotConnected";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::InvalidMethod: return "InvalidMethod";
    case ErrorCode::MissingGroup: return "MissingGroup";
    case ErrorCode::MethodMismatch: return "MethodMismatch";
    case ErrorCode::Io: return "IoError";
  }
  return "Unknown";
}

Graph::Graph(std::size_t vertex_count, std::vector<Edge> edges,
             std::vector<std::string> labels)
    : edges_(std::move(edges)), labels_(std::move(labels)) {
  if (labels_.empty()) {
    labels_.reserve(vertex_count);
    for (std::size_t i = 0; i < vertex_count; ++i) labels_.push_back(std::to_string(i));
  } else if (labels_.size() != vertex_count) {
    throw Error(ErrorCode::InvalidParams, "label count does not match vertex count");
  }
  label_index_.reserve(vertex_count);
  for (std::size_t i = 0; i < vertex_count; ++i) {
    if (!label_index_.emplace(labels_[i], static_cast<VertexId>(i)).second)
      throw Error(ErrorCode::InvalidParams, "duplicate vertex label '" + labels_[i] + "'");
  }

  std::vector<std::size_t> degree(vertex_count, 0);
  for (const Edge& e : edges_) {
    if (e.u >= vertex_count || e.v >= vertex_count)
      throw Error(ErrorCode::InvalidParams, "edge endpoint out of range");
    if (e.u == e.v) throw Error(ErrorCode::SelfLoop, "self-loop at '" + labels_[e.u] + "'");
    if (!(e.weight > 0.0) || !std::isfinite(e.weight))
      throw Error(ErrorCode::InvalidWeight, "edge (" + labels_[e.u] + "," + labels_[e.v] +
                                                ") has non-positive weight");
    ++degree[e.u];
    ++degree[e.v];
  }

  offsets_.assign(vertex_count + 1, 0);
  for (std::size_t v = 0; v < vertex_count; ++v) offsets_[v + 1] = offsets_[v] + degree[v];
  adjacency_.resize(offsets_.back());
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const Edge& e = edges_[i];
    adjacency_[cursor[e.u]++] = {e.v, static_cast<EdgeId>(i)};
    adjacency_[cursor[e.v]++] = {e.u, static_cast<EdgeId>(i)};
  }
  for (std::size_t v = 0; v < vertex_count; ++v) {
    auto first = adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[v]);
    auto last = adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[v + 1]);
    std::sort(first, last, [](const Neighbor& a, const Neighbor& b) { return a.vertex < b.vertex; });
    auto dup = std::adjacent_find(first, last, [](const Neighbor& a, const Neighbor& b) {
      return a.vertex == b.vertex;
    });
    if (dup != last)
      throw Error(ErrorCode::DuplicateEdge,
                  "(" + labels_[v] + "," + labels_[dup->vertex] + ")");
  }
}

std::optional<EdgeId> Graph::find_edge(VertexId a, VertexId b) const {
  if (a >= vertex_count() || b >= vertex_count()) return std::nullopt;
  auto nbrs = neighbors(a);
  auto it = std::lower_bound(nbrs.begin(), nbrs.end(), b,
                             [](const Neighbor& n, VertexId x) { return n.vertex < x; });
  if (it == nbrs.end() || it->vertex != b) return std::nullopt;
  return it->edge;
}

std::optional<VertexId> Graph::find_label(const std::string& label) const {
  auto it = label_index_.find(label);
  if (it == label_index_.end()) return std::nullopt;
  return it->second;
}

Eigen::VectorXd Graph::weights() const {
  Eigen::VectorXd w(static_cast<Eigen::Index>(edges_.size()));
  for (std::size_t i = 0; i < edges_.size(); ++i) w[static_cast<Eigen::Index>(i)] = edges_[i].weight;
  return w;
}

DistanceState::DistanceState(Eigen::VectorXd values) : values_(std::move(values)) {
  for (Eigen::Index i = 0; i < values_.size(); ++i) {
    if (!(values_[i] > 0.0) || !std::isfinite(values_[i]))
      throw Error(ErrorCode::InvalidDistance,
                  "edge " + std::to_string(i) + " has distance " + format_real(values_[i]));
  }
}

DistanceState DistanceState::from_weights(const Graph& g) {
  Eigen::VectorXd w = g.weights();
  if (w.size() > 0) w *= static_cast<double>(w.size()) / w.sum();
  return DistanceState(std::move(w));
}

double DistanceState::mean() const { return values_.size() ? values_.mean() : 0.0; }

std::size_t DistanceState::floored_count() const {
  return static_cast<std::size_t>((values_.array() <= kDistanceFloor).count());
}

DistanceState scale_distances(const DistanceState& s, double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw Error(ErrorCode::InvalidScale, "scale factor must be positive, got " + format_real(beta));
  return DistanceState(s.values() * beta);
}

std::vector<std::vector<VertexId>> connected_components(const Graph& g) {
  const std::size_t n = g.vertex_count();
  std::vector<bool> seen(n, false);
  std::vector<std::vector<VertexId>> components;
  std::vector<VertexId> queue;
  for (VertexId root = 0; root < n; ++root) {
    if (seen[root]) continue;
    queue.assign(1, root);
    seen[root] = true;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      for (const Neighbor& nb : g.neighbors(queue[head])) {
        if (!seen[nb.vertex]) {
          seen[nb.vertex] = true;
          queue.push_back(nb.vertex);
        }
      }
    }
    std::sort(queue.begin(), queue.end());
    components.push_back(queue);
  }
  return components;
}

bool validate_connected(const Graph& g) {
  if (g.vertex_count() <= 1) return true;
  std::vector<bool> seen(g.vertex_count(), false);
  std::vector<VertexId> queue{0};
  seen[0] = true;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    for (const Neighbor& nb : g.neighbors(queue[head])) {
      if (!seen[nb.vertex]) {
        seen[nb.vertex] = true;
        queue.push_back(nb.vertex);
      }
    }
  }
  return queue.size() == g.vertex_count();
}

Graph induced_subgraph(const Graph& g, std::span<const VertexId> vertices) {
  constexpr auto kAbsent = static_cast<VertexId>(-1);
  std::vector<VertexId> remap(g.vertex_count(), kAbsent);
  std::vector<std::string> labels;
  labels.reserve(vertices.size());
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    remap[vertices[i]] = static_cast<VertexId>(i);
    labels.push_back(g.label(vertices[i]));
  }
  std::vector<Edge> edges;
  for (const Edge& e : g.edges()) {
    if (remap[e.u] != kAbsent && remap[e.v] != kAbsent)
      edges.push_back({remap[e.u], remap[e.v], e.weight});
  }
  return Graph(vertices.size(), std::move(edges), std::move(labels));
}

double max_triangle_violation(const Graph& g, const DistanceState& s) {
  double worst = -std::numeric_limits<double>::infinity();
  for (VertexId a = 0; a < g.vertex_count(); ++a) {
    auto na = g.neighbors(a);
    for (std::size_t i = 0; i < na.size(); ++i) {
      VertexId b = na[i].vertex;
      if (b <= a) continue;
      for (std::size_t j = i + 1; j < na.size(); ++j) {
        VertexId c = na[j].vertex;
        auto bc = g.find_edge(b, c);
        if (!bc) continue;
        const double ab = s[na[i].edge], ac = s[na[j].edge], dbc = s[*bc];
        worst = std::max({worst, ac - ab - dbc, ab - ac - dbc, dbc - ab - ac});
      }
    }
  }
  return worst;
}

namespace {

std::vector<std::string_view> split_whitespace(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

}  // namespace

Graph load_edge_list(std::istream& in) {
  std::vector<std::string> labels;
  std::unordered_map<std::string, VertexId> ids;
  std::vector<Edge> edges;
  auto intern = [&](std::string_view label) {
    auto [it, inserted] = ids.emplace(std::string(label), static_cast<VertexId>(labels.size()));
    if (inserted) labels.emplace_back(label);
    return it->second;
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    auto tokens = split_whitespace(view);
    if (tokens.empty()) continue;
    if (tokens.size() < 2 || tokens.size() > 3)
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no));
    double w = 1.0;
    if (tokens.size() == 3) {
      auto [ptr, ec] = std::from_chars(tokens[2].data(), tokens[2].data() + tokens[2].size(), w);
      if (ec != std::errc() || ptr != tokens[2].data() + tokens[2].size())
        throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": bad weight");
    }
    if (tokens[0] == tokens[1])
      throw Error(ErrorCode::SelfLoop, "line " + std::to_string(line_no));
    if (!(w > 0.0) || !std::isfinite(w))
      throw Error(ErrorCode::InvalidWeight, "line " + std::to_string(line_no));
    VertexId u = intern(tokens[0]);
    VertexId v = intern(tokens[1]);
    edges.push_back({u, v, w});
  }
  const std::size_t n = labels.size();
  return Graph(n, std::move(edges), std::move(labels));
}

Graph load_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  return load_edge_list(in);
}

std::string format_real(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void save_edge_list(std::ostream& out, const Graph& g, const Eigen::VectorXd* weights) {
  for (std::size_t i = 0; i < g.edge_count(); ++i) {
    const Edge& e = g.edge(static_cast<EdgeId>(i));
    const double w = weights ? (*weights)[static_cast<Eigen::Index>(i)] : e.weight;
    out << g.label(e.u) << '\t' << g.label(e.v) << '\t' << format_real(w) << '\n';
  }
}

}  // namespace ricci
