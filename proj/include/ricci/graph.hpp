#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace ricci {

using VertexId = std::uint32_t;
using EdgeId = std::uint32_t;

/// Distances below this value are clamped during rescaling; a literal zero
/// would break the neighbourhood weight normalisation.
inline constexpr double kDistanceFloor = 1e-12;

struct Edge {
  VertexId u;
  VertexId v;
  double weight;

  VertexId other(VertexId x) const { return x == u ? v : u; }
};

struct Neighbor {
  VertexId vertex;
  EdgeId edge;
};

/// Immutable undirected simple graph with positive edge weights.
///
/// Edges keep the orientation and order they were given in; an EdgeId is the
/// index into that order. Adjacency is stored in compressed form with each
/// vertex's neighbours sorted by VertexId, and both endpoints of an edge
/// reference the same EdgeId.
class Graph {
 public:
  Graph() = default;

  /// Validates the edge list. Throws Error with SelfLoop, DuplicateEdge,
  /// InvalidWeight or InvalidParams (endpoint out of range, label count).
  /// With no labels, vertex i is labelled by its decimal id.
  Graph(std::size_t vertex_count, std::vector<Edge> edges,
        std::vector<std::string> labels = {});

  std::size_t vertex_count() const { return labels_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  const Edge& edge(EdgeId e) const { return edges_[e]; }
  std::span<const Edge> edges() const { return edges_; }

  std::span<const Neighbor> neighbors(VertexId v) const {
    return {adjacency_.data() + offsets_[v],
            adjacency_.data() + offsets_[v + 1]};
  }
  std::size_t degree(VertexId v) const { return offsets_[v + 1] - offsets_[v]; }

  std::optional<EdgeId> find_edge(VertexId a, VertexId b) const;

  const std::string& label(VertexId v) const { return labels_[v]; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::optional<VertexId> find_label(const std::string& label) const;

  /// Original edge weights indexed by EdgeId.
  Eigen::VectorXd weights() const;

 private:
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Neighbor> adjacency_;
  std::vector<std::string> labels_;
  std::unordered_map<std::string, VertexId> label_index_;
};

/// Per-edge positive distances indexed by EdgeId.
class DistanceState {
 public:
  DistanceState() = default;

  /// Throws InvalidDistance unless every entry is finite and positive.
  explicit DistanceState(Eigen::VectorXd values);

  /// The initial flow state: original weights rescaled to mean 1.
  static DistanceState from_weights(const Graph& g);

  const Eigen::VectorXd& values() const { return values_; }
  double operator[](EdgeId e) const { return values_[e]; }
  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }

  double mean() const;
  /// Number of entries sitting at or below kDistanceFloor.
  std::size_t floored_count() const;

 private:
  Eigen::VectorXd values_;
};

/// Multiplies every distance by beta. Throws InvalidScale for beta <= 0.
DistanceState scale_distances(const DistanceState& s, double beta);

/// True iff the graph has a single connected component (an empty vertex set
/// and a single isolated vertex both count as connected).
bool validate_connected(const Graph& g);

/// Connected components as vertex lists, each sorted; components ordered by
/// their smallest vertex.
std::vector<std::vector<VertexId>> connected_components(const Graph& g);

/// Induced subgraph on `vertices` (must be sorted and unique). Vertices are
/// relabelled densely in that order and keep their original labels; edges
/// keep their relative EdgeId order.
Graph induced_subgraph(const Graph& g, std::span<const VertexId> vertices);

/// Largest violation of d(a,b) + d(b,c) >= d(a,c) over every triangle of
/// the graph (zero or negative when the triangle inequality holds).
double max_triangle_violation(const Graph& g, const DistanceState& s);

/// Parses the whitespace-separated "u v [w]" edge-list format with "#"
/// comments. Labels are assigned dense ids in first-appearance order.
Graph load_edge_list(std::istream& in);
Graph load_edge_list_file(const std::string& path);

/// Canonical output: tab-separated labels and weight with 17 significant
/// digits, edges in EdgeId order. When `weights` is given it replaces the
/// graph's own weights (used to export flowed distances).
void save_edge_list(std::ostream& out, const Graph& g,
                    const Eigen::VectorXd* weights = nullptr);

/// Formats a double with 17 significant digits ("%.17g").
std::string format_real(double value);

}  // namespace ricci
