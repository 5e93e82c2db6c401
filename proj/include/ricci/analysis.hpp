#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ricci/graph.hpp"

namespace ricci {

/// Edges with distance strictly above `threshold`, in EdgeId order.
/// Throws InvalidParams for a negative or non-finite threshold.
std::vector<EdgeId> backbone(const Graph& g, const DistanceState& s, double threshold);

/// Group label per VertexId.
using GroupMap = std::vector<std::string>;

/// Reads "node_label,group" rows (an optional header is skipped) and maps
/// them onto g's vertices. Throws MissingGroup for an unlisted vertex and
/// ParseError for malformed rows or unknown labels.
GroupMap load_group_map(std::istream& in, const Graph& g);

struct MeanCount {
  double mean = 0.0;  // meaningful only when count > 0
  std::size_t count = 0;
};

struct GroupStats {
  MeanCount intra;
  MeanCount inter;  // every inter-group edge touching the group
  std::optional<double> ratio;
};

struct GroupReport {
  std::map<std::string, GroupStats> groups;
  std::map<std::pair<std::string, std::string>, MeanCount> pairs;  // first < second
  std::size_t intra_edges = 0;
  std::size_t inter_edges = 0;
};

/// Edge-averaged intra/inter distances per group. Throws MissingGroup when
/// `groups` does not cover every vertex.
GroupReport group_ratio(const Graph& g, const DistanceState& s, const GroupMap& groups);

/// JSON rendering; undefined ratios are written as null.
std::string to_json(const GroupReport& report);

}  // namespace ricci
