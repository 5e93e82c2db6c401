#include "ricci/analysis.hpp"

#include <cmath>
#include <istream>

#include "json.hpp"

#include "ricci/error.hpp"

namespace ricci {

std::vector<EdgeId> backbone(const Graph& g, const DistanceState& s, double threshold) {
  if (!(threshold >= 0.0) || !std::isfinite(threshold))
    throw Error(ErrorCode::InvalidParams, "backbone threshold must be a non-negative number");
  std::vector<EdgeId> out;
  for (EdgeId e = 0; e < g.edge_count(); ++e)
    if (s[e] > threshold) out.push_back(e);
  return out;
}

namespace {

std::string trim(std::string text) {
  const auto first = text.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = text.find_last_not_of(" \t\r");
  return text.substr(first, last - first + 1);
}

}  // namespace

GroupMap load_group_map(std::istream& in, const Graph& g) {
  GroupMap groups(g.vertex_count());
  std::vector<bool> seen(g.vertex_count(), false);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected node,group");
    const std::string node = trim(line.substr(0, comma));
    const std::string group = trim(line.substr(comma + 1));
    if (line_no == 1 && (node == "node_label" || node == "node") && group == "group") continue;
    const auto v = g.find_label(node);
    if (!v) throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": unknown node " + node);
    groups[*v] = group;
    seen[*v] = true;
  }
  for (VertexId v = 0; v < g.vertex_count(); ++v)
    if (!seen[v]) throw Error(ErrorCode::MissingGroup, "no group for node " + g.label(v));
  return groups;
}

GroupReport group_ratio(const Graph& g, const DistanceState& s, const GroupMap& groups) {
  if (groups.size() < g.vertex_count())
    throw Error(ErrorCode::MissingGroup,
                "no group for node " + g.label(static_cast<VertexId>(groups.size())));
  struct Sum {
    double total = 0.0;
    std::size_t count = 0;
    void add(double d) { total += d; ++count; }
    MeanCount finish() const { return {count ? total / static_cast<double>(count) : 0.0, count}; }
  };
  std::map<std::string, std::pair<Sum, Sum>> per_group;
  std::map<std::pair<std::string, std::string>, Sum> per_pair;
  for (VertexId v = 0; v < g.vertex_count(); ++v) per_group[groups[v]];

  GroupReport report;
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const auto& a = groups[g.edge(e).u];
    const auto& b = groups[g.edge(e).v];
    if (a == b) {
      per_group[a].first.add(s[e]);
      ++report.intra_edges;
    } else {
      per_group[a].second.add(s[e]);
      per_group[b].second.add(s[e]);
      per_pair[a < b ? std::pair{a, b} : std::pair{b, a}].add(s[e]);
      ++report.inter_edges;
    }
  }
  for (const auto& [name, sums] : per_group) {
    GroupStats st{sums.first.finish(), sums.second.finish(), std::nullopt};
    if (st.intra.count > 0 && st.inter.count > 0) st.ratio = st.intra.mean / st.inter.mean;
    report.groups.emplace(name, st);
  }
  for (const auto& [key, sum] : per_pair) report.pairs.emplace(key, sum.finish());
  return report;
}

std::string to_json(const GroupReport& report) {
  using nlohmann::ordered_json;
  auto mean_or_null = [](const MeanCount& m) {
    return m.count ? ordered_json(m.mean) : ordered_json(nullptr);
  };
  ordered_json groups = ordered_json::array();
  for (const auto& [name, st] : report.groups) {
    groups.push_back({{"group", name},
                      {"intra_mean", mean_or_null(st.intra)},
                      {"intra_count", st.intra.count},
                      {"inter_mean", mean_or_null(st.inter)},
                      {"inter_count", st.inter.count},
                      {"ratio", st.ratio ? ordered_json(*st.ratio) : ordered_json(nullptr)}});
  }
  ordered_json pairs = ordered_json::array();
  for (const auto& [key, mc] : report.pairs)
    pairs.push_back({{"group_a", key.first}, {"group_b", key.second},
                     {"mean", mean_or_null(mc)}, {"count", mc.count}});
  ordered_json out = {
      {"averaging", "per edge; a group's inter mean covers every inter-group edge incident to it"},
      {"intra_edges", report.intra_edges},
      {"inter_edges", report.inter_edges},
      {"groups", groups},
      {"pairs", pairs}};
  return out.dump(2) + "\n";
}

}  // namespace ricci
