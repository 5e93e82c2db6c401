#include "ricci/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <utility>

#include "ricci/error.hpp"

namespace ricci {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t state = seed;
  std::uint64_t mix = splitmix64(state) ^ (stream * 0xD1B54A32D192ED03ull);
  std::uint32_t words[8];
  for (auto& w : words) w = static_cast<std::uint32_t>(splitmix64(mix));
  std::seed_seq seq(std::begin(words), std::end(words));
  engine_.seed(seq);
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::below(std::uint64_t bound) {
  const std::uint64_t limit = (~std::uint64_t{0}) - (~std::uint64_t{0}) % bound;
  for (;;) {
    const std::uint64_t r = engine_();
    if (r < limit) return r % bound;
  }
}

namespace {

void require(bool ok, const char* message) {
  if (!ok) throw Error(ErrorCode::InvalidParams, message);
}

Graph unit_graph(std::size_t n, std::vector<std::pair<VertexId, VertexId>> pairs) {
  for (auto& [a, b] : pairs)
    if (a > b) std::swap(a, b);
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  std::vector<Edge> edges;
  edges.reserve(pairs.size());
  for (auto [a, b] : pairs) edges.push_back({a, b, 1.0});
  return Graph(n, std::move(edges));
}

}  // namespace

Graph random_regular(std::size_t n, std::size_t k, std::uint64_t seed) {
  require(k < n, "regular graph needs k < n");
  require((n * k) % 2 == 0, "regular graph needs n*k even");
  Rng rng(seed);
  std::vector<VertexId> points;
  points.reserve(n * k);
  for (std::size_t attempt = 0; attempt < 100000; ++attempt) {
    points.clear();
    for (VertexId v = 0; v < n; ++v)
      for (std::size_t i = 0; i < k; ++i) points.push_back(v);
    // Fisher-Yates with our own bounded draw so the shuffle is portable.
    for (std::size_t i = points.size(); i > 1; --i)
      std::swap(points[i - 1], points[rng.below(i)]);

    std::vector<std::pair<VertexId, VertexId>> pairs;
    pairs.reserve(points.size() / 2);
    bool clash = false;
    for (std::size_t i = 0; i + 1 < points.size() && !clash; i += 2) {
      auto a = points[i], b = points[i + 1];
      if (a == b) clash = true;
      pairs.emplace_back(std::min(a, b), std::max(a, b));
    }
    if (clash) continue;
    std::sort(pairs.begin(), pairs.end());
    if (std::adjacent_find(pairs.begin(), pairs.end()) != pairs.end()) continue;
    return unit_graph(n, std::move(pairs));
  }
  throw Error(ErrorCode::InvalidParams, "pairing model did not produce a simple graph");
}

Graph erdos_renyi(std::size_t n, double p, std::uint64_t seed) {
  require(p >= 0.0 && p <= 1.0, "probability must lie in [0, 1]");
  Rng rng(seed);
  std::vector<std::pair<VertexId, VertexId>> pairs;
  for (VertexId a = 0; a < n; ++a)
    for (VertexId b = a + 1; b < n; ++b)
      if (rng.uniform() < p) pairs.emplace_back(a, b);
  return unit_graph(n, std::move(pairs));
}

Graph geometric_graph(std::span<const std::array<double, 2>> points, double radius) {
  require(radius > 0.0 && std::isfinite(radius), "radius must be positive");
  const std::size_t n = points.size();
  double lo_x = 0, lo_y = 0, hi = 0;
  if (n > 0) {
    lo_x = hi = points[0][0];
    lo_y = points[0][1];
    double hi_y = lo_y;
    for (const auto& p : points) {
      lo_x = std::min(lo_x, p[0]);
      hi = std::max(hi, p[0]);
      lo_y = std::min(lo_y, p[1]);
      hi_y = std::max(hi_y, p[1]);
    }
    hi = std::max(hi - lo_x, hi_y - lo_y);
  }
  // Grid of cells at least `radius` wide; only neighbouring cells can hold
  // points within range.
  const auto cells = static_cast<std::size_t>(std::clamp(std::floor(hi / radius), 1.0, 1024.0));
  const double cell = std::max(hi / static_cast<double>(cells), radius);
  auto cell_of = [&](double c) { return std::min(cells - 1, static_cast<std::size_t>(c / cell)); };
  std::vector<std::vector<VertexId>> grid(cells * cells);
  std::vector<std::size_t> cx(n), cy(n);
  for (VertexId i = 0; i < n; ++i) {
    cx[i] = cell_of(points[i][0] - lo_x);
    cy[i] = cell_of(points[i][1] - lo_y);
    grid[cx[i] * cells + cy[i]].push_back(i);
  }
  const double r2 = radius * radius;
  std::vector<std::pair<VertexId, VertexId>> pairs;
  for (VertexId i = 0; i < n; ++i) {
    for (std::size_t gx = cx[i] ? cx[i] - 1 : 0; gx <= std::min(cells - 1, cx[i] + 1); ++gx) {
      for (std::size_t gy = cy[i] ? cy[i] - 1 : 0; gy <= std::min(cells - 1, cy[i] + 1); ++gy) {
        for (VertexId j : grid[gx * cells + gy]) {
          if (j <= i) continue;
          const double dx = points[i][0] - points[j][0], dy = points[i][1] - points[j][1];
          if (dx * dx + dy * dy <= r2) pairs.emplace_back(i, j);
        }
      }
    }
  }
  return unit_graph(n, std::move(pairs));
}

Graph geometric_plane(std::size_t n, double radius, double box_side, std::uint64_t seed) {
  require(box_side > 0.0 && std::isfinite(box_side), "box side must be positive");
  Rng rng(seed);
  std::vector<std::array<double, 2>> points(n);
  for (auto& p : points) {
    p[0] = rng.uniform() * box_side;
    p[1] = rng.uniform() * box_side;
  }
  return geometric_graph(points, radius);
}

Graph cylinder_knn(std::size_t n, std::size_t k, double radius, double height,
                   std::uint64_t seed) {
  require(k < n, "kNN graph needs k < n");
  require(radius > 0.0 && height >= 0.0, "cylinder needs positive radius");
  Rng rng(seed);
  struct Point { double x, y, z; };
  std::vector<Point> pts(n);
  for (auto& p : pts) {
    const double theta = rng.uniform() * 2.0 * std::numbers::pi;
    p = {radius * std::cos(theta), radius * std::sin(theta), rng.uniform() * height};
  }
  std::vector<std::pair<VertexId, VertexId>> pairs;
  std::vector<std::pair<double, VertexId>> cand;
  for (VertexId i = 0; i < n; ++i) {
    cand.clear();
    for (VertexId j = 0; j < n; ++j) {
      if (j == i) continue;
      const double dx = pts[i].x - pts[j].x, dy = pts[i].y - pts[j].y, dz = pts[i].z - pts[j].z;
      cand.emplace_back(dx * dx + dy * dy + dz * dz, j);
    }
    std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(k), cand.end());
    for (std::size_t t = 0; t < k; ++t) pairs.emplace_back(i, cand[t].second);
  }
  return unit_graph(n, std::move(pairs));
}

BlockGraph sbm(std::span<const std::size_t> block_sizes, double p_in, double p_out,
               std::uint64_t seed) {
  require(p_out >= 0.0 && p_out <= p_in && p_in <= 1.0, "need 0 <= p_out <= p_in <= 1");
  BlockGraph out;
  for (std::size_t b = 0; b < block_sizes.size(); ++b)
    out.block.insert(out.block.end(), block_sizes[b], b);
  const std::size_t n = out.block.size();
  Rng rng(seed);
  std::vector<std::pair<VertexId, VertexId>> pairs;
  for (VertexId a = 0; a < n; ++a)
    for (VertexId b = a + 1; b < n; ++b)
      if (rng.uniform() < (out.block[a] == out.block[b] ? p_in : p_out)) pairs.emplace_back(a, b);
  out.graph = unit_graph(n, std::move(pairs));
  return out;
}

std::vector<VertexId> largest_component_vertices(const Graph& g) {
  auto comps = connected_components(g);
  if (comps.empty()) return {};
  // Components are ordered by smallest vertex, so the first maximum wins ties.
  auto best = std::max_element(comps.begin(), comps.end(),
                               [](const auto& a, const auto& b) { return a.size() < b.size(); });
  return std::move(*best);
}

Graph largest_component(const Graph& g) {
  const auto vertices = largest_component_vertices(g);
  return induced_subgraph(g, vertices);
}

}  // namespace ricci
