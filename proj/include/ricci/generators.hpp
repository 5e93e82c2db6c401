#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "ricci/graph.hpp"

namespace ricci {

/// Seeded random source. The engine is std::mt19937_64, whose output
/// sequence is fixed by the standard; seeding goes through SplitMix64 so
/// that (seed, stream) pairs give independent, well-mixed states. Uniform
/// reals are built from the top 53 bits instead of std distributions, whose
/// algorithms vary between standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, 1).
  double uniform();
  /// Uniform integer in [0, bound), bound > 0. Rejection sampling, unbiased.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t& state);

/// Simple k-regular graph from the pairing model, restarting on self-loops
/// or repeated pairs. Throws InvalidParams when n*k is odd or k >= n.
Graph random_regular(std::size_t n, std::size_t k, std::uint64_t seed);

Graph erdos_renyi(std::size_t n, double p, std::uint64_t seed);

/// Points of the plane joined when their distance is <= radius.
Graph geometric_graph(std::span<const std::array<double, 2>> points, double radius);

/// n uniform points in [0, box_side]^2 joined when their distance is <= radius.
Graph geometric_plane(std::size_t n, double radius, double box_side, std::uint64_t seed);

/// n uniform points on the lateral surface of a cylinder, each joined to its
/// k nearest points by 3-D chordal distance; an edge exists when either
/// endpoint selects the other.
Graph cylinder_knn(std::size_t n, std::size_t k, double radius, double height,
                   std::uint64_t seed);

struct BlockGraph {
  Graph graph;
  std::vector<std::size_t> block;  // block index per vertex
};

/// Stochastic block model; vertices are numbered block by block.
BlockGraph sbm(std::span<const std::size_t> block_sizes, double p_in, double p_out,
               std::uint64_t seed);

/// Sorted vertices of the largest component; ties go to the component that
/// contains the smallest vertex.
std::vector<VertexId> largest_component_vertices(const Graph& g);

/// Induced subgraph on the largest component; original labels are kept.
Graph largest_component(const Graph& g);

}  // namespace ricci
