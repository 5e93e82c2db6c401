#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ricci/graph.hpp"

namespace ricci::cli {

/// Runs the command line; returns the process exit code (0 success, 1
/// domain or usage error, 2 I/O error).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Reads an "edge_id,u,v,distance,..." CSV written by `curvature` or `flow`
/// and returns the distances indexed by EdgeId of `g`.
Eigen::VectorXd load_distance_csv(std::istream& in, const Graph& g);

}  // namespace ricci::cli
