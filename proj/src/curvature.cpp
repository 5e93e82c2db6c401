#include "ricci/curvature.hpp"

#include <cmath>
#include <string>

#include "ricci/detail/dense_simplex.hpp"
#include "ricci/error.hpp"
#include "ricci/transport.hpp"

namespace ricci {

std::string_view to_string(WeightMode mode) {
  return mode == WeightMode::fixed_w ? "fixed-w" : "evolving-d";
}

WeightMode parse_weight_mode(std::string_view text) {
  if (text == "fixed-w") return WeightMode::fixed_w;
  if (text == "evolving-d") return WeightMode::evolving_d;
  throw Error(ErrorCode::InvalidParams, "unknown weight mode '" + std::string(text) + "'");
}

void CurvatureConfig::validate() const {
  if (!(alpha0 >= 0.5 && alpha0 < 1.0))
    throw Error(ErrorCode::InvalidParams, "alpha0 must lie in [0.5, 1)");
  if (slope_check_alpha && !(*slope_check_alpha >= 0.0 && *slope_check_alpha < alpha0))
    throw Error(ErrorCode::InvalidParams, "slope-check alpha must lie in [0, alpha0)");
}

namespace {

double edge_weight(const Graph& g, const DistanceState& s, EdgeId e, WeightMode mode) {
  return mode == WeightMode::fixed_w ? g.edge(e).weight : s[e];
}

MassDistribution vertex_measure(const Graph& g, const DistanceState& s, VertexId x, double alpha,
                                WeightMode mode) {
  MassDistribution out;
  const auto nbrs = g.neighbors(x);
  double total = 0.0;
  bool usable = false;
  for (const Neighbor& nb : nbrs) {
    const double w = edge_weight(g, s, nb.edge, mode);
    total += w;
    usable = usable || w >= kDistanceFloor;
  }
  if (alpha < 1.0 && !usable)
    throw Error(ErrorCode::DegenerateNeighborhood, "vertex '" + g.label(x) + "'");

  std::vector<double> mass;
  out.support.reserve(nbrs.size() + 1);
  mass.reserve(nbrs.size() + 1);
  if (alpha > 0.0) {
    out.support.push_back(x);
    mass.push_back(alpha);
  }
  if (alpha < 1.0) {
    for (const Neighbor& nb : nbrs) {
      const double m = (1.0 - alpha) * edge_weight(g, s, nb.edge, mode) / total;
      if (m > 0.0) {
        out.support.push_back(nb.vertex);
        mass.push_back(m);
      }
    }
  }
  out.mass = Eigen::Map<Eigen::VectorXd>(mass.data(), static_cast<Eigen::Index>(mass.size()));
  return out;
}

Eigen::MatrixXd support_costs(const DistanceMatrix& dm, const MassDistribution& mu,
                              const MassDistribution& nu) {
  Eigen::MatrixXd cost(mu.mass.size(), nu.mass.size());
  for (std::size_t i = 0; i < mu.support.size(); ++i) {
    const auto r = dm.row_of(mu.support[i]);
    if (!r) throw Error(ErrorCode::IncompleteMatrix, "no row for source vertex " + std::to_string(mu.support[i]));
    for (std::size_t j = 0; j < nu.support.size(); ++j) {
      const auto c = dm.col_of(nu.support[j]);
      if (!c) throw Error(ErrorCode::IncompleteMatrix, "no column for destination vertex " + std::to_string(nu.support[j]));
      cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = dm.values()(*r, *c);
    }
  }
  return cost;
}

EdgeId require_edge(const Graph& g, VertexId x, VertexId y) {
  const auto e = g.find_edge(x, y);
  if (!e) throw Error(ErrorCode::InvalidParams, "vertices are not adjacent");
  return *e;
}

}  // namespace

std::pair<MassDistribution, MassDistribution> edge_distributions(const Graph& g, const DistanceState& s,
                                                                 VertexId x, VertexId y, double alpha,
                                                                 WeightMode mode) {
  require_edge(g, x, y);
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(ErrorCode::InvalidParams, "alpha must lie in [0, 1]");
  return {vertex_measure(g, s, x, alpha, mode), vertex_measure(g, s, y, alpha, mode)};
}

std::pair<MassDistribution, MassDistribution> edge_distributions(const Graph& g, const DistanceState& s,
                                                                 EdgeId e, double alpha, WeightMode mode) {
  return edge_distributions(g, s, g.edge(e).u, g.edge(e).v, alpha, mode);
}

double alpha_curvature(const Graph& g, const DistanceState& s, VertexId x, VertexId y, double alpha,
                       const DistanceMatrix& dm, WeightMode mode) {
  const EdgeId e = require_edge(g, x, y);
  const double d = s[e];
  if (d < kDistanceFloor) throw Error(ErrorCode::InvalidDistance, "edge distance below the floor");
  auto [mu, nu] = edge_distributions(g, s, x, y, alpha, mode);
  Eigen::MatrixXd cost = support_costs(dm, mu, nu);
  TransportProblem<double> problem{std::move(mu.mass), std::move(nu.mass), std::move(cost)};
  return 1.0 - solve(problem).total_cost / d;
}

LlyCurvature lly_curvature(const Graph& g, const DistanceState& s, VertexId x, VertexId y,
                           const DistanceMatrix& dm, const CurvatureConfig& cfg) {
  LlyCurvature out;
  out.kappa = alpha_curvature(g, s, x, y, cfg.alpha0, dm, cfg.weight_mode) / (1.0 - cfg.alpha0);
  if (cfg.slope_check_alpha) {
    const double a = *cfg.slope_check_alpha;
    out.check_kappa = alpha_curvature(g, s, x, y, a, dm, cfg.weight_mode) / (1.0 - a);
    out.segment_warning = std::abs(*out.check_kappa - out.kappa) > 1e-6;
  }
  return out;
}

double lly_dual_oracle(const Graph& g, const DistanceState& s, VertexId x, VertexId y, WeightMode mode) {
  const std::size_t n = g.vertex_count();
  if (n > 200) throw Error(ErrorCode::OracleTooLarge, "dual oracle is limited to 200 vertices");
  const EdgeId exy = require_edge(g, x, y);
  const double dxy = s[exy];

  DijkstraEngine engine(g);
  const Eigen::VectorXd from_x = engine.all_distances(s, x);
  const Eigen::VectorXd from_y = engine.all_distances(s, y);
  if (!from_x.allFinite()) throw Error(ErrorCode::NotConnected, "dual oracle needs a connected graph");
  if (from_x[y] < dxy - 1e-12 * std::max(1.0, dxy))
    throw Error(ErrorCode::DualInfeasible, "edge distance exceeds the shortest path between its endpoints");

  // Shift f by the feasible potential L(v) = max(-D(x,v), d(x,y) - D(y,v)) so
  // the remaining variables are non-negative and the origin is feasible.
  Eigen::VectorXd base(static_cast<Eigen::Index>(n));
  std::vector<Eigen::Index> var(n, -1);
  Eigen::Index vars = 0;
  for (VertexId v = 0; v < n; ++v) {
    if (v == x) {
      base[v] = 0.0;
    } else if (v == y) {
      base[v] = dxy;
    } else {
      base[v] = std::max(-from_x[v], dxy - from_y[v]);
      var[v] = vars++;
    }
  }

  // Objective (Lap f(x) - Lap f(y)) / d(x,y) as coefficients on f.
  Eigen::VectorXd coef = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  auto add_laplacian = [&](VertexId center, double sign) {
    double total = 0.0;
    for (const Neighbor& nb : g.neighbors(center)) total += edge_weight(g, s, nb.edge, mode);
    for (const Neighbor& nb : g.neighbors(center))
      coef[nb.vertex] += sign * edge_weight(g, s, nb.edge, mode) / total / dxy;
    coef[center] -= sign / dxy;
  };
  add_laplacian(x, 1.0);
  add_laplacian(y, -1.0);

  // Rows g_a - g_b <= rhs; a variable index of -1 marks a fixed endpoint.
  std::vector<std::pair<Eigen::Index, Eigen::Index>> row_vars;
  std::vector<double> rhs;
  for (EdgeId id = 0; id < g.edge_count(); ++id) {
    const Edge& e = g.edge(id);
    const double d = s[id];
    for (auto [a, b] : {std::pair{e.u, e.v}, std::pair{e.v, e.u}}) {
      double r = d - base[a] + base[b];
      if (var[a] < 0 && var[b] < 0) {
        if (r < -1e-9) throw Error(ErrorCode::DualInfeasible, "fixed endpoints violate the Lipschitz bound");
        continue;
      }
      if (r < 0.0) {
        if (r < -1e-9) throw Error(ErrorCode::DualInfeasible, "shifted potential is not Lipschitz");
        r = 0.0;
      }
      row_vars.emplace_back(var[a], var[b]);
      rhs.push_back(r);
    }
  }

  const auto m = static_cast<Eigen::Index>(rhs.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, vars);
  Eigen::VectorXd b(m);
  for (Eigen::Index r = 0; r < m; ++r) {
    const auto [va, vb] = row_vars[static_cast<std::size_t>(r)];
    if (va >= 0) A(r, va) += 1.0;
    if (vb >= 0) A(r, vb) -= 1.0;
    b[r] = rhs[static_cast<std::size_t>(r)];
  }
  Eigen::VectorXd c(vars);
  double constant = 0.0;
  for (VertexId v = 0; v < n; ++v) {
    constant += coef[v] * base[v];
    if (var[v] >= 0) c[var[v]] = -coef[v];
  }
  if (vars == 0) return constant;
  const auto lp = detail::maximize_feasible_origin<double>(A, b, c);
  return constant - lp.objective;
}

CurvatureReport all_curvatures(const Graph& g, const DistanceState& s, const CurvatureConfig& cfg) {
  cfg.validate();
  if (s.size() != g.edge_count()) throw Error(ErrorCode::InvalidParams, "distance state size mismatch");
  if (!validate_connected(g)) throw Error(ErrorCode::NotConnected, "curvature needs a connected graph");

  const auto tasks = cfg.path_method == PathMethod::ssmd_vertex_arranged ? build_tasks(g) : build_edge_tasks(g);
  const MatrixMethod method =
      cfg.path_method == PathMethod::sssd_per_edge ? MatrixMethod::sssd_per_cell : MatrixMethod::ssmd;
  const unsigned workers = cfg.worker_count == 0 ? default_worker_count() : cfg.worker_count;

  std::vector<DijkstraEngine> engines(workers, DijkstraEngine(g));
  std::vector<PathCounters> counters(workers);
  const auto per_edge = run_tasks_parallel<LlyCurvature>(
      tasks, g.edge_count(), workers, [&](const CurvatureTask& task, unsigned worker) {
        const DistanceMatrix dm = compute_distance_matrix(engines[worker], s, task.sources, task.destinations,
                                                          method, &counters[worker]);
        std::vector<LlyCurvature> out;
        out.reserve(task.edges.size());
        for (EdgeId e : task.edges)
          out.push_back(lly_curvature(g, s, task.init_vertex, g.edge(e).other(task.init_vertex), dm, cfg));
        return out;
      });

  CurvatureReport report;
  report.alpha_used = cfg.alpha0;
  report.weight_mode = cfg.weight_mode;
  report.clamp_events = s.floored_count();
  report.kappa.resize(static_cast<Eigen::Index>(g.edge_count()));
  double sum = 0.0;
  for (std::size_t e = 0; e < per_edge.size(); ++e) {
    report.kappa[static_cast<Eigen::Index>(e)] = per_edge[e].kappa;
    sum += per_edge[e].kappa;
    if (per_edge[e].segment_warning) ++report.segment_warnings;
  }
  const double count = static_cast<double>(per_edge.size());
  report.mean = per_edge.empty() ? 0.0 : sum / count;
  double sq = 0.0;
  for (std::size_t e = 0; e < per_edge.size(); ++e) {
    const double dev = per_edge[e].kappa - report.mean;
    sq += dev * dev;
  }
  report.std = per_edge.empty() ? 0.0 : std::sqrt(sq / count);
  for (const PathCounters& c : counters) report.counters += c;
  return report;
}

}  // namespace ricci
