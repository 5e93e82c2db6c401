// Acceptance runner: one PASS/FAIL line per criterion. Pass criterion ids
// (e.g. "C4 C8") to run a subset. Exit status is 1 if any selected criterion
// fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "json.hpp"
#include "ricci/analysis.hpp"
#include "ricci/bench.hpp"
#include "ricci/curvature.hpp"
#include "ricci/flow.hpp"
#include "ricci/generators.hpp"
#include "ricci/transport.hpp"
#include "support.hpp"

using namespace ricci;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string failures;
  std::string notes;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      failures += (failures.empty() ? "" : "; ") + what;
    }
  }
  void note(const std::string& what) { notes += (notes.empty() ? "" : "; ") + what; }
  std::string detail() const { return failures.empty() ? notes : failures + " | measured: " + notes; }
};

struct Criterion {
  std::string id;
  std::string title;
  double budget_seconds;
  std::function<Outcome()> body;
};

std::string fmt(double x, int precision = 6) {
  std::ostringstream ss;
  ss.precision(precision);
  ss << x;
  return ss.str();
}

DistanceState unit(const Graph& g) { return DistanceState::from_weights(g); }

CurvatureConfig curvature_config(unsigned workers = 1) {
  CurvatureConfig cfg;
  cfg.worker_count = workers;
  return cfg;
}

FlowConfig flow_config(std::size_t iterations, double tol = 0.02) {
  FlowConfig cfg;
  cfg.max_iterations = iterations;
  cfg.std_tolerance = tol;
  return cfg;
}

// Unit-weight connected graphs drawn from five generator families.
Graph mixed_family_graph(std::size_t index, Rng& rng) {
  const std::size_t n = 20 + rng.below(181);
  const std::uint64_t seed = 1000 + index;
  switch (index % 5) {
    case 0: {
      std::size_t k = 3 + rng.below(3);
      if ((n * k) % 2 == 1) ++k;
      return largest_component(random_regular(n, k, seed));
    }
    case 1:
      return largest_component(erdos_renyi(n, (1.0 + 2.0 * rng.uniform()) * std::log(double(n)) / double(n), seed));
    case 2: {
      const double radius = std::sqrt((6.0 + 6.0 * rng.uniform()) / (double(n) * 3.14159265358979));
      return largest_component(geometric_plane(n, radius, 1.0, seed));
    }
    case 3:
      return largest_component(cylinder_knn(n, 3 + rng.below(4), 1.0, 6.0, seed));
    default: {
      const std::vector<std::size_t> sizes{n / 3, n / 3, n - 2 * (n / 3)};
      return largest_component(sbm(sizes, 0.3, 0.02, seed).graph);
    }
  }
}

Outcome c1_closed_forms() {
  Outcome o;
  double kn_worst = 0;
  for (std::size_t n : {3, 5, 10}) {
    const auto r = all_curvatures(testing::complete(n), unit(testing::complete(n)), curvature_config());
    const double expected = double(n) / double(n - 1);
    const double err = (r.kappa.array() - expected).abs().maxCoeff();
    kn_worst = std::max(kn_worst, err);
    o.require(err <= 1e-6, "K_" + std::to_string(n) + " max error " + fmt(err));
  }
  o.note("K_3, K_5, K_10 max error " + fmt(kn_worst));
  for (std::size_t k : {3, 10, 100}) {
    for (bool matched : {false, true}) {
      const Graph g = testing::two_star(k, matched);
      const double kappa = all_curvatures(g, unit(g), curvature_config()).kappa[0];
      const double expected = matched ? 0.0 : -2.0;
      o.require(std::abs(kappa - expected) <= 1e-6, std::string(matched ? "matched" : "plain") + " two-star k=" +
                                                         std::to_string(k) + " bridge kappa " + fmt(kappa, 10) +
                                                         " (expected " + fmt(expected) + ")");
    }
  }
  return o;
}

Outcome c2_bounds() {
  Outcome o;
  Rng rng(2);
  double lo = 0, hi = 0;
  std::size_t edges = 0;
  for (std::size_t i = 0; i < 100; ++i) {
    const Graph g = mixed_family_graph(i, rng);
    const auto r = all_curvatures(g, unit(g), curvature_config());
    lo = std::min(lo, r.kappa.minCoeff());
    hi = std::max(hi, r.kappa.maxCoeff());
    edges += g.edge_count();
    o.require(r.kappa.minCoeff() >= -2.0 - 1e-9 && r.kappa.maxCoeff() <= 2.0 + 1e-9,
              "graph " + std::to_string(i) + " outside [-2, 2]");
  }
  o.note(std::to_string(edges) + " edges, kappa in [" + fmt(lo) + ", " + fmt(hi) + "]");
  return o;
}

Outcome c3_primal_dual() {
  Outcome o;
  double worst = 0;
  std::size_t edges = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const std::size_t n = 3 + seed % 8;
    // Half unit weights, half weighted with geodesic edge distances.
    const bool weighted = seed % 2 == 1;
    const Graph g = testing::random_connected(n, 0.35, 500 + seed, weighted ? 0.5 : 1.0, weighted ? 2.0 : 1.0);
    const DistanceState s = testing::metric_state(g, unit(g));
    for (WeightMode mode : {WeightMode::fixed_w, WeightMode::evolving_d}) {
      CurvatureConfig cfg = curvature_config();
      cfg.weight_mode = mode;
      const auto r = all_curvatures(g, s, cfg);
      for (EdgeId e = 0; e < g.edge_count(); ++e) {
        const auto& ed = g.edge(e);
        const double dual = lly_dual_oracle(g, s, std::min(ed.u, ed.v), std::max(ed.u, ed.v), mode);
        worst = std::max(worst, std::abs(r.kappa[e] - dual));
        ++edges;
      }
    }
  }
  o.require(worst <= 1e-6, "max |primal - dual| " + fmt(worst));
  o.note(std::to_string(edges) + " edge evaluations, max |primal - dual| " + fmt(worst));
  return o;
}

Eigen::VectorXd random_measure(Rng& rng, Eigen::Index n) {
  Eigen::VectorXd v(n);
  for (auto& x : v) x = rng.uniform() < 0.15 ? 0.0 : rng.uniform();
  if (v.sum() == 0.0) v[0] = 1.0;
  return v / v.sum();
}

Outcome c4_transport() {
  Outcome o;
  Rng rng(4);
  double worst = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const auto m = static_cast<Eigen::Index>(1 + rng.below(4));
    const auto n = static_cast<Eigen::Index>(1 + rng.below(4));
    TransportProblem<double> p{random_measure(rng, m), random_measure(rng, n), Eigen::MatrixXd(m, n)};
    for (auto& c : p.cost.reshaped()) c = trial % 2 ? std::floor(rng.uniform() * 4.0) * 0.5 : 3.0 * rng.uniform();
    worst = std::max(worst, std::abs(solve(p).total_cost - oracle_cost(p)));
  }
  o.require(worst <= 1e-9, "max |solve - oracle| " + fmt(worst));

  double slack = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 200; ++trial) {
    const auto k = static_cast<Eigen::Index>(2 + rng.below(8));
    Eigen::MatrixXd pts(k, 3);
    for (auto& x : pts.reshaped()) x = rng.uniform();
    Eigen::MatrixXd cost(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
      for (Eigen::Index j = 0; j < k; ++j) cost(i, j) = (pts.row(i) - pts.row(j)).norm();
    const auto a = random_measure(rng, k), b = random_measure(rng, k), c = random_measure(rng, k);
    const double ab = solve(TransportProblem<double>{a, b, cost}).total_cost;
    const double bc = solve(TransportProblem<double>{b, c, cost}).total_cost;
    const double ac = solve(TransportProblem<double>{a, c, cost}).total_cost;
    slack = std::min(slack, ab + bc - ac);
  }
  o.require(slack >= -1e-9, "triangle inequality violated by " + fmt(-slack));
  o.note("max |solve - oracle| " + fmt(worst) + ", min triangle slack " + fmt(slack));
  return o;
}

void check_flow_mean(Outcome& o, const std::string& name, const FlowResult& r) {
  double worst = std::abs(r.state.values().mean() - 1.0);
  for (const auto& rec : r.trace.records) worst = std::max(worst, std::abs(rec.mean_distance - 1.0));
  o.require(worst <= 1e-9, name + " mean distance off by " + fmt(worst));
}

Graph er_2000() {
  const double n = 2000;
  return largest_component(erdos_renyi(2000, 1.05 * std::log(n) / n, 2000));
}

Outcome c5_flow_convergence() {
  Outcome o;
  const Graph reg = random_regular(2000, 3, 2000);
  const auto r = run(reg, unit(reg), flow_config(20, 0.02));
  const double mean = r.last_report.mean;
  o.require(r.converged, "3-regular did not reach std < 0.02 in 20 iterations");
  o.require(mean >= -0.80 && mean <= -0.55, "3-regular mean kappa " + fmt(mean) + " outside [-0.80, -0.55]");
  check_flow_mean(o, "3-regular", r);
  o.note("3-regular: " + std::to_string(r.trace.records.size()) + " iterations, mean kappa " + fmt(mean) +
         ", std " + fmt(r.last_report.std));

  const Graph er = er_2000();
  const auto e = run(er, unit(er), flow_config(30, 0.1));
  o.require(e.converged, "ER did not reach std < 0.1 in 30 iterations");
  check_flow_mean(o, "ER", e);
  o.note("ER (n=" + std::to_string(er.vertex_count()) + "): " + std::to_string(e.trace.records.size()) +
         " iterations, std " + fmt(e.last_report.std));
  return o;
}

// Triples live in the flow's domain: both states are shortest-path metrics
// normalised to mean 1. Perturbations that leave the domain are counted
// separately and reported without affecting the verdict.
Outcome c6_contraction() {
  Outcome o;
  Rng rng(6);
  double worst_ratio = 0;
  int unclosed_expanding = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 4 + rng.below(27);
    const bool weighted = trial % 2 == 1;
    const Graph g = testing::random_connected(n, 0.1 + 0.3 * rng.uniform(), 600 + trial, weighted ? 0.5 : 1.0,
                                              weighted ? 2.0 : 1.0);
    const DistanceState a = rescale(testing::metric_state(g, unit(g)).values()).state;
    Eigen::VectorXd b = a.values();
    const double eps = 0.2 * rng.uniform();
    for (auto& x : b) x *= 1.0 + eps * (2.0 * rng.uniform() - 1.0);
    const DistanceState perturbed = rescale(testing::metric_state(g, DistanceState(b)).values()).state;
    const auto gap = contraction_gap(g, a, perturbed, flow_config(1));
    worst_ratio = std::max(worst_ratio, gap.after / gap.before);
    o.require(gap.after <= gap.before + 1e-9, "triple " + std::to_string(trial) + " (n=" + std::to_string(n) +
                                                   "): L_inf " + fmt(gap.before) + " -> " + fmt(gap.after));

    const auto raw = contraction_gap(g, a, rescale(b).state, flow_config(1));
    if (raw.after > raw.before + 1e-9) ++unclosed_expanding;
  }
  o.note("max after/before " + fmt(worst_ratio, 4) + "; without metric closure " +
         std::to_string(unclosed_expanding) + "/100 perturbations expand");
  return o;
}

Outcome c7_metric_preservation() {
  Outcome o;
  double worst = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Graph g = testing::random_connected(15 + seed * 2, 0.15, 700 + seed, 0.5, 2.0);
    DistanceState s = rescale(testing::metric_state(g, unit(g)).values()).state;
    for (int k = 0; k < 10; ++k) {
      s = step(g, s, flow_config(10)).next;
      const double v = max_triangle_violation(g, s);
      worst = std::max(worst, v);
      o.require(v <= 1e-9, "graph " + std::to_string(seed) + " iteration " + std::to_string(k + 1) +
                               " violation " + fmt(v));
    }
  }
  o.note("max triangle violation " + fmt(worst));
  return o;
}

Outcome c8_scale_free() {
  Outcome o;
  Rng rng(8);
  double worst = 0;
  for (std::size_t i = 0; i < 20; ++i) {
    const Graph g = i % 2 ? mixed_family_graph(i, rng) : testing::random_connected(30 + i, 0.1, 800 + i, 0.3, 3.0);
    const DistanceState s = unit(g);
    const auto base = all_curvatures(g, s, curvature_config());
    for (double beta : {0.1, 3.7, 100.0}) {
      const auto scaled = all_curvatures(g, scale_distances(s, beta), curvature_config());
      worst = std::max(worst, (scaled.kappa - base.kappa).cwiseAbs().maxCoeff());
    }
  }
  o.require(worst <= 1e-9, "max kappa change " + fmt(worst));
  o.note("max kappa change " + fmt(worst));
  return o;
}

Outcome c9_methods() {
  Outcome o;
  const unsigned workers = 4;
  const std::vector<std::pair<std::string, Graph>> graphs{{"er", er_2000()},
                                                          {"regular3", random_regular(2000, 3, 2000)}};
  for (const auto& [name, g] : graphs) {
    const DistanceState s = unit(g);
    const auto a = bench_curvature_pass(g, s, BenchMethod::sssd_per_edge, workers, name);
    const auto b = bench_curvature_pass(g, s, BenchMethod::ssmd_no_arrangement, workers, name);
    const auto c = bench_curvature_pass(g, s, BenchMethod::ssmd_arrangement, workers, name);
    const double ratio = double(a.settled_vertices) / double(c.settled_vertices);
    const double diff = std::max((a.kappa - c.kappa).cwiseAbs().maxCoeff(), (b.kappa - c.kappa).cwiseAbs().maxCoeff());
    o.require(ratio >= 5.0, name + " settled ratio a/c " + fmt(ratio));
    o.require(c.wall_seconds < b.wall_seconds && b.wall_seconds < a.wall_seconds,
              name + " wall order violated: a " + fmt(a.wall_seconds) + " b " + fmt(b.wall_seconds) + " c " +
                  fmt(c.wall_seconds));
    o.require(diff <= 1e-9, name + " kappa differs by " + fmt(diff));
    o.note(name + " (n=" + std::to_string(g.vertex_count()) + ", m=" + std::to_string(g.edge_count()) +
           "): settled a/c " + fmt(ratio, 4) + ", b/c " +
           fmt(double(b.settled_vertices) / double(c.settled_vertices), 4) + ", wall a " + fmt(a.wall_seconds, 3) + " b " +
           fmt(b.wall_seconds, 3) + " c " + fmt(c.wall_seconds, 3) + " s");
  }
  return o;
}

std::string slurp(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// Drops the wall_seconds column, the only timing-dependent field.
std::string bench_without_wall(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string x; std::getline(ss, x, ',');) f.push_back(x);
    f.erase(f.begin() + 6);
    for (std::size_t i = 0; i < f.size(); ++i) out += (i ? "," : "") + f[i];
    out += "\n";
  }
  return out;
}

// Manifest minus the fields that legitimately differ between two runs.
nlohmann::json comparable_manifest(const fs::path& path) {
  auto m = nlohmann::json::parse(slurp(path.string() + ".manifest.json"));
  m.erase("wall_seconds");
  m.erase("outputs");
  m["parameters"].erase("out");
  return m;
}

Outcome c10_determinism() {
  Outcome o;
  const fs::path root = fs::temp_directory_path() / "ricci_acceptance_c10";
  fs::remove_all(root);
  fs::create_directories(root);
  std::ostringstream sink;
  auto cli = [&](std::vector<std::string> args) {
    const int rc = cli::run(args, sink, sink);
    o.require(rc == 0, "command failed: " + args.front() + " " + args[1]);
  };
  auto same = [&](const fs::path& a, const fs::path& b) {
    o.require(fs::exists(a) && slurp(a) == slurp(b), a.filename().string() + " differs from " +
                                                         b.filename().string());
  };

  const std::vector<std::vector<std::string>> families{
      {"--family", "regular", "--n", "300", "--k", "3"},
      {"--family", "erdos-renyi", "--n", "300", "--p", "0.03", "--largest-component"},
      {"--family", "geometric-plane", "--n", "300", "--radius", "0.1", "--largest-component"},
      {"--family", "geometric-cylinder-knn", "--n", "300", "--k", "4", "--radius", "1", "--height", "6",
       "--largest-component"},
      {"--family", "sbm", "--sizes", "100,100,100", "--p-in", "0.08", "--p-out", "0.01", "--largest-component"}};
  std::size_t files = 0;
  for (std::size_t f = 0; f < families.size(); ++f) {
    const std::string stem = "g" + std::to_string(f);
    for (const char* rep : {"a", "b"}) {
      std::vector<std::string> args{"generate"};
      args.insert(args.end(), families[f].begin(), families[f].end());
      args.insert(args.end(), {"--seed", "17", "--out", (root / (stem + rep + ".tsv")).string()});
      cli(args);
    }
    same(root / (stem + "a.tsv"), root / (stem + "b.tsv"));
    o.require(comparable_manifest(root / (stem + "a.tsv")) == comparable_manifest(root / (stem + "b.tsv")),
              stem + " manifests differ");
    files += 1;
    const std::string graph = (root / (stem + "a.tsv")).string();

    for (const char* threads : {"1", "8"}) {
      const std::string tag = stem + "_t" + threads;
      cli({"curvature", "--graph", graph, "--out", (root / (tag + "_c")).string(), "--threads", threads});
      cli({"flow", "--graph", graph, "--out", (root / (tag + "_f")).string(), "--threads", threads, "--max-iters",
           "5"});
      cli({"analyze", "backbone", "--graph", graph, "--distances", (root / (tag + "_f.distances.csv")).string(),
           "--threshold", "1.2", "--out", (root / (tag + "_bb.tsv")).string()});
      if (f == 4)
        cli({"analyze", "groups", "--graph", graph, "--distances", (root / (tag + "_f.distances.csv")).string(),
             "--groups", graph + ".groups.csv", "--out", (root / (tag + "_groups.json")).string()});
      if (f == 0)
        cli({"bench", "--graph", graph, "--out", (root / (tag + "_bench.csv")).string(), "--threads", threads,
             "--repeats", "1"});
    }
    for (const char* suffix : {"_c.curvature.csv", "_c.summary.json", "_f.distances.csv", "_f.trace.csv",
                               "_f.summary.json", "_bb.tsv"}) {
      same(root / (stem + "_t1" + suffix), root / (stem + "_t8" + suffix));
      ++files;
    }
    if (f == 4) {
      same(root / (stem + "_t1_groups.json"), root / (stem + "_t8_groups.json"));
      same(root / (stem + "a.tsv.groups.csv"), root / (stem + "b.tsv.groups.csv"));
      files += 2;
    }
    if (f == 0) {
      const auto a = bench_without_wall(slurp(root / (stem + "_t1_bench.csv")));
      const auto b = bench_without_wall(slurp(root / (stem + "_t8_bench.csv")));
      o.require(a == b, "bench CSV differs outside wall_seconds");
      ++files;
    }
  }
  o.note(std::to_string(files) + " output comparisons across 5 families");
  fs::remove_all(root);
  return o;
}

Outcome c11_analysis() {
  Outcome o;
  const Graph g = testing::from_pairs(6, {{0, 1}, {1, 2}, {0, 2}, {2, 3}, {3, 4}, {4, 5}, {3, 5}});
  const DistanceState s((Eigen::VectorXd(7) << 0.5, 0.5, 0.5, 2.0, 0.5, 0.5, 0.5).finished());
  const auto report = group_ratio(g, s, GroupMap{"A", "A", "A", "B", "B", "B"});
  for (const char* name : {"A", "B"}) {
    const auto& ratio = report.groups.at(name).ratio;
    o.require(ratio && std::abs(*ratio - 0.25) <= 1e-12,
              std::string("group ") + name + " ratio " + (ratio ? fmt(*ratio) : "undefined"));
  }

  const Graph h = largest_component(erdos_renyi(60, 0.1, 11));
  const DistanceState flowed = run(h, unit(h), flow_config(5)).state;
  std::vector<EdgeId> previous = backbone(h, flowed, 0.0);
  for (int i = 1; i <= 10; ++i) {
    const auto current = backbone(h, flowed, 0.15 * i);
    o.require(std::includes(previous.begin(), previous.end(), current.begin(), current.end()),
              "backbone not nested at threshold " + fmt(0.15 * i));
    previous = current;
  }
  o.note("ratios 0.25/0.25, backbone nested over 10 thresholds");
  return o;
}

Outcome c12_sbm() {
  Outcome o;
  const std::vector<std::size_t> sizes{200, 200, 200};
  const BlockGraph bg = sbm(sizes, 0.1675, 0.05, 12);
  o.require(validate_connected(bg.graph), "SBM sample is not connected");
  if (!o.pass) return o;
  const auto r = run(bg.graph, unit(bg.graph), flow_config(100));
  o.require(r.converged, "flow did not converge");
  GroupMap groups;
  for (auto b : bg.block) groups.push_back(std::to_string(b));
  const auto report = group_ratio(bg.graph, r.state, groups);
  for (const auto& [pair, stats] : report.pairs) {
    const double inter = stats.mean;
    const double intra = std::max(report.groups.at(pair.first).intra.mean, report.groups.at(pair.second).intra.mean);
    o.require(inter > intra, "pair " + pair.first + "-" + pair.second + " inter " + fmt(inter) +
                                 " <= intra " + fmt(intra));
    o.note(pair.first + "-" + pair.second + " inter " + fmt(inter, 4));
  }
  for (const auto& [name, st] : report.groups) o.note(name + " intra " + fmt(st.intra.mean, 4));
  o.require(report.pairs.size() == 3, "expected 3 block pairs, got " + std::to_string(report.pairs.size()));
  o.note(std::to_string(bg.graph.edge_count()) + " edges, " + std::to_string(r.trace.records.size()) +
         " iterations");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {"C1", "closed-form curvature", 1, c1_closed_forms},
      {"C2", "curvature bounds", 60, c2_bounds},
      {"C3", "primal/dual equivalence", 60, c3_primal_dual},
      {"C4", "transport correctness", 60, c4_transport},
      {"C5", "flow convergence", 600, c5_flow_convergence},
      {"C6", "contraction", 300, c6_contraction},
      {"C7", "metric preservation", 300, c7_metric_preservation},
      {"C8", "scale-freeness", 60, c8_scale_free},
      {"C9", "distance-matrix methods", 600, c9_methods},
      {"C10", "determinism", 300, c10_determinism},
      {"C11", "analysis fixtures", 1, c11_analysis},
      {"C12", "SBM block separation", 600, c12_sbm},
  };
  const std::set<std::string> selected(argv + 1, argv + argc);
  int failures = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.require(seconds < c.budget_seconds, "runtime " + fmt(seconds, 3) + " s over budget " +
                                              fmt(c.budget_seconds) + " s");
    failures += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS " : "FAIL ") << c.id << " " << c.title << " (" << fmt(seconds, 3)
              << " s): " << o.detail() << std::endl;
  }
  std::cout << (failures ? "FAILED " : "ALL PASSED ") << failures << " failing criteria" << std::endl;
  return failures ? 1 : 0;
}
