#include "cli.hpp"

#include <chrono>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "ricci/analysis.hpp"
#include "ricci/bench.hpp"
#include "ricci/curvature.hpp"
#include "ricci/error.hpp"
#include "ricci/flow.hpp"
#include "ricci/generators.hpp"

#ifndef RICCI_VERSION
#define RICCI_VERSION "0.0.0"
#endif

namespace ricci::cli {

namespace {

using json = nlohmann::ordered_json;

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  f << content;
  if (!f.flush()) throw Error(ErrorCode::Io, "failed writing '" + path + "'");
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

/// Collects outputs of one invocation and writes a manifest next to each.
class Run {
 public:
  Run(std::string subcommand, json parameters, std::optional<std::uint64_t> seed,
      std::vector<std::string> inputs)
      : subcommand_(std::move(subcommand)),
        parameters_(std::move(parameters)),
        seed_(seed),
        inputs_(std::move(inputs)),
        start_(std::chrono::steady_clock::now()) {}

  void output(const std::string& path, const std::string& content) {
    write_file(path, content);
    outputs_.push_back(path);
  }

  void finish() const {
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    json manifest = {{"subcommand", subcommand_},
                     {"parameters", parameters_},
                     {"seed", seed_ ? json(*seed_) : json(nullptr)},
                     {"inputs", inputs_},
                     {"outputs", outputs_},
                     {"version", RICCI_VERSION},
                     {"wall_seconds", wall}};
    const std::string text = manifest.dump(2) + "\n";
    for (const auto& path : outputs_) write_file(path + ".manifest.json", text);
  }

 private:
  std::string subcommand_;
  json parameters_;
  std::optional<std::uint64_t> seed_;
  std::vector<std::string> inputs_;
  std::vector<std::string> outputs_;
  std::chrono::steady_clock::time_point start_;
};

std::string curvature_csv(const Graph& g, const DistanceState& s, const Eigen::VectorXd& kappa) {
  std::string out = "edge_id,u,v,distance,kappa\n";
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edge(e);
    out += std::to_string(e) + "," + g.label(ed.u) + "," + g.label(ed.v) + "," + format_real(s[e]) + "," +
           format_real(kappa[e]) + "\n";
  }
  return out;
}

json curvature_summary(const CurvatureReport& r) {
  return {{"alpha0", r.alpha_used},
          {"weight_mode", std::string(to_string(r.weight_mode))},
          {"mean", r.mean},
          {"std", r.std},
          {"clamp_events", r.clamp_events},
          {"segment_warnings", r.segment_warnings}};
}

std::string edge_list_text(const Graph& g, const Eigen::VectorXd* weights = nullptr) {
  std::ostringstream ss;
  save_edge_list(ss, g, weights);
  return ss.str();
}

struct CurvatureFlags {
  double alpha = 0.99;
  double slope_alpha = 0.97;
  bool no_slope_check = false;
  std::string weight_mode = "fixed-w";
  unsigned threads = 0;

  void add(CLI::App* app) {
    app->add_option("--alpha", alpha, "Idleness at which the limit-free curvature is evaluated")
        ->capture_default_str();
    app->add_option("--slope-alpha", slope_alpha, "Second idleness for the linear-segment check")
        ->capture_default_str();
    app->add_flag("--no-slope-check", no_slope_check, "Skip the linear-segment check");
    app->add_option("--weight-mode", weight_mode, "fixed-w or evolving-d")->capture_default_str();
    app->add_option("--threads", threads, "Worker threads (0: hardware concurrency)")
        ->envname("RICCI_THREADS")
        ->capture_default_str();
  }

  CurvatureConfig config() const {
    CurvatureConfig cfg;
    cfg.alpha0 = alpha;
    cfg.slope_check_alpha = no_slope_check ? std::nullopt : std::optional<double>(slope_alpha);
    cfg.weight_mode = parse_weight_mode(weight_mode);
    cfg.worker_count = threads;
    cfg.validate();
    return cfg;
  }

  json to_json() const {
    return {{"alpha", alpha},
            {"slope_alpha", no_slope_check ? json(nullptr) : json(slope_alpha)},
            {"weight_mode", weight_mode},
            {"threads", threads}};
  }
};

struct GenerateFlags {
  std::string family;
  std::optional<std::size_t> n, k;
  std::optional<double> p, radius;
  double box_side = 1.0;
  double height = 1.0;
  std::vector<std::size_t> sizes;
  std::optional<double> p_in, p_out;
  std::uint64_t seed = 1;
  bool largest = false;
  std::string out;
};

template <class T>
T need(const std::optional<T>& value, const char* flag, const std::string& family) {
  if (!value) throw Error(ErrorCode::InvalidParams, std::string(flag) + " is required for family " + family);
  return *value;
}

void cmd_generate(const GenerateFlags& f) {
  json params = {{"family", f.family}, {"largest_component", f.largest}, {"out", f.out}};
  auto put = [&](const char* key, const auto& opt) {
    if (opt) params[key] = *opt;
  };
  put("n", f.n);
  put("k", f.k);
  put("p", f.p);
  put("radius", f.radius);
  params["box_side"] = f.box_side;
  params["height"] = f.height;
  if (!f.sizes.empty()) params["sizes"] = f.sizes;
  put("p_in", f.p_in);
  put("p_out", f.p_out);

  Run run("generate", params, f.seed, {});
  Graph g;
  std::vector<std::size_t> block;
  if (f.family == "regular") {
    g = random_regular(need(f.n, "--n", f.family), need(f.k, "--k", f.family), f.seed);
  } else if (f.family == "erdos-renyi") {
    g = erdos_renyi(need(f.n, "--n", f.family), need(f.p, "--p", f.family), f.seed);
  } else if (f.family == "geometric-plane") {
    g = geometric_plane(need(f.n, "--n", f.family), need(f.radius, "--radius", f.family), f.box_side, f.seed);
  } else if (f.family == "geometric-cylinder-knn") {
    g = cylinder_knn(need(f.n, "--n", f.family), need(f.k, "--k", f.family), f.radius.value_or(1.0),
                     f.height, f.seed);
  } else if (f.family == "sbm") {
    if (f.sizes.empty()) throw Error(ErrorCode::InvalidParams, "--sizes is required for family sbm");
    auto bg = sbm(f.sizes, need(f.p_in, "--p-in", f.family), need(f.p_out, "--p-out", f.family), f.seed);
    g = std::move(bg.graph);
    block = std::move(bg.block);
  } else {
    throw Error(ErrorCode::InvalidParams, "unknown family '" + f.family + "'");
  }

  std::vector<VertexId> kept(g.vertex_count());
  for (VertexId v = 0; v < kept.size(); ++v) kept[v] = v;
  if (f.largest) {
    kept = largest_component_vertices(g);
    g = induced_subgraph(g, kept);
  }
  run.output(f.out, edge_list_text(g));
  if (!block.empty()) {
    std::string groups = "node,group\n";
    for (VertexId v = 0; v < g.vertex_count(); ++v)
      groups += g.label(v) + "," + std::to_string(block[kept[v]]) + "\n";
    run.output(f.out + ".groups.csv", groups);
  }
  run.finish();
}

void cmd_curvature(const std::string& graph_path, const CurvatureFlags& flags, const std::string& out) {
  json params = flags.to_json();
  params["graph"] = graph_path;
  params["out"] = out;
  Run run("curvature", params, std::nullopt, {graph_path});
  const Graph g = load_edge_list_file(graph_path);
  const DistanceState s = DistanceState::from_weights(g);
  const CurvatureReport report = all_curvatures(g, s, flags.config());
  run.output(out + ".curvature.csv", curvature_csv(g, s, report.kappa));
  run.output(out + ".summary.json", curvature_summary(report).dump(2) + "\n");
  run.finish();
}

void cmd_flow(const std::string& graph_path, const CurvatureFlags& flags, std::size_t max_iters, double tol,
              const std::string& out) {
  json params = flags.to_json();
  params["graph"] = graph_path;
  params["max_iters"] = max_iters;
  params["tol"] = tol;
  params["out"] = out;
  Run run("flow", params, std::nullopt, {graph_path});
  FlowConfig cfg;
  cfg.max_iterations = max_iters;
  cfg.std_tolerance = tol;
  cfg.curvature = flags.config();
  cfg.validate();
  const Graph g = load_edge_list_file(graph_path);
  const FlowResult result = ricci::run(g, DistanceState::from_weights(g), cfg);
  // Without convergence the returned state has not been evaluated yet.
  const CurvatureReport final_report =
      result.converged ? result.last_report : all_curvatures(g, result.state, cfg.curvature);

  std::string trace = "iteration,mean_kappa,std_kappa,std_distance,linf_step,clamp_events\n";
  for (const auto& r : result.trace.records)
    trace += std::to_string(r.iteration) + "," + format_real(r.mean_kappa) + "," + format_real(r.std_kappa) + "," +
             format_real(r.std_distance) + "," + format_real(r.linf_step) + "," + std::to_string(r.clamp_events) +
             "\n";
  json summary = curvature_summary(final_report);
  summary["converged"] = result.converged;
  summary["iterations"] = result.trace.records.size();
  summary["settling_violations"] = result.trace.settling_violations;

  run.output(out + ".distances.csv", curvature_csv(g, result.state, final_report.kappa));
  run.output(out + ".trace.csv", trace);
  run.output(out + ".summary.json", summary.dump(2) + "\n");
  run.finish();
}

void cmd_bench(const std::string& graph_path, const std::vector<std::string>& methods_in, unsigned threads,
               std::size_t repeats, std::string name, const std::string& out, bool no_slope_check) {
  if (name.empty()) {
    name = graph_path.substr(graph_path.find_last_of('/') + 1);
    name = name.substr(0, name.find('.'));
  }
  json params = {{"graph", graph_path}, {"methods", methods_in}, {"threads", threads},
                 {"repeats", repeats},  {"name", name},         {"no_slope_check", no_slope_check},
                 {"out", out}};
  Run run("bench", params, std::nullopt, {graph_path});
  std::vector<BenchMethod> methods;
  for (const auto& m : methods_in) {
    if (m == "all") {
      methods = {BenchMethod::sssd_per_edge, BenchMethod::ssmd_no_arrangement, BenchMethod::ssmd_arrangement};
      break;
    }
    methods.push_back(parse_bench_method(m));
  }
  const Graph g = load_edge_list_file(graph_path);
  const DistanceState s = DistanceState::from_weights(g);
  CurvatureConfig cfg;
  if (no_slope_check) cfg.slope_check_alpha.reset();

  std::string csv = std::string(kBenchCsvHeader) + "\n";
  std::optional<Eigen::VectorXd> reference;
  for (BenchMethod m : methods) {
    const BenchResult r = bench_curvature_pass(g, s, m, threads, name, repeats, cfg);
    if (!reference) {
      reference = r.kappa;
    } else if (r.kappa.size() > 0 && (r.kappa - *reference).cwiseAbs().maxCoeff() > 1e-9) {
      throw Error(ErrorCode::MethodMismatch,
                  std::string("curvature from ") + std::string(to_string(m)) + " differs from " +
                      std::string(to_string(methods.front())));
    }
    csv += bench_csv_row(r) + "\n";
  }
  run.output(out, csv);
  run.finish();
}

void cmd_backbone(const std::string& graph_path, const std::string& distances_path, double threshold,
                  const std::string& out) {
  json params = {{"graph", graph_path}, {"distances", distances_path}, {"threshold", threshold}, {"out", out}};
  Run run("analyze backbone", params, std::nullopt, {graph_path, distances_path});
  const Graph g = load_edge_list_file(graph_path);
  std::istringstream in(read_file(distances_path));
  const DistanceState s(load_distance_csv(in, g));
  std::string text;
  for (EdgeId e : backbone(g, s, threshold))
    text += g.label(g.edge(e).u) + "\t" + g.label(g.edge(e).v) + "\t" + format_real(s[e]) + "\n";
  run.output(out, text);
  run.finish();
}

void cmd_groups(const std::string& graph_path, const std::string& distances_path, const std::string& groups_path,
                const std::string& out) {
  json params = {{"graph", graph_path}, {"distances", distances_path}, {"groups", groups_path}, {"out", out}};
  Run run("analyze groups", params, std::nullopt, {graph_path, distances_path, groups_path});
  const Graph g = load_edge_list_file(graph_path);
  std::istringstream din(read_file(distances_path));
  const DistanceState s(load_distance_csv(din, g));
  std::istringstream gin(read_file(groups_path));
  const GroupMap groups = load_group_map(gin, g);
  run.output(out, to_json(group_ratio(g, s, groups)));
  run.finish();
}

}  // namespace

Eigen::VectorXd load_distance_csv(std::istream& in, const Graph& g) {
  Eigen::VectorXd d(static_cast<Eigen::Index>(g.edge_count()));
  std::vector<bool> seen(g.edge_count(), false);
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    throw Error(ErrorCode::ParseError, "distance CSV line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (line_no == 1 && !f.empty() && f[0] == "edge_id") continue;
    if (f.size() < 4) fail("expected edge_id,u,v,distance");
    std::size_t pos = 0;
    unsigned long id = 0;
    double value = 0;
    try {
      id = std::stoul(f[0], &pos);
      if (pos != f[0].size()) fail("bad edge id");
      value = std::stod(f[3], &pos);
      if (pos != f[3].size()) fail("bad distance");
    } catch (const std::logic_error&) {
      fail("bad number");
    }
    if (id >= g.edge_count() || seen[id]) fail("unknown or repeated edge id");
    const Edge& e = g.edge(static_cast<EdgeId>(id));
    if (g.label(e.u) != f[1] || g.label(e.v) != f[2]) fail("endpoints do not match the graph");
    d[static_cast<Eigen::Index>(id)] = value;
    seen[id] = true;
  }
  for (EdgeId e = 0; e < g.edge_count(); ++e)
    if (!seen[e]) throw Error(ErrorCode::ParseError, "distance CSV misses edge " + std::to_string(e));
  return d;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Discrete Ricci curvature and flow on weighted graphs", "ricci"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(RICCI_VERSION));

  GenerateFlags gen;
  auto* generate = app.add_subcommand("generate", "Write a seeded synthetic graph as an edge list");
  generate->add_option("--family", gen.family,
                       "regular, erdos-renyi, geometric-plane, geometric-cylinder-knn or sbm")
      ->required();
  generate->add_option("--n", gen.n, "Vertex count");
  generate->add_option("--k", gen.k, "Degree (regular) or neighbour count (kNN)");
  generate->add_option("--p", gen.p, "Edge probability (erdos-renyi)");
  generate->add_option("--radius", gen.radius, "Connection radius (plane) or cylinder radius (kNN)");
  generate->add_option("--box-side", gen.box_side, "Side of the square (plane)")->capture_default_str();
  generate->add_option("--height", gen.height, "Cylinder height (kNN)")->capture_default_str();
  generate->add_option("--sizes", gen.sizes, "Block sizes (sbm), comma separated")->delimiter(',');
  generate->add_option("--p-in", gen.p_in, "Intra-block probability (sbm)");
  generate->add_option("--p-out", gen.p_out, "Inter-block probability (sbm)");
  generate->add_option("--seed", gen.seed, "Random seed")->capture_default_str();
  generate->add_flag("--largest-component", gen.largest, "Keep only the largest connected component");
  generate->add_option("--out", gen.out, "Output edge-list path")->required();

  std::string graph, out_path;
  CurvatureFlags cflags;
  auto* curvature = app.add_subcommand("curvature", "Curvature of every edge");
  curvature->add_option("--graph", graph, "Input edge list")->required();
  curvature->add_option("--out", out_path, "Output prefix")->required();
  cflags.add(curvature);

  std::size_t max_iters = 100;
  double tol = 0.02;
  auto* flow = app.add_subcommand("flow", "Run the Ricci flow to its fixed point");
  flow->add_option("--graph", graph, "Input edge list")->required();
  flow->add_option("--out", out_path, "Output prefix")->required();
  flow->add_option("--max-iters", max_iters, "Iteration limit")->capture_default_str();
  flow->add_option("--tol", tol, "Stop when the curvature standard deviation drops below this")
      ->capture_default_str();
  cflags.add(flow);

  std::vector<std::string> methods{"all"};
  std::size_t repeats = 3;
  std::string bench_name;
  bool bench_no_slope = false;
  unsigned bench_threads = 0;
  auto* bench = app.add_subcommand("bench", "Compare distance-matrix methods");
  bench->add_option("--graph", graph, "Input edge list")->required();
  bench->add_option("--out", out_path, "Output CSV path")->required();
  bench->add_option("--methods", methods, "all, or any of sssd-per-edge, ssmd-no-arrangement, ssmd-arrangement")
      ->delimiter(',')
      ->capture_default_str();
  bench->add_option("--threads", bench_threads, "Worker threads (0: hardware concurrency)")
      ->envname("RICCI_THREADS")
      ->capture_default_str();
  bench->add_option("--repeats", repeats, "Timed repeats (median reported)")->capture_default_str();
  bench->add_option("--name", bench_name, "Graph name for the CSV (default: file stem)");
  bench->add_flag("--no-slope-check", bench_no_slope, "Skip the linear-segment check in the cross-check pass");

  std::string distances, groups_path;
  double threshold = 0.0;
  auto* analyze = app.add_subcommand("analyze", "Post-flow analysis");
  analyze->require_subcommand(1);
  auto* backbone_cmd = analyze->add_subcommand("backbone", "Edges whose distance exceeds a threshold");
  backbone_cmd->add_option("--graph", graph, "Input edge list")->required();
  backbone_cmd->add_option("--distances", distances, "Distance CSV from curvature or flow")->required();
  backbone_cmd->add_option("--threshold", threshold, "Strict lower bound on distance")->required();
  backbone_cmd->add_option("--out", out_path, "Output edge-list path")->required();
  auto* groups_cmd = analyze->add_subcommand("groups", "Intra/inter-group distance ratios");
  groups_cmd->add_option("--graph", graph, "Input edge list")->required();
  groups_cmd->add_option("--distances", distances, "Distance CSV from curvature or flow")->required();
  groups_cmd->add_option("--groups", groups_path, "CSV node_label,group")->required();
  groups_cmd->add_option("--out", out_path, "Output JSON path")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << RICCI_VERSION << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (*generate) {
      cmd_generate(gen);
    } else if (*curvature) {
      cmd_curvature(graph, cflags, out_path);
    } else if (*flow) {
      cmd_flow(graph, cflags, max_iters, tol, out_path);
    } else if (*bench) {
      cmd_bench(graph, methods, bench_threads, repeats, bench_name, out_path, bench_no_slope);
    } else if (*backbone_cmd) {
      cmd_backbone(graph, distances, threshold, out_path);
    } else if (*groups_cmd) {
      cmd_groups(graph, distances, groups_path, out_path);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::Io ? 2 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace ricci::cli
