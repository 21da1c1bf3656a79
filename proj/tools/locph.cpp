// Command-line front end: features, epd, distinguish, bench.
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "locph/expressiveness.hpp"
#include "locph/feature_io.hpp"
#include "locph/filters.hpp"
#include "locph/graph_io.hpp"
#include "locph/pipeline.hpp"

using namespace locph;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitInternal = 3;

struct PipelineFlags {
  std::string graph;
  std::string config_file;
  std::optional<std::uint32_t> k;
  std::optional<std::string> filter;
  std::optional<std::string> edge_mode;
  std::optional<std::string> pi_res;
  std::optional<double> sigma;
  bool piplus = false;
  std::optional<std::size_t> workers;
  std::optional<std::string> cache;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> curvature_method;

  void attach(CLI::App* app, bool need_graph = true) {
    auto* g = app->add_option("--graph", graph, "edge list or .json graph");
    if (need_graph) g->required();
    app->add_option("--config", config_file, "JSON config; flags override its keys");
    app->add_option("--k", k, "hop radius (default 2 if average degree < 10, else 1)");
    app->add_option("--filter", filter,
                    "spd | curvature-distance | pairwise-sum | tuple-distance | hks:T | multi");
    app->add_option("--edge-mode", edge_mode,
                    "classic | relaxed | relaxed-ascending | relaxed-descending");
    app->add_option("--pi-res", pi_res, "image resolution RxC (default 5x5)");
    app->add_option("--sigma", sigma, "Gaussian width (default 1.0)");
    app->add_flag("--piplus", piplus, "append per-layer structural counts");
    app->add_option("--workers", workers, "worker threads (default 1)");
    app->add_option("--cache", cache, "diagram cache directory");
    app->add_option("--seed", seed, "random seed");
    app->add_option("--curvature-method", curvature_method, "exact-lp | sinkhorn");
  }

  PipelineConfig resolve(Task task) const {
    nlohmann::json doc = nlohmann::json::object();
    if (!config_file.empty()) {
      std::ifstream in(config_file);
      if (!in) throw InputError("cannot open config " + config_file);
      try {
        doc = nlohmann::json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("bad config JSON: ") + e.what());
      }
      if (!doc.is_object()) throw InputError("config must be a JSON object");
    }
    if (k) doc["k"] = *k;
    if (filter) doc["filter"] = *filter;
    if (edge_mode) doc["edge_mode"] = *edge_mode;
    if (pi_res) {
      const auto x = pi_res->find('x');
      std::size_t rows = 0;
      std::size_t cols = 0;
      try {
        std::size_t used = 0;
        if (x == std::string::npos) throw std::invalid_argument("no x");
        rows = std::stoul(pi_res->substr(0, x), &used);
        if (used != x) throw std::invalid_argument("rows");
        cols = std::stoul(pi_res->substr(x + 1), &used);
        if (used != pi_res->size() - x - 1) throw std::invalid_argument("cols");
      } catch (const std::exception&) {
        throw InputError("--pi-res expects RxC, e.g. 5x5");
      }
      doc["pi_rows"] = rows;
      doc["pi_cols"] = cols;
    }
    if (sigma) doc["sigma"] = *sigma;
    if (piplus) doc["piplus"] = true;
    if (workers) doc["workers"] = *workers;
    if (cache) doc["cache"] = *cache;
    if (seed) doc["seed"] = *seed;
    if (curvature_method) doc["curvature_method"] = *curvature_method;
    return PipelineConfig::from_json(doc, task);
  }
};

std::ostream& open_output(const std::string& path, std::ofstream& file, bool binary) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path, binary ? std::ios::binary | std::ios::out : std::ios::out);
  if (!file) throw InputError("cannot open output " + path);
  return file;
}

void finish_output(std::ostream& out, const std::string& path) {
  out.flush();
  if (!out) throw InputError("failed writing " + (path.empty() ? std::string("stdout") : path));
}

int run_features(const PipelineFlags& flags, Task task, const std::string& pairs_path,
                 const std::string& out_path, const std::string& format_name) {
  const auto format = parse_matrix_format(format_name);
  const auto cfg = flags.resolve(task);
  const auto loaded = load_graph(flags.graph);
  RowKeys keys;
  FeatureMatrix m;
  PipelineStats stats;
  if (task == Task::kNodeFeatures) {
    m = node_features(loaded.graph, cfg, &stats);
    keys.key_columns = {"node"};
    for (const auto& n : loaded.names) keys.labels.push_back({n});
  } else {
    const auto pairs = load_pairs(pairs_path, loaded);
    m = pair_features(loaded.graph, pairs, cfg, &stats);
    keys.key_columns = {"u", "v"};
    for (const auto& [u, v] : pairs) keys.labels.push_back({loaded.names[u], loaded.names[v]});
  }
  std::ofstream file;
  auto& out = open_output(out_path, file, format == MatrixFormat::kBinary);
  write_matrix(out, m, keys, format);
  finish_output(out, out_path);
  std::fprintf(stderr, "%zu rows x %zu cols; diagrams computed %llu, cache hits %llu, failed rows %llu\n",
               m.rows, m.cols, static_cast<unsigned long long>(stats.diagrams_computed.load()),
               static_cast<unsigned long long>(stats.cache_hits.load()),
               static_cast<unsigned long long>(stats.failed_rows.load()));
  return 0;
}

int run_epd(const PipelineFlags& flags, const std::string& node, const std::vector<std::string>& pair,
            const std::string& out_path, const std::string& format, const std::string& filter_out) {
  if (format != "json" && format != "csv") throw InputError("epd --format is json or csv");
  if (node.empty() == pair.empty()) throw InputError("give exactly one of --node or --pair");
  const auto loaded = load_graph(flags.graph);
  const Task task = node.empty() ? Task::kPairFeatures : Task::kNodeFeatures;
  const auto cfg = flags.resolve(task);
  const Vertex u = loaded.id_of(node.empty() ? pair[0] : node);
  std::optional<Vertex> v;
  if (!pair.empty()) v = loaded.id_of(pair[1]);
  const auto ds = row_diagrams(loaded.graph, u, v, cfg);
  const auto spec = cfg.resolved_filter(task);

  std::ofstream file;
  auto& out = open_output(out_path, file, false);
  if (format == "json") {
    nlohmann::json doc{{"filter", to_string(spec)},
                       {"k", cfg.hop_radius.value_or(default_hop_radius(loaded.graph))},
                       {"edge_mode", to_string(cfg.edge_mode)},
                       {"diagrams", nlohmann::json::array()}};
    for (const auto& d : ds) doc["diagrams"].push_back(diagram_to_json(d));
    out << doc.dump(2) << '\n';
  } else {
    for (std::size_t i = 0; i < ds.size(); ++i) {
      if (ds.size() > 1) out << "# component " << i << '\n';
      write_diagram_csv(out, ds[i]);
    }
  }
  finish_output(out, out_path);

  if (!filter_out.empty()) {
    if (spec.kind == FilterKind::kMulti) throw InputError("--dump-filter needs a single filter");
    const std::uint32_t k = cfg.hop_radius.value_or(default_hop_radius(loaded.graph));
    const auto vg = v ? pair_vicinity(loaded.graph, u, *v, k) : k_hop_vicinity(loaded.graph, u, k);
    VertexFilter f;
    switch (spec.kind) {
      case FilterKind::kSpd: f = spd_filter(vg); break;
      case FilterKind::kTupleDistance: f = tuple_distance_filter(vg); break;
      case FilterKind::kHks: f = hks_filter(vg.local, spec.hks_time); break;
      default: {
        const auto w = ollivier_ricci(loaded.graph, cfg.curvature_alpha, cfg.curvature_method);
        const auto len = local_edge_lengths(loaded.graph, vg, w.kappa_plus_one);
        f = spec.kind == FilterKind::kPairwiseSum ? pairwise_sum_filter(vg, len)
                                                  : curvature_distance_filter(vg, len);
      }
    }
    std::ofstream fo(filter_out);
    if (!fo) throw InputError("cannot open " + filter_out);
    fo << filter_to_json(f, vg.to_parent, loaded.names).dump(2) << '\n';
    finish_output(fo, filter_out);
  }
  return 0;
}

int run_distinguish(const std::string& named, const std::string& a_path, const std::string& b_path,
                    const std::string& method_name, std::uint32_t k, const std::string& mode) {
  const auto method = parse_distinguish_method(method_name);
  SignatureOptions opts;
  opts.k_hops = k;
  opts.mode = parse_edge_mode(mode);
  opts.filter = method == DistinguishMethod::kEpdTuple ? SignatureFilter::kTupleDistance
                                                       : SignatureFilter::kSpd;
  Graph a;
  Graph b;
  std::vector<std::pair<Vertex, Vertex>> roots_b;
  if (!named.empty()) {
    if (!a_path.empty() || !b_path.empty()) throw InputError("--named excludes --graph/--other");
    if (named == "shrikhande-rook") {
      a = rook_4x4();
      b = shrikhande();
    } else if (named == "cfi") {
      const auto g = cfi_graph(0);
      const auto h = cfi_graph(1);
      a = g.graph;
      b = h.graph;
      if (method == DistinguishMethod::kEpdTuple) {
        opts.root_pairs = {g.designated_roots()};
        roots_b = {h.designated_roots()};
      }
    } else {
      throw InputError("unknown named pair '" + named + "' (shrikhande-rook, cfi)");
    }
  } else {
    if (a_path.empty() || b_path.empty()) throw InputError("give --named or both --graph and --other");
    a = load_graph(a_path).graph;
    b = load_graph(b_path).graph;
  }
  const auto verdict = distinguish(a, b, method, opts, roots_b);
  std::cout << (verdict.distinguished ? "distinguished" : "not distinguished");
  if (!verdict.witness.empty()) std::cout << ": " << verdict.witness;
  std::cout << '\n';
  return 0;
}

int run_bench(const PipelineFlags& flags, std::size_t nodes, std::size_t degree) {
  Graph g;
  auto cfg = flags.resolve(Task::kNodeFeatures);
  if (!flags.graph.empty()) {
    g = load_graph(flags.graph).graph;
  } else {
    g = random_regular(nodes, degree, cfg.seed);
  }
  cfg.cache_dir.clear();
  const std::size_t many = flags.workers ? *flags.workers : 8;
  std::optional<FeatureMatrix> reference;
  double base = 0.0;
  for (std::size_t w : {std::size_t{1}, many}) {
    cfg.workers = w;
    const auto start = std::chrono::steady_clock::now();
    auto m = node_features(g, cfg);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (w == 1) base = secs;
    std::cout << "workers " << w << ": " << secs << " s";
    if (w != 1) std::cout << " (speedup " << base / secs << "x)";
    std::cout << '\n';
    if (!reference) {
      reference = std::move(m);
    } else if (reference->values != m.values) {
      throw InternalError("feature matrices differ between worker counts");
    }
  }
  std::cout << g.num_vertices() << " nodes, " << g.num_edges() << " edges, "
            << reference->cols << " features per node\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Localized extended persistence features for graphs"};
  app.require_subcommand(1);

  auto* features = app.add_subcommand("features", "compute a feature matrix");
  features->require_subcommand(1);
  std::string out_path;
  std::string format = "csv";
  std::string pairs_path;
  PipelineFlags node_flags;
  PipelineFlags pair_flags;
  auto* node_cmd = features->add_subcommand("node", "one row per vertex");
  node_flags.attach(node_cmd);
  node_cmd->add_option("--out", out_path, "output file (default stdout)");
  node_cmd->add_option("--format", format, "csv | bin | json");
  auto* pair_cmd = features->add_subcommand("pair", "one row per listed pair");
  pair_flags.attach(pair_cmd);
  pair_cmd->add_option("--pairs", pairs_path, "pairs file, one `u v` per line")->required();
  pair_cmd->add_option("--out", out_path, "output file (default stdout)");
  pair_cmd->add_option("--format", format, "csv | bin | json");

  auto* epd_cmd = app.add_subcommand("epd", "dump the diagram of one vicinity");
  PipelineFlags epd_flags;
  epd_flags.attach(epd_cmd);
  std::string node;
  std::vector<std::string> pair;
  std::string epd_format = "json";
  std::string filter_out;
  epd_cmd->add_option("--node", node, "root vertex");
  epd_cmd->add_option("--pair", pair, "two root vertices")->expected(2);
  epd_cmd->add_option("--out", out_path, "output file (default stdout)");
  epd_cmd->add_option("--format", epd_format, "json | csv");
  epd_cmd->add_option("--dump-filter", filter_out, "write vertex filter values as JSON");

  auto* dist_cmd = app.add_subcommand("distinguish", "test whether a method separates two graphs");
  std::string named;
  std::string a_path;
  std::string b_path;
  std::string method = "epd-spd";
  std::uint32_t dist_k = 1;
  std::string dist_mode = "relaxed";
  dist_cmd->add_option("--named", named, "shrikhande-rook | cfi");
  dist_cmd->add_option("--graph", a_path, "first graph");
  dist_cmd->add_option("--other", b_path, "second graph");
  dist_cmd->add_option("--method", method, "wl1 | wl2 | wl3 | epd-spd | epd-tuple");
  dist_cmd->add_option("--k", dist_k, "hop radius for EPD methods");
  dist_cmd->add_option("--edge-mode", dist_mode, "edge mode for EPD methods");

  auto* bench_cmd = app.add_subcommand("bench", "time node features at 1 and N workers");
  PipelineFlags bench_flags;
  bench_flags.attach(bench_cmd, false);
  std::size_t bench_nodes = 1000;
  std::size_t bench_degree = 4;
  bench_cmd->add_option("--nodes", bench_nodes, "random regular graph size");
  bench_cmd->add_option("--degree", bench_degree, "random regular graph degree");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*node_cmd) return run_features(node_flags, Task::kNodeFeatures, "", out_path, format);
    if (*pair_cmd) return run_features(pair_flags, Task::kPairFeatures, pairs_path, out_path, format);
    if (*epd_cmd) return run_epd(epd_flags, node, pair, out_path, epd_format, filter_out);
    if (*dist_cmd) return run_distinguish(named, a_path, b_path, method, dist_k, dist_mode);
    if (*bench_cmd) return run_bench(bench_flags, bench_nodes, bench_degree);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const InternalError& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInput;
}
