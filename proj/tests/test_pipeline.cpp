#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "locph/filters.hpp"
#include "locph/pipeline.hpp"
#include "support.hpp"

using namespace locph;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("locph-" + tag + "-" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

bool all_zero(std::span<const double> xs) {
  return std::all_of(xs.begin(), xs.end(), [](double x) { return x == 0.0; });
}

std::size_t count_files(const fs::path& root) {
  std::size_t n = 0;
  for (const auto& e : fs::recursive_directory_iterator(root)) n += e.is_regular_file();
  return n;
}

}  // namespace

TEST_CASE("rows agree with a hand-assembled image for every filter") {
  std::mt19937_64 rng(101);
  const Graph g = testsupport::erdos_renyi(14, 0.3, rng);
  PipelineConfig cfg;
  cfg.hop_radius = 2;
  cfg.image.sigma = 0.3;
  const auto w = ollivier_ricci(g, 0.5);
  for (const char* name : {"spd", "curvature-distance", "hks:1.5"}) {
    cfg.filter = parse_filter(name);
    const auto m = node_features(g, cfg);
    REQUIRE(m.rows == g.num_vertices());
    REQUIRE(m.cols == 25);
    for (Vertex u = 0; u < g.num_vertices(); ++u) {
      const auto vg = k_hop_vicinity(g, u, 2);
      VertexFilter f;
      if (std::string(name) == "spd") {
        f = spd_filter(vg);
      } else if (std::string(name) == "hks:1.5") {
        f = hks_filter(vg.local, 1.5);
      } else {
        f = curvature_distance_filter(vg, local_edge_lengths(g, vg, w.kappa_plus_one));
      }
      const auto d = extended_pd(extend_to_edges(vg.local, f, EdgeMode::classic()).normalized());
      const auto want = persistence_image(d, cfg.image);
      const auto got = m.row(u);
      for (std::size_t j = 0; j < want.size(); ++j) CHECK(got[j] == doctest::Approx(want[j]).epsilon(1e-12));
    }
  }
}

TEST_CASE("star center PI+ row") {
  const Graph star = testsupport::from_pairs(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
  PipelineConfig cfg;
  cfg.hop_radius = 1;
  cfg.filter = parse_filter("spd");
  cfg.piplus = true;
  const auto m = node_features(star, cfg);
  CHECK(m.cols == 30);
  CHECK(m.layout.find("n_level").offset == 25);
  const auto row = m.row(0);
  CHECK(std::vector<double>(row.begin() + 25, row.end()) == std::vector<double>{1, 4, 0, 0, 4});
  const auto vg = k_hop_vicinity(star, 0, 1);
  const auto expect = pi_plus(
      extended_pd(extend_to_edges(vg.local, spd_filter(vg), EdgeMode::classic()).normalized()),
      structural_counts(vg, 1), cfg.image);
  CHECK(std::vector<double>(row.begin(), row.end()) == expect.values);
  CHECK(m.layout == expect.layout);

  cfg.hop_radius = 2;
  CHECK(node_features(star, cfg).cols == 33);
}

TEST_CASE("isolated vertices give zero rows without failures") {
  const Graph g = testsupport::from_pairs(4, {{0, 1}, {1, 2}});
  for (const char* name : {"spd", "curvature-distance", "hks:0.1", "multi"}) {
    PipelineConfig cfg;
    cfg.filter = parse_filter(name);
    PipelineStats stats;
    const auto m = node_features(g, cfg, &stats);
    CHECK(all_zero(m.row(3)));
    CHECK_FALSE(all_zero(m.row(1)));
    CHECK(stats.failed_rows == 0);
  }
}

TEST_CASE("pair rows") {
  PipelineConfig cfg;
  cfg.hop_radius = 1;
  const std::vector<std::pair<Vertex, Vertex>> tri_pairs{{0, 1}, {1, 2}, {0, 1}};
  const auto tri = pair_features(testsupport::complete(3), tri_pairs, cfg);
  CHECK_FALSE(all_zero(tri.row(0)));
  CHECK(std::ranges::equal(tri.row(0), tri.row(2)));
  CHECK(std::ranges::equal(tri.row(0), tri.row(1)));  // symmetric roots

  // Roots four hops apart share nothing within one hop.
  const std::vector<std::pair<Vertex, Vertex>> far{{0, 4}};
  for (const char* name : {"pairwise-sum", "tuple-distance", "multi"}) {
    cfg.filter = parse_filter(name);
    PipelineStats stats;
    const auto m = pair_features(testsupport::path(5), far, cfg, &stats);
    CHECK(all_zero(m.row(0)));
    CHECK(stats.failed_rows == 0);
  }
  cfg.filter = parse_filter("multi");
  CHECK(pair_features(testsupport::complete(3), tri_pairs, cfg).cols == 75);

  const std::vector<std::pair<Vertex, Vertex>> self{{1, 1}};
  CHECK_THROWS_AS(pair_features(testsupport::complete(3), self, cfg), InputError);
  const std::vector<std::pair<Vertex, Vertex>> out{{0, 3}};
  CHECK_THROWS_AS(pair_features(testsupport::complete(3), out, cfg), InputError);
}

TEST_CASE("multi filter layout") {
  PipelineConfig cfg;
  cfg.filter = parse_filter("multi");
  cfg.piplus = true;
  cfg.hop_radius = 1;
  const auto m = node_features(testsupport::cycle(6), cfg);
  CHECK(m.cols == 80);
  CHECK(m.layout.find("pi_hks0.1").offset == 0);
  CHECK(m.layout.find("pi_hks10").offset == 25);
  CHECK(m.layout.find("pi_curvature").offset == 50);
  CHECK(m.layout.find("n_cross").offset == 79);
}

TEST_CASE("default hop radius follows average degree") {
  CHECK(default_hop_radius(testsupport::cycle(10)) == 2);
  CHECK(default_hop_radius(testsupport::complete(12)) == 1);
  CHECK(default_hop_radius(testsupport::complete(11)) == 1);  // degree exactly 10
  CHECK(default_hop_radius(testsupport::complete(10)) == 2);
  PipelineConfig cfg;
  cfg.filter = parse_filter("spd");
  cfg.piplus = true;
  CHECK(node_features(testsupport::cycle(5), cfg).cols == 33);
  CHECK(node_features(testsupport::complete(12), cfg).cols == 30);
}

TEST_CASE("worker count does not change output") {
  std::mt19937_64 rng(103);
  const Graph g = testsupport::erdos_renyi(120, 0.04, rng);
  PipelineConfig cfg;
  cfg.filter = parse_filter("multi");
  cfg.piplus = true;
  const auto one = node_features(g, cfg);
  for (std::size_t w : {2, 8, 200}) {
    cfg.workers = w;
    CHECK(node_features(g, cfg).values == one.values);
  }
}

TEST_CASE("diagram cache: hits, invalidation and corruption") {
  TempDir dir("cache");
  std::mt19937_64 rng(107);
  const Graph g = testsupport::erdos_renyi(40, 0.1, rng);
  PipelineConfig cfg;
  cfg.cache_dir = dir.path.string();
  cfg.workers = 4;

  PipelineStats cold;
  const auto first = node_features(g, cfg, &cold);
  CHECK(cold.diagrams_computed == 40);
  CHECK(cold.cache_writes == 40);
  CHECK(count_files(dir.path) == 40);

  PipelineStats warm;
  const auto again = node_features(g, cfg, &warm);
  CHECK(warm.diagrams_computed == 0);
  CHECK(warm.cache_hits == 40);
  CHECK(again.values == first.values);

  // The raster is not part of the key: a new sigma reuses diagrams.
  auto sharper = cfg;
  sharper.image.sigma = 0.1;
  PipelineStats raster;
  const auto resampled = node_features(g, sharper, &raster);
  CHECK(raster.diagrams_computed == 0);
  CHECK(resampled.values != first.values);

  auto wider = cfg;
  wider.hop_radius = 3;
  PipelineStats k3;
  node_features(g, wider, &k3);
  CHECK(k3.diagrams_computed == 40);

  std::vector<std::pair<Vertex, Vertex>> edges;
  for (const auto& e : g.edges()) edges.emplace_back(e.u, e.v);
  edges.pop_back();
  const Graph flipped = Graph::from_edge_list(edges, 40);
  PipelineStats flip;
  node_features(flipped, cfg, &flip);
  CHECK(flip.diagrams_computed == 40);
  CHECK(graph_hash(flipped) != graph_hash(g));

  // Damage one entry: it is detected, recomputed and rewritten.
  char key[40];
  std::snprintf(key, sizeof key, "%016llx-%016llx", static_cast<unsigned long long>(graph_hash(g)),
                static_cast<unsigned long long>(
                    config_hash(cfg, Task::kNodeFeatures, default_hop_radius(g))));
  const fs::path victim = dir.path / key / "node-7.epd";
  REQUIRE(fs::exists(victim));
  {
    std::fstream f(victim, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(20);
    f.put('\x7f');
  }
  PipelineStats repaired;
  const auto fixed = node_features(g, cfg, &repaired);
  CHECK(fixed.values == first.values);
  CHECK(repaired.cache_corrupt == 1);
  CHECK(repaired.diagrams_computed == 1);
  PipelineStats after;
  node_features(g, cfg, &after);
  CHECK(after.cache_corrupt == 0);
  CHECK(after.diagrams_computed == 0);
}

TEST_CASE("pair cache round trip") {
  TempDir dir("pairs");
  PipelineConfig cfg;
  cfg.cache_dir = dir.path.string();
  cfg.filter = parse_filter("tuple-distance");
  const std::vector<std::pair<Vertex, Vertex>> pairs{{0, 1}, {2, 5}, {0, 1}};
  const Graph g = testsupport::cycle(8);
  PipelineStats cold;
  const auto a = pair_features(g, pairs, cfg, &cold);
  PipelineStats warm;
  const auto b = pair_features(g, pairs, cfg, &warm);
  CHECK(a.values == b.values);
  CHECK(warm.diagrams_computed == 0);
  CHECK(warm.cache_hits == 3);
}

TEST_CASE("diagram encoding") {
  std::vector<PersistenceDiagram> ds(2);
  ds[0].points = {{0.0, 1.0, 0, PointKind::kExtended}, {0.25, 0.5, 0, PointKind::kOrdinary}};
  ds[1].points = {{1.0, 0.125, 1, PointKind::kExtended}, {0.75, 0.5, 1, PointKind::kRelative}};
  const auto bytes = encode_diagrams(ds);
  CHECK(bytes.substr(0, 4) == "EPDC");
  const auto back = decode_diagrams(bytes);
  REQUIRE(back);
  CHECK(*back == ds);
  CHECK(decode_diagrams(encode_diagrams({}))->empty());

  CHECK_FALSE(decode_diagrams(bytes.substr(0, bytes.size() - 1)));
  CHECK_FALSE(decode_diagrams(""));
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    auto bad = bytes;
    bad[i] = static_cast<char>(bad[i] ^ 0x10);
    CHECK_FALSE(decode_diagrams(bad));
  }
}

TEST_CASE("graph hash ignores input order and sees weights") {
  const std::vector<std::pair<Vertex, Vertex>> a{{0, 1}, {1, 2}, {2, 3}};
  const std::vector<std::pair<Vertex, Vertex>> b{{3, 2}, {1, 0}, {2, 1}};
  CHECK(graph_hash(Graph::from_edge_list(a, 4)) == graph_hash(Graph::from_edge_list(b, 4)));
  CHECK(graph_hash(Graph::from_edge_list(a, 4)) != graph_hash(Graph::from_edge_list(a, 5)));
  const std::vector<WeightedEdge> w{{0, 1, 1.0}, {1, 2, 2.0}, {2, 3, 1.0}};
  CHECK(graph_hash(Graph::from_weighted_edges(w, 4)) != graph_hash(Graph::from_edge_list(a, 4)));

  PipelineConfig cfg;
  const auto base = config_hash(cfg, Task::kNodeFeatures, 2);
  CHECK(base != config_hash(cfg, Task::kNodeFeatures, 1));
  CHECK(base != config_hash(cfg, Task::kPairFeatures, 2));
  auto relaxed = cfg;
  relaxed.edge_mode = EdgeMode::relaxed();
  CHECK(base != config_hash(relaxed, Task::kNodeFeatures, 2));
  auto pi = cfg;
  pi.image.rows = 7;
  pi.workers = 9;
  CHECK(base == config_hash(pi, Task::kNodeFeatures, 2));
}

TEST_CASE("filter names") {
  CHECK(parse_filter("hks:0.1").hks_time == 0.1);
  CHECK(to_string(parse_filter("hks:10")) == "hks:10");
  for (const char* name : {"spd", "curvature-distance", "pairwise-sum", "tuple-distance", "multi"}) {
    CHECK(to_string(parse_filter(name)) == name);
  }
  for (const char* bad : {"hks:", "hks:-1", "hks:abc", "hks:1x", "hks:inf", "SPD", ""}) {
    CHECK_THROWS_AS(parse_filter(bad), InputError);
  }
}

TEST_CASE("config dictionaries are validated with the pipeline rules") {
  using nlohmann::json;
  const auto ok = PipelineConfig::from_json(
      json{{"k", 3}, {"filter", "hks:0.5"}, {"edge_mode", "relaxed"}, {"pi_rows", 4},
           {"pi_cols", 6}, {"sigma", 0.2}, {"piplus", true}, {"workers", 3}, {"seed", 9},
           {"curvature_method", "sinkhorn"}, {"curvature_alpha", 0.5}},
      Task::kNodeFeatures);
  CHECK(ok.hop_radius == 3u);
  CHECK(ok.filter == FilterSpec{FilterKind::kHks, 0.5});
  CHECK(ok.edge_mode == EdgeMode::relaxed());
  CHECK(ok.image.size() == 24);
  CHECK(ok.piplus);
  CHECK(ok.workers == 3);
  CHECK(ok.curvature_method == TransportMethod::kSinkhorn);
  CHECK(node_features(testsupport::cycle(5), ok).cols == 24 + 11);

  const auto node = Task::kNodeFeatures;
  const auto pair = Task::kPairFeatures;
  CHECK_THROWS_AS(PipelineConfig::from_json(json{{"k", 0}}, node), InputError);
  CHECK_THROWS_AS(PipelineConfig::from_json(json{{"k", -1}}, node), InputError);
  CHECK_THROWS_AS(PipelineConfig::from_json(json{{"k", 1.5}}, node), InputError);
  CHECK_THROWS_AS(PipelineConfig::from_json(json{{"k", "2"}}, node), InputError);
  CHECK_THROWS_AS(PipelineConfig::from_json(json{{"kk", 2}}, node), InputError);
  CHECK_THROWS_AS(PipelineConfig::from_json(json{{"sigma", 0}}, node), InputError);
  CHECK_THROWS_AS(PipelineConfig::from_json(json{{"pi_rows", 0}}, node), InputError);
  CHECK_THROWS_AS(PipelineConfig::from_json(json{{"workers", 0}}, node), InputError);
  CHECK_THROWS_AS(PipelineConfig::from_json(json{{"edge_mode", "loose"}}, node), InputError);
  CHECK_THROWS_AS(PipelineConfig::from_json(json{{"curvature_alpha", 1.0}}, node), InputError);
  CHECK_THROWS_AS(PipelineConfig::from_json(json{{"filter", "pairwise-sum"}}, node), InputError);
  CHECK_THROWS_AS(PipelineConfig::from_json(json{{"filter", "spd"}}, pair), InputError);
  CHECK_THROWS_AS(PipelineConfig::from_json(json{{"piplus", true}}, pair), InputError);
  CHECK_THROWS_AS(PipelineConfig::from_json(json::array(), node), InputError);
  CHECK_NOTHROW(PipelineConfig::from_json(json{{"filter", "multi"}}, pair));
  CHECK(PipelineConfig::from_json(json::object(), pair).resolved_filter(pair).kind ==
        FilterKind::kPairwiseSum);
  CHECK(PipelineConfig::from_json(json::object(), node).resolved_filter(node).kind ==
        FilterKind::kCurvatureDistance);

  PipelineConfig direct;
  direct.hop_radius = 0;
  CHECK_THROWS_AS(node_features(testsupport::cycle(4), direct), InputError);
}

TEST_CASE("row diagrams match the matrix") {
  const Graph g = testsupport::cycle(7);
  PipelineConfig cfg;
  cfg.filter = parse_filter("multi");
  const auto ds = row_diagrams(g, 3, std::nullopt, cfg);
  CHECK(ds.size() == 3);
  const auto m = node_features(g, cfg);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto img = persistence_image(ds[i], cfg.image);
    CHECK(std::equal(img.begin(), img.end(), m.row(3).begin() + 25 * i));
  }
  CHECK_THROWS_AS(row_diagrams(g, 9, std::nullopt, cfg), InputError);
}
