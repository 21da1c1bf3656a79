#include <doctest.h>

#include <cmath>
#include <map>

#include "locph/expressiveness.hpp"
#include "locph/filters.hpp"
#include "support.hpp"

using namespace locph;

namespace {

// All-pairs shortest paths by Floyd-Warshall on the vicinity.
std::vector<std::vector<double>> floyd(const Graph& g, const std::vector<double>& len) {
  const std::size_t n = g.num_vertices();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, kUnreachable));
  for (std::size_t i = 0; i < n; ++i) d[i][i] = 0.0;
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    const auto [a, b] = g.edge(e);
    d[a][b] = d[b][a] = std::min(d[a][b], len[e]);
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
    }
  }
  return d;
}

}  // namespace

TEST_CASE("spd filter") {
  const Graph star = testsupport::from_pairs(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
  const auto f = spd_filter(k_hop_vicinity(star, 0, 1));
  CHECK(f.values == std::vector<double>{0, 1, 1, 1, 1});

  const auto vg = k_hop_vicinity(shrikhande(), 5, 1);
  const auto s = spd_filter(vg);
  CHECK(vg.size() == 7);
  CHECK(std::count(s.values.begin(), s.values.end(), 0.0) == 1);
  CHECK(std::count(s.values.begin(), s.values.end(), 1.0) == 6);
  CHECK(s.values[*vg.to_local(5)] == 0.0);

  CHECK_THROWS_AS(spd_filter(pair_vicinity(star, 1, 2, 1)), InputError);
}

TEST_CASE("edge extension on the triangle with values (0, 1, 1)") {
  const Graph tri = testsupport::complete(3);  // edges (0,1) (0,2) (1,2)
  const auto f = VertexFilter::from_values({0, 1, 1});
  const auto classic = extend_to_edges(tri, f, EdgeMode::classic());
  CHECK(std::vector<double>(classic.ascending_values().begin(), classic.ascending_values().end()) ==
        std::vector<double>{1, 1, 1});
  CHECK(std::vector<double>(classic.descending_values().begin(),
                            classic.descending_values().end()) == std::vector<double>{0, 0, 1});
  const auto relaxed =
      extend_to_edges(tri, f, {EdgeRule::kRelaxedAscending, EdgeRule::kUpperStar});
  CHECK(std::vector<double>(relaxed.ascending_values().begin(), relaxed.ascending_values().end()) ==
        std::vector<double>{1, 1, 1.5});
}

TEST_CASE("relaxed values differ from endpoints only on ties") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const Graph g = testsupport::erdos_renyi(10, 0.4, rng);
    std::uniform_int_distribution<int> value(0, 3);
    std::vector<double> f(10);
    for (double& x : f) x = value(rng);
    const auto filt = extend_to_edges(g, VertexFilter::from_values(f), EdgeMode::relaxed());
    for (EdgeId e = 0; e < g.num_edges(); ++e) {
      const double a = f[g.edge(e).u];
      const double b = f[g.edge(e).v];
      CHECK(filt.ascending_value(e) == (a == b ? a + 0.5 : std::max(a, b)));
      CHECK(filt.descending_value(e) == (a == b ? a - 0.5 : std::min(a, b)));
    }
  }
}

TEST_CASE("pairwise sum filter") {
  const Graph tri = testsupport::complete(3);
  const auto f = pairwise_sum_filter(pair_vicinity(tri, 0, 1, 1));
  CHECK(f.values == std::vector<double>{1, 1, 2});

  const Graph p3 = testsupport::path(3);
  const auto g = pairwise_sum_filter(pair_vicinity(p3, 0, 2, 1));
  CHECK(g.values == std::vector<double>{2, 2, 2});
  CHECK(g.excluded() == 0);

  // Roots 0 and 4 of a path share no neighbors: anchors only, mutually unreachable.
  const auto far = pairwise_sum_filter(pair_vicinity(testsupport::path(5), 0, 4, 1));
  CHECK(far.excluded() == 2);
}

TEST_CASE("weighted pairwise sum matches a two-source Floyd-Warshall oracle") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> w(0.2, 2.0);
  for (int trial = 0; trial < 40; ++trial) {
    const Graph g = testsupport::erdos_renyi(10, 0.3, rng);
    std::vector<double> parent_len(g.num_edges());
    for (double& x : parent_len) x = w(rng);
    const auto vg = pair_vicinity(g, 0, 1, 3);
    const auto local = local_edge_lengths(g, vg, parent_len);
    const auto f = pairwise_sum_filter(vg, local);
    const auto d = floyd(vg.local, local);
    const Vertex ru = vg.local_roots[0];
    const Vertex rv = vg.local_roots[1];
    for (Vertex i = 0; i < vg.size(); ++i) {
      const bool ok = d[i][ru] != kUnreachable && d[i][rv] != kUnreachable;
      CHECK(f.defined(i) == ok);
      if (ok) CHECK(f.values[i] == doctest::Approx(d[i][ru] + d[i][rv]).epsilon(1e-12));
    }
  }
}

TEST_CASE("curvature distance filter uses kappa + 1 lengths") {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 20; ++trial) {
    const Graph g = testsupport::erdos_renyi(10, 0.35, rng);
    const auto w = ollivier_ricci(g, 0.5);
    const auto vg = k_hop_vicinity(g, 2, 2);
    const auto local = local_edge_lengths(g, vg, w.kappa_plus_one);
    const auto f = curvature_distance_filter(vg, local);
    const auto d = floyd(vg.local, local);
    for (Vertex i = 0; i < vg.size(); ++i) {
      CHECK(f.values[i] == doctest::Approx(d[i][vg.local_roots[0]]).epsilon(1e-12));
    }
  }
}

TEST_CASE("tuple distance formula") {
  CHECK(tuple_distance_value(1, 1) == 2.0);
  CHECK(tuple_distance_value(0, 1) == 1.0);
  CHECK(tuple_distance_value(1, 0) == 1.0);
  CHECK(tuple_distance_value(2, 1) == 1 + 1 + 1 * (1 + 1 - 1));
  // Distances to two roots at distance D satisfy |d1 - d2| <= D <= d1 + d2;
  // on such pairs the formula separates distinct unordered labels.
  for (std::uint32_t D = 1; D <= 4; ++D) {
    std::map<double, std::pair<std::uint32_t, std::uint32_t>> seen;
    for (std::uint32_t a = 0; a <= 4; ++a) {
      for (std::uint32_t b = a; b <= 4; ++b) {
        if (b - a > D || a + b < D) continue;
        const auto [it, fresh] = seen.emplace(tuple_distance_value(a, b), std::pair{a, b});
        CHECK_MESSAGE(fresh, "D=" << D << " (" << a << "," << b << ") collides with ("
                                  << it->second.first << "," << it->second.second << ")");
      }
    }
  }
  // Without the triangle constraint the formula is not injective.
  CHECK(tuple_distance_value(0, 3) == tuple_distance_value(1, 1));
}

TEST_CASE("tuple distance filter on the CFI roots") {
  const auto g = cfi_graph(0);
  const auto [r1, r2] = g.designated_roots();
  const auto vg = pair_vicinity(g.graph, r1, r2, 1);
  const auto f = tuple_distance_filter(vg);
  CHECK(f.values[vg.local_roots[0]] == 1.0);
  CHECK(f.values[vg.local_roots[1]] == 1.0);
  std::size_t twos = 0;
  for (double x : f.values) twos += x == 2.0;
  // The adjacent roots sit in each other's neighborhood; six common neighbors remain.
  CHECK(vg.core_size == 8);
  CHECK(twos == 6);
}

TEST_CASE("heat kernel signature identities") {
  const Graph k2 = testsupport::path(2);
  for (double t : {0.0, 0.1, 1.0, 10.0}) {
    const auto f = hks_filter(k2, t);
    for (double x : f.values) CHECK(x == doctest::Approx(0.5 * (1 + std::exp(-2 * t))).epsilon(1e-12));
  }
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 20; ++trial) {
    const Graph g = testsupport::erdos_renyi(12, 0.3, rng);
    const HeatKernelSignature hks(g);
    for (double x : hks.at(0.0)) CHECK(std::abs(x - 1.0) <= 1e-9);
    for (double t : {0.1, 10.0}) {
      const auto h = hks.at(t);
      double lhs = 0.0;
      double rhs = 0.0;
      for (double x : h) {
        lhs += x;
        CHECK(x > 0.0);
      }
      for (double l : hks.eigenvalues()) rhs += std::exp(-t * l);
      CHECK(std::abs(lhs - rhs) <= 1e-8);
    }
    const auto perm = testsupport::random_permutation(12, rng);
    const auto moved = HeatKernelSignature(g.relabeled(perm)).at(0.1);
    const auto base = hks.at(0.1);
    for (Vertex v = 0; v < 12; ++v) CHECK(moved[perm[v]] == doctest::Approx(base[v]).epsilon(1e-9));
  }
}

TEST_CASE("isolated vertices in the heat kernel") {
  const Graph g = testsupport::from_pairs(3, {{0, 1}});
  const auto h = hks_filter(g, 2.0).values;
  CHECK(h[2] == doctest::Approx(std::exp(-2.0)));
  CHECK(h[0] == doctest::Approx(0.5 * (1 + std::exp(-4.0))));
  CHECK_THROWS_AS(hks_filter(g, -1.0), InputError);
  CHECK(hks_filter(Graph::from_edge_list({}, 0), 1.0).values.empty());
}
