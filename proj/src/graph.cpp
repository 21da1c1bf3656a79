#include "locph/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <string>

namespace locph {

namespace {

void check_endpoints(Vertex a, Vertex b, std::size_t n) {
  if (a >= n || b >= n) {
    throw InputError("edge (" + std::to_string(a) + ", " + std::to_string(b) +
                     ") has an endpoint outside [0, " + std::to_string(n) + ")");
  }
  if (a == b) {
    throw InputError("self-loop at vertex " + std::to_string(a) + " is not allowed");
  }
}

}  // namespace

Graph Graph::from_edge_list(std::span<const std::pair<Vertex, Vertex>> pairs,
                            std::size_t num_vertices) {
  Graph g;
  g.edges_.reserve(pairs.size());
  for (auto [a, b] : pairs) {
    check_endpoints(a, b, num_vertices);
    g.edges_.push_back({std::min(a, b), std::max(a, b)});
  }
  std::sort(g.edges_.begin(), g.edges_.end());
  g.edges_.erase(std::unique(g.edges_.begin(), g.edges_.end()), g.edges_.end());
  g.build_adjacency(num_vertices);
  return g;
}

Graph Graph::from_weighted_edges(std::span<const WeightedEdge> edges,
                                 std::size_t num_vertices) {
  std::vector<std::pair<Edge, double>> items;
  items.reserve(edges.size());
  for (const auto& e : edges) {
    check_endpoints(e.u, e.v, num_vertices);
    if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
      throw InputError("edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                       ") has non-positive weight");
    }
    items.push_back({{std::min(e.u, e.v), std::max(e.u, e.v)}, e.weight});
  }
  std::stable_sort(items.begin(), items.end(),
                   [](const auto& x, const auto& y) { return x.first < y.first; });
  Graph g;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0 && items[i].first == items[i - 1].first) {
      if (items[i].second != items[i - 1].second) {
        throw InputError("edge (" + std::to_string(items[i].first.u) + ", " +
                         std::to_string(items[i].first.v) +
                         ") listed twice with different weights");
      }
      continue;
    }
    g.edges_.push_back(items[i].first);
    g.weights_.push_back(items[i].second);
  }
  if (std::all_of(g.weights_.begin(), g.weights_.end(), [](double w) { return w == 1.0; })) {
    g.weights_.clear();
  }
  g.build_adjacency(num_vertices);
  return g;
}

void Graph::build_adjacency(std::size_t num_vertices) {
  offsets_.assign(num_vertices + 1, 0);
  for (const auto& e : edges_) {
    ++offsets_[e.u + 1];
    ++offsets_[e.v + 1];
  }
  std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
  adjacency_.resize(2 * edges_.size());
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (EdgeId id = 0; id < edges_.size(); ++id) {
    const auto& e = edges_[id];
    adjacency_[cursor[e.u]++] = {e.v, id};
    adjacency_[cursor[e.v]++] = {e.u, id};
  }
  // Edges are sorted by (u, v), so each adjacency run comes out sorted by vertex.
}

std::vector<double> Graph::weights() const {
  if (!weights_.empty()) return weights_;
  return std::vector<double>(edges_.size(), 1.0);
}

std::optional<EdgeId> Graph::find_edge(Vertex a, Vertex b) const {
  if (a >= num_vertices() || b >= num_vertices()) return std::nullopt;
  auto nb = neighbors(a);
  auto it = std::lower_bound(nb.begin(), nb.end(), b,
                             [](const Neighbor& x, Vertex key) { return x.vertex < key; });
  if (it != nb.end() && it->vertex == b) return it->edge;
  return std::nullopt;
}

Graph Graph::relabeled(std::span<const Vertex> perm) const {
  if (perm.size() != num_vertices()) {
    throw InputError("permutation size does not match vertex count");
  }
  std::vector<WeightedEdge> out;
  out.reserve(edges_.size());
  for (EdgeId id = 0; id < edges_.size(); ++id) {
    out.push_back({perm[edges_[id].u], perm[edges_[id].v], weight(id)});
  }
  return from_weighted_edges(out, num_vertices());
}

bool operator==(const Graph& a, const Graph& b) {
  return a.num_vertices() == b.num_vertices() && a.edges_ == b.edges_ &&
         a.weights() == b.weights();
}

HopDistances bounded_hop_distances(const Graph& g, Vertex source, std::uint32_t max_hops) {
  if (source >= g.num_vertices()) {
    throw InputError("source vertex " + std::to_string(source) + " out of range");
  }
  HopDistances dist(g.num_vertices());
  std::vector<Vertex> frontier{source};
  std::vector<Vertex> next;
  dist[source] = 0;
  for (std::uint32_t level = 0; level < max_hops && !frontier.empty(); ++level) {
    next.clear();
    for (Vertex x : frontier) {
      for (const auto& nb : g.neighbors(x)) {
        if (!dist[nb.vertex]) {
          dist[nb.vertex] = level + 1;
          next.push_back(nb.vertex);
        }
      }
    }
    frontier.swap(next);
  }
  return dist;
}

HopDistances hop_distances(const Graph& g, Vertex source) {
  return bounded_hop_distances(g, source, std::numeric_limits<std::uint32_t>::max());
}

std::vector<double> weighted_distances(const Graph& g, Vertex source,
                                       std::span<const double> edge_lengths) {
  if (source >= g.num_vertices()) {
    throw InputError("source vertex " + std::to_string(source) + " out of range");
  }
  if (edge_lengths.size() != g.num_edges()) {
    throw InputError("edge length vector does not match edge count");
  }
  std::vector<double> dist(g.num_vertices(), kUnreachable);
  using Item = std::pair<double, Vertex>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[source] = 0.0;
  heap.push({0.0, source});
  while (!heap.empty()) {
    auto [d, x] = heap.top();
    heap.pop();
    if (d > dist[x]) continue;
    for (const auto& nb : g.neighbors(x)) {
      const double len = edge_lengths[nb.edge];
      if (len < 0.0) throw InputError("negative edge length in shortest-path query");
      const double cand = d + len;
      if (cand < dist[nb.vertex]) {
        dist[nb.vertex] = cand;
        heap.push({cand, nb.vertex});
      }
    }
  }
  return dist;
}

std::vector<double> weighted_distances(const Graph& g, Vertex source) {
  const auto w = g.weights();
  return weighted_distances(g, source, w);
}

std::vector<std::uint32_t> connected_components(const Graph& g) {
  constexpr auto kUnset = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> label(g.num_vertices(), kUnset);
  std::uint32_t next = 0;
  std::vector<Vertex> stack;
  for (Vertex s = 0; s < g.num_vertices(); ++s) {
    if (label[s] != kUnset) continue;
    label[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      Vertex x = stack.back();
      stack.pop_back();
      for (const auto& nb : g.neighbors(x)) {
        if (label[nb.vertex] == kUnset) {
          label[nb.vertex] = next;
          stack.push_back(nb.vertex);
        }
      }
    }
    ++next;
  }
  return label;
}

std::size_t count_components(const Graph& g) {
  const auto label = connected_components(g);
  return label.empty() ? 0 : *std::max_element(label.begin(), label.end()) + 1;
}

std::optional<Vertex> VicinityGraph::to_local(Vertex parent) const {
  auto it = std::lower_bound(to_parent.begin(), to_parent.end(), parent);
  if (it != to_parent.end() && *it == parent) {
    return static_cast<Vertex>(it - to_parent.begin());
  }
  return std::nullopt;
}

VicinityGraph induced_subgraph(const Graph& g, std::vector<Vertex> vertices) {
  std::sort(vertices.begin(), vertices.end());
  vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
  VicinityGraph vg;
  vg.to_parent = std::move(vertices);
  vg.core_size = vg.to_parent.size();
  std::vector<WeightedEdge> local_edges;
  for (Vertex lu = 0; lu < vg.to_parent.size(); ++lu) {
    for (const auto& nb : g.neighbors(vg.to_parent[lu])) {
      if (nb.vertex <= vg.to_parent[lu]) continue;
      if (auto lv = vg.to_local(nb.vertex)) {
        local_edges.push_back({lu, *lv, g.weight(nb.edge)});
      }
    }
  }
  vg.local = Graph::from_weighted_edges(local_edges, vg.to_parent.size());
  return vg;
}

VicinityGraph k_hop_vicinity(const Graph& g, Vertex u, std::uint32_t k) {
  const auto dist = bounded_hop_distances(g, u, k);
  std::vector<Vertex> members;
  for (Vertex x = 0; x < g.num_vertices(); ++x) {
    if (dist[x]) members.push_back(x);
  }
  auto vg = induced_subgraph(g, std::move(members));
  vg.roots = {u};
  vg.local_roots = {*vg.to_local(u)};
  return vg;
}

VicinityGraph pair_vicinity(const Graph& g, Vertex u, Vertex v, std::uint32_t k) {
  if (u == v) throw InputError("pair vicinity needs two distinct roots");
  const auto du = bounded_hop_distances(g, u, k);
  const auto dv = bounded_hop_distances(g, v, k);
  std::vector<Vertex> members;
  for (Vertex x = 0; x < g.num_vertices(); ++x) {
    if (du[x] && dv[x]) members.push_back(x);
  }
  const std::size_t core = members.size();
  members.push_back(u);
  members.push_back(v);
  auto vg = induced_subgraph(g, std::move(members));
  vg.core_size = core;
  vg.roots = {u, v};
  vg.local_roots = {*vg.to_local(u), *vg.to_local(v)};
  return vg;
}

}  // namespace locph
