#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace locph {

using Vertex = std::uint32_t;
using EdgeId = std::uint32_t;

/// Malformed user input (bad file, bad index, bad option). Maps to CLI exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Broken internal invariant. Maps to CLI exit code 3.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct Edge {
  Vertex u;  // u < v
  Vertex v;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct WeightedEdge {
  Vertex u;
  Vertex v;
  double weight = 1.0;
};

struct Neighbor {
  Vertex vertex;
  EdgeId edge;
};

/// Immutable simple undirected graph with positive edge weights (1.0 unless given).
///
/// Edges are canonicalized (u < v) and sorted, so EdgeId order is independent of
/// the order pairs were supplied in. Adjacency is stored CSR-style with neighbors
/// sorted by vertex id.
class Graph {
 public:
  Graph() = default;

  /// Collapses duplicate pairs; rejects self-loops and out-of-range endpoints.
  static Graph from_edge_list(std::span<const std::pair<Vertex, Vertex>> pairs,
                              std::size_t num_vertices);
  /// As above; a duplicate pair must repeat the same weight. Weights must be > 0.
  static Graph from_weighted_edges(std::span<const WeightedEdge> edges,
                                   std::size_t num_vertices);

  std::size_t num_vertices() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t num_edges() const { return edges_.size(); }
  bool empty() const { return num_vertices() == 0; }

  std::span<const Edge> edges() const { return edges_; }
  const Edge& edge(EdgeId e) const { return edges_[e]; }
  double weight(EdgeId e) const { return weights_.empty() ? 1.0 : weights_[e]; }
  bool has_weights() const { return !weights_.empty(); }
  std::vector<double> weights() const;

  std::span<const Neighbor> neighbors(Vertex v) const {
    return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
  }
  std::size_t degree(Vertex v) const { return offsets_[v + 1] - offsets_[v]; }
  std::optional<EdgeId> find_edge(Vertex a, Vertex b) const;

  /// Same graph with vertex v renamed to perm[v]; weights follow their edges.
  Graph relabeled(std::span<const Vertex> perm) const;

  friend bool operator==(const Graph& a, const Graph& b);

 private:
  void build_adjacency(std::size_t num_vertices);

  std::vector<Edge> edges_;
  std::vector<double> weights_;  // empty = unweighted
  std::vector<std::size_t> offsets_;
  std::vector<Neighbor> adjacency_;
};

/// Hop distances from one source; nullopt marks unreachable vertices.
using HopDistances = std::vector<std::optional<std::uint32_t>>;

HopDistances hop_distances(const Graph& g, Vertex source);

/// Same, but stops expanding past `max_hops`; farther vertices read as unreachable.
HopDistances bounded_hop_distances(const Graph& g, Vertex source, std::uint32_t max_hops);

inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();
inline bool is_reachable(double d) { return d != kUnreachable; }

/// Dijkstra under the graph's own weights. Unreachable vertices get kUnreachable.
std::vector<double> weighted_distances(const Graph& g, Vertex source);

/// Dijkstra under caller-supplied nonnegative per-edge lengths (indexed by EdgeId).
std::vector<double> weighted_distances(const Graph& g, Vertex source,
                                       std::span<const double> edge_lengths);

/// Component label per vertex; labels are dense and ordered by smallest member.
std::vector<std::uint32_t> connected_components(const Graph& g);
std::size_t count_components(const Graph& g);

/// Induced subgraph around one or two roots, with the map back to the parent.
struct VicinityGraph {
  Graph local;
  std::vector<Vertex> to_parent;     // local -> parent, strictly increasing
  std::vector<Vertex> roots;         // parent ids
  std::vector<Vertex> local_roots;   // same roots, local ids
  /// Number of vertices in the k-hop intersection proper. Pair vicinities may
  /// also hold roots outside the intersection as anchor vertices.
  std::size_t core_size = 0;

  std::size_t size() const { return to_parent.size(); }
  std::optional<Vertex> to_local(Vertex parent) const;
};

/// Induced subgraph on the given parent vertices (deduplicated, sorted).
VicinityGraph induced_subgraph(const Graph& g, std::vector<Vertex> vertices);

VicinityGraph k_hop_vicinity(const Graph& g, Vertex u, std::uint32_t k);

/// Induced subgraph on V_u^k ∩ V_v^k. A root outside the intersection is still
/// inserted (with its induced edges) so pair filters stay defined.
VicinityGraph pair_vicinity(const Graph& g, Vertex u, Vertex v, std::uint32_t k);

}  // namespace locph
