#pragma once

#include <iosfwd>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "locph/graph.hpp"

namespace locph {

/// A graph plus the external vertex names it was read with.
///
/// When every token in the input is a non-negative integer the tokens are used
/// as indices directly (and `names[i] == std::to_string(i)`); otherwise names
/// are assigned dense ids in order of first appearance.
struct LoadedGraph {
  Graph graph;
  std::vector<std::string> names;
  std::unordered_map<std::string, Vertex> index;

  Vertex id_of(const std::string& name) const;
  void build_index();
};

/// Edge-list text: one `u v [weight]` per line, `#` starts a comment.
LoadedGraph read_edge_list(std::istream& in);
/// JSON: {"num_vertices": n, "edges": [[u, v], ...], "weights": [w, ...]}.
LoadedGraph read_graph_json(std::istream& in);
/// Dispatches on extension: `.json` is JSON, anything else is an edge list.
LoadedGraph load_graph(const std::string& path);

void write_edge_list(std::ostream& out, const Graph& g);
void write_graph_json(std::ostream& out, const Graph& g);

/// Pairs file: one `u v` per line in the graph's naming, `#` comments.
std::vector<std::pair<Vertex, Vertex>> read_pairs(std::istream& in, const LoadedGraph& g);
std::vector<std::pair<Vertex, Vertex>> load_pairs(const std::string& path,
                                                  const LoadedGraph& g);

}  // namespace locph
