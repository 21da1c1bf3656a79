#include "locph/graph_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <limits>
#include <optional>
#include <iomanip>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

namespace locph {

namespace {

struct RawEdge {
  std::string a;
  std::string b;
  double weight;
};

std::optional<std::uint64_t> parse_index(const std::string& token) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) return std::nullopt;
  return value;
}

std::string strip_comment(const std::string& line) {
  auto pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

}  // namespace

Vertex LoadedGraph::id_of(const std::string& name) const {
  auto it = index.find(name);
  if (it == index.end()) throw InputError("unknown vertex name '" + name + "'");
  return it->second;
}

void LoadedGraph::build_index() {
  index.clear();
  for (Vertex i = 0; i < names.size(); ++i) index.emplace(names[i], i);
}

LoadedGraph read_edge_list(std::istream& in) {
  std::vector<RawEdge> raw;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(strip_comment(line));
    RawEdge e{"", "", 1.0};
    if (!(fields >> e.a)) continue;
    std::string weight_token;
    if (!(fields >> e.b)) {
      throw InputError("line " + std::to_string(line_no) + ": expected `u v [weight]`");
    }
    if (fields >> weight_token) {
      try {
        std::size_t used = 0;
        e.weight = std::stod(weight_token, &used);
        if (used != weight_token.size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw InputError("line " + std::to_string(line_no) + ": bad weight '" +
                         weight_token + "'");
      }
      std::string extra;
      if (fields >> extra) {
        throw InputError("line " + std::to_string(line_no) + ": too many fields");
      }
    }
    raw.push_back(std::move(e));
  }

  LoadedGraph out;
  const bool numeric = std::all_of(raw.begin(), raw.end(), [](const RawEdge& e) {
    return parse_index(e.a) && parse_index(e.b);
  });
  std::vector<WeightedEdge> edges;
  edges.reserve(raw.size());
  if (numeric) {
    std::uint64_t max_id = 0;
    for (const auto& e : raw) {
      max_id = std::max({max_id, *parse_index(e.a), *parse_index(e.b)});
    }
    if (max_id >= std::numeric_limits<Vertex>::max()) throw InputError("vertex id too large");
    const std::size_t n = raw.empty() ? 0 : static_cast<std::size_t>(max_id) + 1;
    for (std::size_t i = 0; i < n; ++i) out.names.push_back(std::to_string(i));
    for (const auto& e : raw) {
      edges.push_back({static_cast<Vertex>(*parse_index(e.a)),
                       static_cast<Vertex>(*parse_index(e.b)), e.weight});
    }
  } else {
    std::unordered_map<std::string, Vertex> ids;
    auto intern = [&](const std::string& name) {
      auto [it, inserted] = ids.try_emplace(name, static_cast<Vertex>(out.names.size()));
      if (inserted) out.names.push_back(name);
      return it->second;
    };
    for (const auto& e : raw) edges.push_back({intern(e.a), intern(e.b), e.weight});
  }
  out.graph = Graph::from_weighted_edges(edges, out.names.size());
  out.build_index();
  return out;
}

LoadedGraph read_graph_json(std::istream& in) {
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("graph JSON: ") + e.what());
  }
  try {
    const auto n = doc.at("num_vertices").get<std::size_t>();
    const auto& jedges = doc.at("edges");
    std::vector<double> weights;
    if (doc.contains("weights")) weights = doc.at("weights").get<std::vector<double>>();
    if (!weights.empty() && weights.size() != jedges.size()) {
      throw InputError("graph JSON: weights and edges differ in length");
    }
    std::vector<WeightedEdge> edges;
    for (std::size_t i = 0; i < jedges.size(); ++i) {
      const auto pair = jedges[i].get<std::array<std::int64_t, 2>>();
      if (pair[0] < 0 || pair[1] < 0) throw InputError("graph JSON: negative vertex id");
      edges.push_back({static_cast<Vertex>(pair[0]), static_cast<Vertex>(pair[1]),
                       weights.empty() ? 1.0 : weights[i]});
    }
    LoadedGraph out;
    out.graph = Graph::from_weighted_edges(edges, n);
    for (std::size_t i = 0; i < n; ++i) out.names.push_back(std::to_string(i));
    out.build_index();
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("graph JSON: ") + e.what());
  }
}

LoadedGraph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open graph file '" + path + "'");
  if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0) {
    return read_graph_json(in);
  }
  return read_edge_list(in);
}

void write_edge_list(std::ostream& out, const Graph& g) {
  out << "# " << g.num_vertices() << " vertices, " << g.num_edges() << " edges\n";
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    out << g.edge(e).u << ' ' << g.edge(e).v;
    if (g.has_weights()) out << ' ' << std::setprecision(17) << g.weight(e);
    out << '\n';
  }
}

void write_graph_json(std::ostream& out, const Graph& g) {
  nlohmann::json doc;
  doc["num_vertices"] = g.num_vertices();
  auto& edges = doc["edges"] = nlohmann::json::array();
  for (const auto& e : g.edges()) edges.push_back({e.u, e.v});
  if (g.has_weights()) doc["weights"] = g.weights();
  out << doc.dump() << '\n';
}

std::vector<std::pair<Vertex, Vertex>> read_pairs(std::istream& in, const LoadedGraph& g) {
  std::vector<std::pair<Vertex, Vertex>> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(strip_comment(line));
    std::string a;
    std::string b;
    if (!(fields >> a)) continue;
    if (!(fields >> b)) {
      throw InputError("pairs line " + std::to_string(line_no) + ": expected `u v`");
    }
    const Vertex u = g.id_of(a);
    const Vertex v = g.id_of(b);
    if (u == v) {
      throw InputError("pairs line " + std::to_string(line_no) + ": pair repeats a vertex");
    }
    pairs.emplace_back(u, v);
  }
  return pairs;
}

std::vector<std::pair<Vertex, Vertex>> load_pairs(const std::string& path,
                                                  const LoadedGraph& g) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open pairs file '" + path + "'");
  return read_pairs(in, g);
}

}  // namespace locph
