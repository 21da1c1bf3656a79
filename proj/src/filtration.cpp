#include "locph/filtration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>
#include <numeric>

namespace locph {

VertexFilter VertexFilter::from_values(std::vector<double> values) {
  VertexFilter f;
  f.in_domain.assign(values.size(), 1);
  f.values = std::move(values);
  return f;
}

std::size_t VertexFilter::excluded() const {
  return static_cast<std::size_t>(std::count(in_domain.begin(), in_domain.end(), 0));
}

VertexFilter normalize(const VertexFilter& f) {
  VertexFilter out = f;
  out.normalized = true;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t v = 0; v < f.size(); ++v) {
    if (!f.in_domain[v]) continue;
    lo = std::min(lo, f.values[v]);
    hi = std::max(hi, f.values[v]);
  }
  for (std::size_t v = 0; v < f.size(); ++v) {
    if (!f.in_domain[v]) continue;
    out.values[v] = hi > lo ? (f.values[v] - lo) / (hi - lo) : 0.0;
  }
  return out;
}

EdgeMode parse_edge_mode(std::string_view name) {
  if (name == "classic") return EdgeMode::classic();
  if (name == "relaxed") return EdgeMode::relaxed();
  if (name == "relaxed-ascending") return {EdgeRule::kRelaxedAscending, EdgeRule::kUpperStar};
  if (name == "relaxed-descending") return {EdgeRule::kLowerStar, EdgeRule::kRelaxedDescending};
  throw InputError("unknown edge mode '" + std::string(name) +
                   "' (expected classic|relaxed|relaxed-ascending|relaxed-descending)");
}

std::string_view to_string(EdgeRule rule) {
  switch (rule) {
    case EdgeRule::kLowerStar: return "lower-star";
    case EdgeRule::kUpperStar: return "upper-star";
    case EdgeRule::kRelaxedAscending: return "relaxed-ascending";
    case EdgeRule::kRelaxedDescending: return "relaxed-descending";
  }
  return "?";
}

std::string to_string(EdgeMode mode) {
  if (mode == EdgeMode::classic()) return "classic";
  if (mode == EdgeMode::relaxed()) return "relaxed";
  return std::string(to_string(mode.ascending)) + "/" + std::string(to_string(mode.descending));
}

Filtration::Filtration(Graph complex, std::vector<double> vertex_values,
                       std::vector<double> ascending_edge_values,
                       std::vector<double> descending_edge_values, EdgeMode mode,
                       std::vector<Vertex> to_source)
    : complex_(std::move(complex)),
      vertex_values_(std::move(vertex_values)),
      ascending_(std::move(ascending_edge_values)),
      descending_(std::move(descending_edge_values)),
      mode_(mode),
      to_source_(std::move(to_source)) {
  if (vertex_values_.size() != complex_.num_vertices() ||
      ascending_.size() != complex_.num_edges() || descending_.size() != complex_.num_edges()) {
    throw InputError("filtration value arrays do not match the complex");
  }
  if (to_source_.empty()) {
    to_source_.resize(complex_.num_vertices());
    std::iota(to_source_.begin(), to_source_.end(), Vertex{0});
  }
  for (double x : vertex_values_) {
    if (!std::isfinite(x)) throw InputError("filtration has a non-finite vertex value");
  }
  for (EdgeId e = 0; e < complex_.num_edges(); ++e) {
    const auto [u, v] = complex_.edge(e);
    const double hi = std::max(vertex_values_[u], vertex_values_[v]);
    const double lo = std::min(vertex_values_[u], vertex_values_[v]);
    if (!(ascending_[e] >= hi) || !(descending_[e] <= lo)) {
      throw InputError("edge " + std::to_string(e) +
                       " would enter a phase before one of its endpoints");
    }
  }
}

std::vector<FiltrationStep> Filtration::steps() const {
  std::vector<FiltrationStep> asc;
  std::vector<FiltrationStep> desc;
  for (Vertex v = 0; v < complex_.num_vertices(); ++v) {
    asc.push_back({SimplexKind::kVertex, v, vertex_values_[v], Phase::kAscending});
    desc.push_back({SimplexKind::kVertex, v, vertex_values_[v], Phase::kDescending});
  }
  for (EdgeId e = 0; e < complex_.num_edges(); ++e) {
    asc.push_back({SimplexKind::kEdge, e, ascending_[e], Phase::kAscending});
    desc.push_back({SimplexKind::kEdge, e, descending_[e], Phase::kDescending});
  }
  auto key = [](const FiltrationStep& s) { return std::tuple(s.kind, s.index); };
  std::sort(asc.begin(), asc.end(), [&](const auto& a, const auto& b) {
    if (a.value != b.value) return a.value < b.value;
    return key(a) < key(b);
  });
  std::sort(desc.begin(), desc.end(), [&](const auto& a, const auto& b) {
    if (a.value != b.value) return a.value > b.value;
    return key(a) < key(b);
  });
  asc.insert(asc.end(), desc.begin(), desc.end());
  return asc;
}

std::pair<double, double> Filtration::value_range() const {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double x : vertex_values_) lo = std::min(lo, x), hi = std::max(hi, x);
  // Edge values only extend the range outward: ascending upward, descending downward.
  for (double x : ascending_) hi = std::max(hi, x);
  for (double x : descending_) lo = std::min(lo, x);
  return {lo, hi};
}

Filtration Filtration::normalized() const {
  if (complex_.num_vertices() == 0) return *this;
  const auto [lo, hi] = value_range();
  auto rescale = [lo = lo, hi = hi](std::vector<double> xs) {
    for (double& x : xs) x = hi > lo ? (x - lo) / (hi - lo) : 0.0;
    return xs;
  };
  return Filtration(complex_, rescale(vertex_values_), rescale(ascending_),
                    rescale(descending_), mode_, to_source_);
}

Filtration Filtration::shifted(double offset) const {
  auto shift = [offset](std::vector<double> xs) {
    for (double& x : xs) x += offset;
    return xs;
  };
  return Filtration(complex_, shift(vertex_values_), shift(ascending_), shift(descending_),
                    mode_, to_source_);
}

namespace {

double edge_value(EdgeRule rule, double a, double b, double offset) {
  switch (rule) {
    case EdgeRule::kLowerStar: return std::max(a, b);
    case EdgeRule::kUpperStar: return std::min(a, b);
    case EdgeRule::kRelaxedAscending: return a == b ? a + offset : std::max(a, b);
    case EdgeRule::kRelaxedDescending: return a == b ? a - offset : std::min(a, b);
  }
  return 0.0;
}

}  // namespace

Filtration extend_to_edges(const Graph& g, const VertexFilter& f, EdgeMode mode,
                           double relax_offset) {
  if (f.size() != g.num_vertices()) {
    throw InputError("filter size does not match the graph");
  }
  const bool asc_ok =
      mode.ascending == EdgeRule::kLowerStar || mode.ascending == EdgeRule::kRelaxedAscending;
  const bool desc_ok =
      mode.descending == EdgeRule::kUpperStar || mode.descending == EdgeRule::kRelaxedDescending;
  if (!asc_ok || !desc_ok) throw InputError("edge mode mixes up ascending/descending rules");
  if (!(relax_offset > 0.0)) throw InputError("relaxation offset must be positive");

  std::vector<Vertex> to_source;
  std::vector<Vertex> to_domain(g.num_vertices(), std::numeric_limits<Vertex>::max());
  std::vector<double> values;
  for (Vertex v = 0; v < g.num_vertices(); ++v) {
    if (!f.defined(v)) continue;
    to_domain[v] = static_cast<Vertex>(to_source.size());
    to_source.push_back(v);
    values.push_back(f.values[v]);
  }
  std::vector<std::pair<Vertex, Vertex>> pairs;
  for (const auto& e : g.edges()) {
    if (f.defined(e.u) && f.defined(e.v)) pairs.emplace_back(to_domain[e.u], to_domain[e.v]);
  }
  // Domain ids are monotone in source ids, so edge order is preserved.
  Graph complex = Graph::from_edge_list(pairs, to_source.size());
  std::vector<double> asc(complex.num_edges());
  std::vector<double> desc(complex.num_edges());
  for (EdgeId e = 0; e < complex.num_edges(); ++e) {
    const double a = values[complex.edge(e).u];
    const double b = values[complex.edge(e).v];
    asc[e] = edge_value(mode.ascending, a, b, relax_offset);
    desc[e] = edge_value(mode.descending, a, b, relax_offset);
  }
  return Filtration(std::move(complex), std::move(values), std::move(asc), std::move(desc),
                    mode, std::move(to_source));
}

}  // namespace locph
