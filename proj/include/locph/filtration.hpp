#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "locph/graph.hpp"

namespace locph {

/// Real values on the vertices of a (vicinity) graph.
///
/// Vertices outside the domain (e.g. unreachable from a root) carry no value
/// and are dropped, together with their edges, when the filtration is built.
struct VertexFilter {
  std::vector<double> values;
  std::vector<std::uint8_t> in_domain;  // 1 = defined
  bool normalized = false;

  static VertexFilter from_values(std::vector<double> values);

  std::size_t size() const { return values.size(); }
  bool defined(Vertex v) const { return in_domain[v] != 0; }
  std::size_t excluded() const;
};

/// Affine map of [min, max] onto [0, 1]; a constant filter maps to zeros.
VertexFilter normalize(const VertexFilter& f);

/// How an edge takes its value from its endpoints in one phase.
enum class EdgeRule : std::uint8_t {
  kLowerStar,          // max(f(u), f(v))
  kUpperStar,          // min(f(u), f(v))
  kRelaxedAscending,   // max on distinct values, f + offset on ties
  kRelaxedDescending,  // min on distinct values, f - offset on ties
};

/// Rule for the ascending phase and rule for the descending phase.
struct EdgeMode {
  EdgeRule ascending = EdgeRule::kLowerStar;
  EdgeRule descending = EdgeRule::kUpperStar;

  static constexpr EdgeMode classic() { return {}; }
  static constexpr EdgeMode relaxed() {
    return {EdgeRule::kRelaxedAscending, EdgeRule::kRelaxedDescending};
  }
  friend bool operator==(const EdgeMode&, const EdgeMode&) = default;
};

/// Parses `classic`, `relaxed`, `relaxed-ascending`, `relaxed-descending`.
EdgeMode parse_edge_mode(std::string_view name);
std::string to_string(EdgeMode mode);
std::string_view to_string(EdgeRule rule);

enum class Phase : std::uint8_t { kAscending, kDescending };
enum class SimplexKind : std::uint8_t { kVertex, kEdge };

struct FiltrationStep {
  SimplexKind kind;
  std::uint32_t index;  // Vertex or EdgeId of Filtration::complex()
  double value;
  Phase phase;
};

/// A graph complex with vertex values and per-phase edge values.
///
/// Ascending order sorts by (value, dimension, index); descending order sorts
/// by (value descending, dimension, index). Construction checks that every edge
/// enters each phase no earlier than its endpoints.
class Filtration {
 public:
  Filtration() = default;
  Filtration(Graph complex, std::vector<double> vertex_values,
             std::vector<double> ascending_edge_values,
             std::vector<double> descending_edge_values, EdgeMode mode,
             std::vector<Vertex> to_source = {});

  const Graph& complex() const { return complex_; }
  /// Complex vertex -> vertex of the graph the filter was defined on.
  std::span<const Vertex> to_source() const { return to_source_; }
  EdgeMode mode() const { return mode_; }

  double vertex_value(Vertex v) const { return vertex_values_[v]; }
  double ascending_value(EdgeId e) const { return ascending_[e]; }
  double descending_value(EdgeId e) const { return descending_[e]; }
  std::span<const double> vertex_values() const { return vertex_values_; }
  std::span<const double> ascending_values() const { return ascending_; }
  std::span<const double> descending_values() const { return descending_; }

  std::size_t num_simplices() const { return complex_.num_vertices() + complex_.num_edges(); }

  /// Full ascending-then-descending simplex order.
  std::vector<FiltrationStep> steps() const;

  /// Affine rescale of every simplex value (both phases) onto [0, 1].
  Filtration normalized() const;
  /// Every value plus `offset`.
  Filtration shifted(double offset) const;
  /// Smallest and largest value over all simplices and both phases.
  std::pair<double, double> value_range() const;

 private:
  Graph complex_;
  std::vector<double> vertex_values_;
  std::vector<double> ascending_;
  std::vector<double> descending_;
  EdgeMode mode_;
  std::vector<Vertex> to_source_;
};

/// Restricts `g` to the filter's domain and assigns edge values per `mode`.
/// `relax_offset` is the tie offset of the relaxed rules.
Filtration extend_to_edges(const Graph& g, const VertexFilter& f, EdgeMode mode,
                           double relax_offset = 0.5);

}  // namespace locph
