#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "locph/graph.hpp"

namespace locph {

enum class TransportMethod : std::uint8_t { kExactLp, kSinkhorn };

TransportMethod parse_transport_method(std::string_view name);  // exact-lp | sinkhorn
std::string_view to_string(TransportMethod method);

struct SinkhornOptions {
  double regularization = 0.1;
  int max_iterations = 1000;
  double tolerance = 1e-9;  // L1 violation of the row marginal
};

/// Discrete measure on graph vertices, support sorted by vertex id.
struct VertexMeasure {
  std::vector<Vertex> support;
  std::vector<double> mass;
};

/// alpha on x, (1 - alpha) / deg(x) on each neighbor.
VertexMeasure lazy_walk_measure(const Graph& g, Vertex x, double alpha);

/// Row-major |a| x |b| cost matrix.
struct TransportProblem {
  std::vector<double> a;
  std::vector<double> b;
  std::vector<double> cost;
  double cost_at(std::size_t i, std::size_t j) const { return cost[i * b.size() + j]; }
};

/// Exact optimal transport cost by successive shortest augmenting paths.
double transport_exact(const TransportProblem& p);

/// Entropic transport cost <P, C> of the log-domain Sinkhorn plan.
double transport_sinkhorn(const TransportProblem& p, const SinkhornOptions& opts = {});

/// Per-edge Ollivier-Ricci curvature under the hop metric.
struct CurvatureWeights {
  std::vector<double> kappa;           // indexed by EdgeId of the graph it was computed on
  std::vector<double> kappa_plus_one;  // same, shifted by +1 for use as edge lengths
  double alpha = 0.5;
  TransportMethod method = TransportMethod::kExactLp;
};

/// Wasserstein-1 distance between the lazy walks at the ends of edge e.
double edge_transport_cost(const Graph& g, EdgeId e, double alpha, TransportMethod method,
                           const SinkhornOptions& opts = {});

CurvatureWeights ollivier_ricci(const Graph& g, double alpha = 0.5,
                                TransportMethod method = TransportMethod::kExactLp,
                                const SinkhornOptions& opts = {});

}  // namespace locph
