#include "locph/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace locph {

TransportMethod parse_transport_method(std::string_view name) {
  if (name == "exact-lp" || name == "exact") return TransportMethod::kExactLp;
  if (name == "sinkhorn") return TransportMethod::kSinkhorn;
  throw InputError("unknown transport method '" + std::string(name) +
                   "' (expected exact-lp|sinkhorn)");
}

std::string_view to_string(TransportMethod method) {
  return method == TransportMethod::kExactLp ? "exact-lp" : "sinkhorn";
}

VertexMeasure lazy_walk_measure(const Graph& g, Vertex x, double alpha) {
  const auto nb = g.neighbors(x);
  if (nb.empty()) throw InternalError("lazy walk requested at isolated vertex");
  VertexMeasure m;
  const double share = (1.0 - alpha) / static_cast<double>(nb.size());
  bool placed = alpha == 0.0;  // a zero atom would only add a dead row
  for (const auto& n : nb) {
    if (!placed && x < n.vertex) {
      m.support.push_back(x), m.mass.push_back(alpha);
      placed = true;
    }
    m.support.push_back(n.vertex), m.mass.push_back(share);
  }
  if (!placed) m.support.push_back(x), m.mass.push_back(alpha);
  return m;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void validate(const TransportProblem& p) {
  if (p.a.empty() || p.b.empty() || p.cost.size() != p.a.size() * p.b.size()) {
    throw InputError("malformed transport problem");
  }
}

}  // namespace

double transport_exact(const TransportProblem& p) {
  validate(p);
  const std::size_t na = p.a.size();
  const std::size_t nb = p.b.size();
  // Residual network source -> a_i -> b_j -> sink with explicit arcs.
  struct Arc {
    std::size_t to;
    double cap;
    double cost;
  };
  const std::size_t source = na + nb;
  const std::size_t sink = source + 1;
  const std::size_t nodes = sink + 1;
  std::vector<Arc> arcs;
  std::vector<std::vector<std::size_t>> out(nodes);
  auto add = [&](std::size_t from, std::size_t to, double cap, double cost) {
    out[from].push_back(arcs.size());
    arcs.push_back({to, cap, cost});
    out[to].push_back(arcs.size());
    arcs.push_back({from, 0.0, -cost});
  };
  for (std::size_t i = 0; i < na; ++i) add(source, i, p.a[i], 0.0);
  for (std::size_t j = 0; j < nb; ++j) add(na + j, sink, p.b[j], 0.0);
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t j = 0; j < nb; ++j) add(i, na + j, kInf, p.cost_at(i, j));
  }

  constexpr double kEps = 1e-15;
  std::vector<double> dist(nodes);
  std::vector<std::size_t> via(nodes);
  double total = 0.0;
  for (;;) {
    // Bellman-Ford: reverse arcs carry negative costs, no negative cycles at optimum.
    std::fill(dist.begin(), dist.end(), kInf);
    dist[source] = 0.0;
    for (std::size_t round = 0; round < nodes; ++round) {
      bool changed = false;
      for (std::size_t u = 0; u < nodes; ++u) {
        if (dist[u] == kInf) continue;
        for (std::size_t id : out[u]) {
          const Arc& a = arcs[id];
          if (a.cap > kEps && dist[u] + a.cost < dist[a.to] - 1e-12) {
            dist[a.to] = dist[u] + a.cost;
            via[a.to] = id;
            changed = true;
          }
        }
      }
      if (!changed) break;
    }
    if (dist[sink] == kInf) break;
    double push = kInf;
    for (std::size_t v = sink; v != source; v = arcs[via[v] ^ 1].to) {
      push = std::min(push, arcs[via[v]].cap);
    }
    for (std::size_t v = sink; v != source; v = arcs[via[v] ^ 1].to) {
      arcs[via[v]].cap -= push;
      arcs[via[v] ^ 1].cap += push;
    }
    total += push * dist[sink];
  }
  return total;
}

double transport_sinkhorn(const TransportProblem& p, const SinkhornOptions& opts) {
  validate(p);
  if (!(opts.regularization > 0.0)) throw InputError("Sinkhorn regularization must be positive");
  const std::size_t na = p.a.size();
  const std::size_t nb = p.b.size();
  const double eps = opts.regularization;
  std::vector<double> f(na, 0.0);
  std::vector<double> g(nb, 0.0);
  std::vector<double> log_a(na);
  std::vector<double> log_b(nb);
  for (std::size_t i = 0; i < na; ++i) log_a[i] = std::log(p.a[i]);
  for (std::size_t j = 0; j < nb; ++j) log_b[j] = std::log(p.b[j]);
  std::vector<double> terms(std::max(na, nb));

  auto logsumexp = [&](std::size_t count) {
    double hi = -kInf;
    for (std::size_t k = 0; k < count; ++k) hi = std::max(hi, terms[k]);
    if (hi == -kInf) return hi;
    double s = 0.0;
    for (std::size_t k = 0; k < count; ++k) s += std::exp(terms[k] - hi);
    return hi + std::log(s);
  };

  for (int it = 0; it < opts.max_iterations; ++it) {
    for (std::size_t i = 0; i < na; ++i) {
      for (std::size_t j = 0; j < nb; ++j) terms[j] = (g[j] - p.cost_at(i, j)) / eps;
      f[i] = eps * (log_a[i] - logsumexp(nb));
    }
    for (std::size_t j = 0; j < nb; ++j) {
      for (std::size_t i = 0; i < na; ++i) terms[i] = (f[i] - p.cost_at(i, j)) / eps;
      g[j] = eps * (log_b[j] - logsumexp(na));
    }
    // Columns match exactly after the g-update; measure the row violation.
    double violation = 0.0;
    for (std::size_t i = 0; i < na; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < nb; ++j) row += std::exp((f[i] + g[j] - p.cost_at(i, j)) / eps);
      violation += std::abs(row - p.a[i]);
    }
    if (violation < opts.tolerance) break;
  }

  double total = 0.0;
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t j = 0; j < nb; ++j) {
      total += std::exp((f[i] + g[j] - p.cost_at(i, j)) / eps) * p.cost_at(i, j);
    }
  }
  return total;
}

namespace {

/// Hop distances up to 2 from x; anything farther reads as 3, which is exact
/// for supports drawn from the closed neighborhoods of an edge's endpoints.
class NearDistances {
 public:
  explicit NearDistances(std::size_t n) : dist_(n, 3) {}

  void load(const Graph& g, Vertex x) {
    for (Vertex v : touched_) dist_[v] = 3;
    touched_.clear();
    mark(x, 0);
    for (const auto& a : g.neighbors(x)) mark(a.vertex, 1);
    for (const auto& a : g.neighbors(x)) {
      for (const auto& b : g.neighbors(a.vertex)) mark(b.vertex, 2);
    }
  }
  double operator[](Vertex v) const { return dist_[v]; }

 private:
  void mark(Vertex v, std::uint8_t d) {
    if (dist_[v] <= d) return;
    dist_[v] = d;
    touched_.push_back(v);
  }
  std::vector<std::uint8_t> dist_;
  std::vector<Vertex> touched_;
};

double edge_cost_with(const Graph& g, EdgeId e, double alpha, TransportMethod method,
                      const SinkhornOptions& opts, NearDistances& near) {
  const auto [u, v] = g.edge(e);
  const auto mu = lazy_walk_measure(g, u, alpha);
  const auto nu = lazy_walk_measure(g, v, alpha);
  if (mu.support == nu.support && mu.mass == nu.mass) return 0.0;
  TransportProblem p{mu.mass, nu.mass, std::vector<double>(mu.mass.size() * nu.mass.size())};
  for (std::size_t i = 0; i < mu.support.size(); ++i) {
    near.load(g, mu.support[i]);
    for (std::size_t j = 0; j < nu.support.size(); ++j) {
      p.cost[i * nu.support.size() + j] = near[nu.support[j]];
    }
  }
  return method == TransportMethod::kExactLp ? transport_exact(p) : transport_sinkhorn(p, opts);
}

void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw InputError("curvature alpha must lie in [0, 1)");
}

}  // namespace

double edge_transport_cost(const Graph& g, EdgeId e, double alpha, TransportMethod method,
                           const SinkhornOptions& opts) {
  check_alpha(alpha);
  NearDistances near(g.num_vertices());
  return edge_cost_with(g, e, alpha, method, opts, near);
}

CurvatureWeights ollivier_ricci(const Graph& g, double alpha, TransportMethod method,
                                const SinkhornOptions& opts) {
  check_alpha(alpha);
  CurvatureWeights out;
  out.alpha = alpha;
  out.method = method;
  out.kappa.resize(g.num_edges());
  out.kappa_plus_one.resize(g.num_edges());
  NearDistances near(g.num_vertices());
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    // Ground metric is the hop metric, so every edge has length 1.
    out.kappa[e] = 1.0 - edge_cost_with(g, e, alpha, method, opts, near);
    out.kappa_plus_one[e] = out.kappa[e] + 1.0;
  }
  return out;
}

}  // namespace locph
