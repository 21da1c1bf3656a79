#include "locph/persistence.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

namespace locph {

namespace {

constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

std::uint32_t find_root(std::vector<std::uint32_t>& parent, std::uint32_t x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

/// Ascending union-find. Roots are always the component's oldest vertex
/// (smallest value, then smallest index).
void ascending_zero_dim(const Filtration& filt, PersistenceDiagram& out) {
  const Graph& g = filt.complex();
  const std::size_t n = g.num_vertices();
  std::vector<std::uint32_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0u);
  auto older = [&](std::uint32_t a, std::uint32_t b) {
    const double fa = filt.vertex_value(a);
    const double fb = filt.vertex_value(b);
    return fa != fb ? fa < fb : a < b;
  };

  std::vector<EdgeId> order(g.num_edges());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](EdgeId a, EdgeId b) {
    const double x = filt.ascending_value(a);
    const double y = filt.ascending_value(b);
    return x != y ? x < y : a < b;
  });
  for (EdgeId e : order) {
    std::uint32_t ru = find_root(parent, g.edge(e).u);
    std::uint32_t rv = find_root(parent, g.edge(e).v);
    if (ru == rv) continue;
    if (older(rv, ru)) std::swap(ru, rv);
    // ru survives, rv's class dies at this edge.
    const double birth = filt.vertex_value(rv);
    const double death = filt.ascending_value(e);
    if (birth != death) out.points.push_back({birth, death, 0, PointKind::kOrdinary});
    parent[rv] = ru;
  }

  std::vector<double> comp_max(n, -std::numeric_limits<double>::infinity());
  for (std::uint32_t v = 0; v < n; ++v) {
    const std::uint32_t r = find_root(parent, v);
    comp_max[r] = std::max(comp_max[r], filt.vertex_value(v));
  }
  for (std::uint32_t v = 0; v < n; ++v) {
    if (parent[v] == v) {
      out.points.push_back({filt.vertex_value(v), comp_max[v], 0, PointKind::kExtended});
    }
  }
}

/// Descending union-find; the elder is the larger value, ties to the smaller index.
void descending_relative(const Filtration& filt, PersistenceDiagram& out) {
  const Graph& g = filt.complex();
  std::vector<std::uint32_t> parent(g.num_vertices());
  std::iota(parent.begin(), parent.end(), 0u);
  auto older = [&](std::uint32_t a, std::uint32_t b) {
    const double fa = filt.vertex_value(a);
    const double fb = filt.vertex_value(b);
    return fa != fb ? fa > fb : a < b;
  };
  std::vector<EdgeId> order(g.num_edges());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](EdgeId a, EdgeId b) {
    const double x = filt.descending_value(a);
    const double y = filt.descending_value(b);
    return x != y ? x > y : a < b;
  });
  for (EdgeId e : order) {
    std::uint32_t ru = find_root(parent, g.edge(e).u);
    std::uint32_t rv = find_root(parent, g.edge(e).v);
    if (ru == rv) continue;
    if (older(rv, ru)) std::swap(ru, rv);
    const double birth = filt.vertex_value(rv);
    const double death = filt.descending_value(e);
    if (birth != death) out.points.push_back({birth, death, 1, PointKind::kRelative});
    parent[rv] = ru;
  }
}

}  // namespace

std::string_view to_string(PointKind kind) {
  switch (kind) {
    case PointKind::kOrdinary: return "ordinary";
    case PointKind::kRelative: return "relative";
    case PointKind::kExtended: return "extended";
  }
  return "?";
}

void PersistenceDiagram::canonicalize() {
  std::sort(points.begin(), points.end(), [](const auto& a, const auto& b) {
    return std::tie(a.dimension, a.kind, a.birth, a.death) <
           std::tie(b.dimension, b.kind, b.birth, b.death);
  });
}

std::size_t PersistenceDiagram::count(std::uint8_t dimension, PointKind kind) const {
  return static_cast<std::size_t>(std::count_if(points.begin(), points.end(), [&](const auto& p) {
    return p.dimension == dimension && p.kind == kind;
  }));
}

std::size_t PersistenceDiagram::count_at(std::uint8_t dimension, PointKind kind, double birth,
                                         double death) const {
  return static_cast<std::size_t>(std::count_if(points.begin(), points.end(), [&](const auto& p) {
    return p.dimension == dimension && p.kind == kind && p.birth == birth && p.death == death;
  }));
}

BettiNumbers betti_numbers(const Graph& g) {
  BettiNumbers b;
  b.b0 = count_components(g);
  b.b1 = g.num_edges() + b.b0 - g.num_vertices();
  return b;
}

PersistenceCounters& persistence_counters() {
  static PersistenceCounters counters;
  return counters;
}

void check_betti(const PersistenceDiagram& d, const Graph& complex) {
  auto& counters = persistence_counters();
  counters.betti_checks.fetch_add(1, std::memory_order_relaxed);
  const auto betti = betti_numbers(complex);
  const auto ext0 = d.count(0, PointKind::kExtended);
  const auto ext1 = d.count(1, PointKind::kExtended);
  if (ext0 != betti.b0 || ext1 != betti.b1) {
    counters.betti_violations.fetch_add(1, std::memory_order_relaxed);
    throw InternalError("diagram has " + std::to_string(ext0) + " essential 0D / " +
                        std::to_string(ext1) + " extended 1D points, complex has b0=" +
                        std::to_string(betti.b0) + " b1=" + std::to_string(betti.b1));
  }
}

PersistenceDiagram ordinary_pd0(const Filtration& filt) {
  PersistenceDiagram out;
  ascending_zero_dim(filt, out);
  out.canonicalize();
  return out;
}

PersistenceDiagram ExtendedPersistence::compute(const Filtration& filt) {
  const Graph& g = filt.complex();
  const std::size_t n = g.num_vertices();
  const std::size_t m = g.num_edges();
  PersistenceDiagram out;
  ascending_zero_dim(filt, out);
  descending_relative(filt, out);

  // Descending vertex order.
  std::vector<Vertex> by_desc(n);
  std::iota(by_desc.begin(), by_desc.end(), 0u);
  std::sort(by_desc.begin(), by_desc.end(), [&](Vertex a, Vertex b) {
    const double fa = filt.vertex_value(a);
    const double fb = filt.vertex_value(b);
    return fa != fb ? fa > fb : a < b;
  });
  std::vector<std::uint32_t> rank(n);
  for (std::uint32_t r = 0; r < n; ++r) rank[by_desc[r]] = r;

  // An edge whose descending value equals its lower endpoint's value enters
  // together with that endpoint; any other edge enters later as its own event.
  struct Event {
    double value;
    std::uint8_t dim;
    std::uint32_t index;
  };
  std::vector<Event> events;
  events.reserve(n + m);
  for (Vertex v = 0; v < n; ++v) events.push_back({filt.vertex_value(v), 0, rank[v]});
  std::vector<Vertex> low_end(m);
  std::vector<Vertex> high_end(m);
  std::vector<std::uint8_t> attached(m);
  for (EdgeId e = 0; e < m; ++e) {
    const auto [a, b] = g.edge(e);
    low_end[e] = rank[a] > rank[b] ? a : b;
    high_end[e] = rank[a] > rank[b] ? b : a;
    attached[e] = filt.descending_value(e) == filt.vertex_value(low_end[e]);
    if (!attached[e]) events.push_back({filt.descending_value(e), 1, e});
  }
  std::sort(events.begin(), events.end(), [](const Event& x, const Event& y) {
    if (x.value != y.value) return x.value > y.value;
    if (x.dim != y.dim) return x.dim < y.dim;
    return x.index < y.index;
  });

  event_of_vertex_.assign(n, kNone);
  event_of_edge_.assign(m, kNone);
  std::vector<std::uint32_t> copies_at(events.size(), 0);
  for (std::uint32_t p = 0; p < events.size(); ++p) {
    if (events[p].dim == 0) {
      event_of_vertex_[by_desc[events[p].index]] = p;
    } else {
      event_of_edge_[events[p].index] = p;
      copies_at[p] = 2;
    }
  }
  for (EdgeId e = 0; e < m; ++e) {
    if (attached[e]) {
      event_of_edge_[e] = event_of_vertex_[low_end[e]];
      ++copies_at[event_of_edge_[e]];
    }
  }

  ascending_edges_.resize(m);
  std::iota(ascending_edges_.begin(), ascending_edges_.end(), 0u);
  std::sort(ascending_edges_.begin(), ascending_edges_.end(), [&](EdgeId a, EdgeId b) {
    const double x = filt.ascending_value(a);
    const double y = filt.ascending_value(b);
    return x != y ? x < y : a < b;
  });

  std::size_t max_copies = 0;
  for (auto c : copies_at) max_copies = std::max<std::size_t>(max_copies, c);
  parent_.resize(n + max_copies);
  flagged_.resize(n + max_copies);

  for (std::uint32_t p = 0; p < events.size(); ++p) {
    if (copies_at[p] < 2) continue;
    const double death = events[p].value;
    std::iota(parent_.begin(), parent_.end(), 0u);
    std::fill(flagged_.begin(), flagged_.end(), 0);
    std::uint32_t next_copy = static_cast<std::uint32_t>(n);

    // Joins the components of x and y at ascending value `at`.
    auto unite = [&](std::uint32_t x, std::uint32_t y, double at) {
      const std::uint32_t rx = find_root(parent_, x);
      const std::uint32_t ry = find_root(parent_, y);
      if (rx == ry) return;
      if (flagged_[rx] && flagged_[ry]) {
        out.points.push_back({at, death, 1, PointKind::kExtended});
      }
      parent_[ry] = rx;
      flagged_[rx] = flagged_[rx] | flagged_[ry];
    };
    auto new_copy = [&]() {
      const std::uint32_t c = next_copy++;
      flagged_[c] = 1;
      return c;
    };

    for (EdgeId e : ascending_edges_) {
      const std::uint32_t q = event_of_edge_[e];
      if (q > p) continue;
      const double at = filt.ascending_value(e);
      if (q < p) {
        unite(g.edge(e).u, g.edge(e).v, at);
      } else if (events[p].dim == 0) {
        unite(new_copy(), high_end[e], at);
      } else {
        unite(new_copy(), g.edge(e).u, at);
        unite(new_copy(), g.edge(e).v, at);
      }
    }
  }

  out.canonicalize();
  persistence_counters().diagrams.fetch_add(1, std::memory_order_relaxed);
  check_betti(out, g);
  return out;
}

PersistenceDiagram extended_pd(const Filtration& filt) {
  ExtendedPersistence engine;
  return engine.compute(filt);
}

PersistenceDiagram matrix_reduction_epd(const Filtration& filt, std::size_t max_simplices) {
  const Graph& g = filt.complex();
  if (filt.num_simplices() > max_simplices) {
    throw InputError("matrix-reduction oracle refuses " + std::to_string(filt.num_simplices()) +
                     " simplices (cap " + std::to_string(max_simplices) + ")");
  }
  const std::size_t n = g.num_vertices();
  const std::size_t m = g.num_edges();
  const auto steps = filt.steps();

  // Column 0 is the cone apex; then the ascending simplices; then one cone
  // simplex w*s per descending step.
  const std::size_t total = 1 + steps.size();
  std::vector<std::uint32_t> asc_vertex(n), asc_edge(m), cone_vertex(n), cone_edge(m);
  for (std::uint32_t i = 0; i < steps.size(); ++i) {
    const auto& s = steps[i];
    const std::uint32_t col = i + 1;
    const bool asc = s.phase == Phase::kAscending;
    if (s.kind == SimplexKind::kVertex) {
      (asc ? asc_vertex : cone_vertex)[s.index] = col;
    } else {
      (asc ? asc_edge : cone_edge)[s.index] = col;
    }
  }

  std::vector<std::vector<std::uint32_t>> columns(total);
  for (std::uint32_t i = 0; i < steps.size(); ++i) {
    const auto& s = steps[i];
    auto& col = columns[i + 1];
    if (s.phase == Phase::kAscending) {
      if (s.kind == SimplexKind::kEdge) {
        col = {asc_vertex[g.edge(s.index).u], asc_vertex[g.edge(s.index).v]};
      }
    } else if (s.kind == SimplexKind::kVertex) {
      col = {0u, asc_vertex[s.index]};  // d(w*v) = v + w
    } else {
      const auto [u, v] = g.edge(s.index);
      col = {asc_edge[s.index], cone_vertex[u], cone_vertex[v]};  // d(w*e) = e + w*de
    }
    std::sort(col.begin(), col.end());
  }

  std::vector<std::uint32_t> pivot_owner(total, kNone);
  std::vector<std::uint32_t> scratch;
  PersistenceDiagram out;
  auto step_of = [&](std::uint32_t col) -> const FiltrationStep& { return steps[col - 1]; };

  for (std::uint32_t j = 1; j < total; ++j) {
    auto& col = columns[j];
    while (!col.empty() && pivot_owner[col.back()] != kNone) {
      const auto& other = columns[pivot_owner[col.back()]];
      scratch.clear();
      std::set_symmetric_difference(col.begin(), col.end(), other.begin(), other.end(),
                                    std::back_inserter(scratch));
      col.swap(scratch);
    }
    if (col.empty()) continue;
    const std::uint32_t low = col.back();
    pivot_owner[low] = j;
    if (low == 0) throw InternalError("cone apex was paired during reduction");

    const auto& born = step_of(low);
    const auto& dies = step_of(j);
    const bool born_asc = born.phase == Phase::kAscending;
    const bool dies_asc = dies.phase == Phase::kAscending;
    if (born_asc && dies_asc) {
      if (born.value != dies.value) {
        out.points.push_back({born.value, dies.value, 0, PointKind::kOrdinary});
      }
    } else if (born_asc) {
      const std::uint8_t dim = born.kind == SimplexKind::kVertex ? 0 : 1;
      out.points.push_back({born.value, dies.value, dim, PointKind::kExtended});
    } else {
      if (born.value != dies.value) {
        out.points.push_back({born.value, dies.value, 1, PointKind::kRelative});
      }
    }
  }
  out.canonicalize();
  return out;
}

}  // namespace locph
