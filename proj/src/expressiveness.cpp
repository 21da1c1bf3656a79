#include "locph/expressiveness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "locph/filters.hpp"

namespace locph {

Graph rook_4x4() {
  std::vector<std::pair<Vertex, Vertex>> pairs;
  for (Vertex a = 0; a < 16; ++a) {
    for (Vertex b = a + 1; b < 16; ++b) {
      if (a / 4 == b / 4 || a % 4 == b % 4) pairs.emplace_back(a, b);
    }
  }
  return Graph::from_edge_list(pairs, 16);
}

Graph shrikhande() {
  const int steps[6][2] = {{1, 0}, {3, 0}, {0, 1}, {0, 3}, {1, 1}, {3, 3}};
  std::vector<std::pair<Vertex, Vertex>> pairs;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      for (const auto& s : steps) {
        pairs.emplace_back(static_cast<Vertex>(4 * i + j),
                           static_cast<Vertex>(4 * ((i + s[0]) % 4) + (j + s[1]) % 4));
      }
    }
  }
  return Graph::from_edge_list(pairs, 16);
}

namespace {

int parity(const std::array<std::uint8_t, 4>& bits) {
  return (bits[0] + bits[1] + bits[2] + bits[3]) % 2;
}

// The eight vectors of the given parity in lexicographic order of (v1, v2, v3, v4).
std::vector<std::array<std::uint8_t, 4>> vectors_with_parity(int want) {
  std::vector<std::array<std::uint8_t, 4>> out;
  for (int code = 0; code < 16; ++code) {
    std::array<std::uint8_t, 4> bits{};
    for (int m = 0; m < 4; ++m) bits[m] = static_cast<std::uint8_t>((code >> (3 - m)) & 1);
    if (parity(bits) == want) out.push_back(bits);
  }
  return out;
}

int group_parity(int ell, int group) { return group <= 5 - ell ? 0 : 1; }

}  // namespace

Vertex CfiGraph::vertex(int group, std::array<std::uint8_t, 4> bits) const {
  if (group < 1 || group > 5) throw InputError("CFI group must be in 1..5");
  if (parity(bits) != group_parity(ell, group)) {
    throw InputError("CFI vector has the wrong parity for its group");
  }
  const auto list = vectors_with_parity(group_parity(ell, group));
  const auto it = std::find(list.begin(), list.end(), bits);
  return static_cast<Vertex>((group - 1) * 8 + (it - list.begin()));
}

std::pair<Vertex, Vertex> CfiGraph::designated_roots() const {
  return {vertex(1, {0, 0, 0, 0}), vertex(2, {0, 0, 0, 0})};
}

CfiGraph cfi_graph(int ell) {
  if (ell < 0 || ell > 5) throw InputError("CFI index must be in 0..5");
  CfiGraph out;
  out.ell = ell;
  for (int a = 1; a <= 5; ++a) {
    for (const auto& bits : vectors_with_parity(group_parity(ell, a))) {
      out.labels.push_back({a, bits});
    }
  }
  std::vector<std::pair<Vertex, Vertex>> pairs;
  const auto n = static_cast<Vertex>(out.labels.size());
  for (Vertex x = 0; x < n; ++x) {
    for (Vertex y = x + 1; y < n; ++y) {
      const auto& p = out.labels[x];
      const auto& q = out.labels[y];
      for (int m = 1; m <= 4; ++m) {
        if (q.group % 5 == (p.group + m) % 5 && p.bits[m - 1] == q.bits[4 - m]) {
          pairs.emplace_back(x, y);
          break;
        }
      }
    }
  }
  out.graph = Graph::from_edge_list(pairs, n);
  return out;
}

Graph random_regular(std::size_t n, std::size_t r, std::uint64_t seed,
                     std::size_t max_attempts) {
  if ((n * r) % 2 != 0) throw InputError("n * r must be even for an r-regular graph");
  if (r >= n && n > 0) throw InputError("degree must be below the vertex count");
  std::mt19937_64 rng(seed);
  std::vector<Vertex> stubs;
  for (Vertex v = 0; v < n; ++v) stubs.insert(stubs.end(), r, v);
  std::set<std::pair<Vertex, Vertex>> seen;
  for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
    std::shuffle(stubs.begin(), stubs.end(), rng);
    seen.clear();
    bool simple = true;
    for (std::size_t i = 0; i < stubs.size() && simple; i += 2) {
      auto a = stubs[i];
      auto b = stubs[i + 1];
      if (a == b) simple = false;
      if (a > b) std::swap(a, b);
      if (!seen.emplace(a, b).second) simple = false;
    }
    if (simple) {
      std::vector<std::pair<Vertex, Vertex>> pairs(seen.begin(), seen.end());
      return Graph::from_edge_list(pairs, n);
    }
  }
  throw InputError("configuration model found no simple graph in " +
                   std::to_string(max_attempts) + " attempts");
}

std::uint32_t theorem4_K(std::size_t n, std::size_t r, double eps) {
  if (r < 3) throw InputError("theorem4_K needs r >= 3");
  if (n == 0) throw InputError("theorem4_K needs n >= 1");
  const double k = (0.5 + eps) * std::log(2.0 * static_cast<double>(n)) /
                   std::log(static_cast<double>(r) - 1.0);
  return static_cast<std::uint32_t>(std::floor(k));
}

std::uint32_t ColorDictionary::intern(const std::vector<std::uint32_t>& key) {
  auto [it, inserted] = ids_.try_emplace(key, static_cast<std::uint32_t>(ids_.size()));
  return it->second;
}

namespace {

constexpr std::uint32_t kTagVertex = 0;
constexpr std::uint32_t kTagTuple = 1;
constexpr std::uint32_t kTagRefine = 2;

std::size_t distinct(const std::vector<std::uint32_t>& colors) {
  std::vector<std::uint32_t> c = colors;
  std::sort(c.begin(), c.end());
  return static_cast<std::size_t>(std::unique(c.begin(), c.end()) - c.begin());
}

std::vector<std::uint32_t> refine_vertices(const Graph& g, ColorDictionary& dict,
                                           const std::vector<std::uint32_t>& colors) {
  std::vector<std::uint32_t> next(colors.size());
  std::vector<std::uint32_t> key;
  for (Vertex v = 0; v < g.num_vertices(); ++v) {
    key.assign({kTagRefine, colors[v]});
    const std::size_t head = key.size();
    for (const auto& nb : g.neighbors(v)) key.push_back(colors[nb.vertex]);
    std::sort(key.begin() + static_cast<std::ptrdiff_t>(head), key.end());
    next[v] = dict.intern(key);
  }
  return next;
}

std::vector<std::uint32_t> refine_tuples(std::size_t n, std::uint32_t k, ColorDictionary& dict,
                                         const std::vector<std::uint32_t>& colors) {
  std::vector<std::size_t> stride(k, 1);
  for (std::uint32_t i = 1; i < k; ++i) stride[i] = stride[i - 1] * n;
  std::vector<std::uint32_t> next(colors.size());
  std::vector<std::uint32_t> key;
  std::vector<std::uint32_t> bag;
  for (std::size_t t = 0; t < colors.size(); ++t) {
    key.assign({kTagRefine, colors[t]});
    for (std::uint32_t i = 0; i < k; ++i) {
      const std::size_t at = (t / stride[i]) % n;
      const std::size_t base = t - at * stride[i];
      bag.clear();
      for (std::size_t w = 0; w < n; ++w) bag.push_back(colors[base + w * stride[i]]);
      std::sort(bag.begin(), bag.end());
      key.insert(key.end(), bag.begin(), bag.end());
    }
    next[t] = dict.intern(key);
  }
  return next;
}

}  // namespace

WlColoring wl_refine(const Graph& g, std::uint32_t k, ColorDictionary& dict,
                     const WlOptions& opts) {
  if (k < 1 || k > 3) throw InputError("WL order must be 1, 2 or 3");
  const std::size_t n = g.num_vertices();
  if (!opts.labels.empty() && opts.labels.size() != n) {
    throw InputError("WL labels do not match the vertex count");
  }
  auto label = [&](std::size_t v) { return opts.labels.empty() ? 0u : opts.labels[v]; };

  double tuples = 1.0;
  for (std::uint32_t i = 0; i < k; ++i) tuples *= static_cast<double>(n);
  if (tuples > static_cast<double>(opts.max_tuples)) {
    throw InputError(std::to_string(k) + "-WL on " + std::to_string(n) + " vertices needs " +
                     std::to_string(static_cast<std::uint64_t>(tuples)) +
                     " tuples, budget is " + std::to_string(opts.max_tuples));
  }

  WlColoring out;
  out.k = k;
  const auto count = static_cast<std::size_t>(tuples);
  out.colors.resize(count);
  std::vector<std::uint32_t> key;
  std::vector<Vertex> tuple(k);
  for (std::size_t t = 0; t < count; ++t) {
    std::size_t rest = t;
    for (std::uint32_t i = 0; i < k; ++i) tuple[i] = static_cast<Vertex>(rest % n), rest /= n;
    if (k == 1) {
      out.colors[t] = dict.intern({kTagVertex, label(tuple[0])});
      continue;
    }
    key.assign({kTagTuple, k});
    for (std::uint32_t i = 0; i < k; ++i) key.push_back(label(tuple[i]));
    for (std::uint32_t i = 0; i < k; ++i) {
      for (std::uint32_t j = i + 1; j < k; ++j) {
        const bool same = tuple[i] == tuple[j];
        const bool adjacent = !same && g.find_edge(tuple[i], tuple[j]).has_value();
        key.push_back(same ? 2u : adjacent ? 1u : 0u);
      }
    }
    out.colors[t] = dict.intern(key);
  }

  std::size_t classes = distinct(out.colors);
  for (;;) {
    auto next = k == 1 ? refine_vertices(g, dict, out.colors)
                       : refine_tuples(n, k, dict, out.colors);
    const std::size_t next_classes = distinct(next);
    out.colors = std::move(next);
    ++out.iterations;
    if (next_classes <= classes) break;
    classes = next_classes;
  }
  for (auto c : out.colors) ++out.histogram[c];
  return out;
}

bool same_histogram(const WlColoring& a, const WlColoring& b) {
  return a.k == b.k && a.histogram == b.histogram;
}

std::vector<std::size_t> EpdSignature::count_at(std::uint8_t dimension, PointKind kind,
                                                double birth, double death) const {
  std::vector<std::size_t> out;
  for (const auto& d : per_root) out.push_back(d.count_at(dimension, kind, birth, death));
  return out;
}

namespace {

bool diagram_less(const PersistenceDiagram& a, const PersistenceDiagram& b) {
  return a.points < b.points;
}

}  // namespace

EpdSignature epd_signature(const Graph& g, const SignatureOptions& opts) {
  EpdSignature sig;
  ExtendedPersistence engine;
  if (opts.filter == SignatureFilter::kSpd) {
    for (Vertex v = 0; v < g.num_vertices(); ++v) {
      const auto vg = k_hop_vicinity(g, v, opts.k_hops);
      sig.per_root.push_back(engine.compute(extend_to_edges(vg.local, spd_filter(vg), opts.mode)));
    }
  } else {
    std::vector<std::pair<Vertex, Vertex>> roots = opts.root_pairs;
    if (roots.empty()) {
      for (const auto& e : g.edges()) roots.emplace_back(e.u, e.v);
    }
    for (const auto& [u, v] : roots) {
      const auto vg = pair_vicinity(g, u, v, opts.k_hops);
      sig.per_root.push_back(
          engine.compute(extend_to_edges(vg.local, tuple_distance_filter(vg), opts.mode)));
    }
  }
  sig.multiset = sig.per_root;
  std::sort(sig.multiset.begin(), sig.multiset.end(), diagram_less);
  return sig;
}

DistinguishMethod parse_distinguish_method(std::string_view name) {
  if (name == "wl1") return DistinguishMethod::kWl1;
  if (name == "wl2") return DistinguishMethod::kWl2;
  if (name == "wl3") return DistinguishMethod::kWl3;
  if (name == "epd-spd") return DistinguishMethod::kEpdSpd;
  if (name == "epd-tuple") return DistinguishMethod::kEpdTuple;
  throw InputError("unknown method '" + std::string(name) +
                   "' (expected wl1|wl2|wl3|epd-spd|epd-tuple)");
}

namespace {

std::string describe(const PersistenceDiagram& d) {
  std::ostringstream out;
  out << '{';
  for (std::size_t i = 0; i < d.points.size(); ++i) {
    const auto& p = d.points[i];
    out << (i ? ", " : "") << '(' << p.birth << ", " << p.death << ")@" << int(p.dimension)
        << to_string(p.kind).substr(0, 3);
  }
  out << '}';
  return out.str();
}

std::size_t occurrences(const std::vector<PersistenceDiagram>& all, const PersistenceDiagram& d) {
  return static_cast<std::size_t>(std::count(all.begin(), all.end(), d));
}

}  // namespace

DistinguishResult distinguish(const Graph& a, const Graph& b, DistinguishMethod method,
                              const SignatureOptions& signature,
                              const std::vector<std::pair<Vertex, Vertex>>& roots_b) {
  DistinguishResult res;
  if (method == DistinguishMethod::kWl1 || method == DistinguishMethod::kWl2 ||
      method == DistinguishMethod::kWl3) {
    const std::uint32_t k = method == DistinguishMethod::kWl1   ? 1
                            : method == DistinguishMethod::kWl2 ? 2
                                                                : 3;
    ColorDictionary dict;
    const auto ca = wl_refine(a, k, dict);
    const auto cb = wl_refine(b, k, dict);
    res.distinguished = !same_histogram(ca, cb);
    std::ostringstream w;
    w << k << "-WL: " << ca.histogram.size() << " vs " << cb.histogram.size()
      << " stable colors after " << ca.iterations << "/" << cb.iterations << " rounds";
    if (res.distinguished) {
      for (const auto& [color, n] : ca.histogram) {
        auto it = cb.histogram.find(color);
        const std::uint64_t m = it == cb.histogram.end() ? 0 : it->second;
        if (m != n) {
          w << "; color " << color << " occurs " << n << " vs " << m << " times";
          break;
        }
      }
    }
    res.witness = w.str();
    return res;
  }

  SignatureOptions opts = signature;
  opts.filter = method == DistinguishMethod::kEpdSpd ? SignatureFilter::kSpd
                                                     : SignatureFilter::kTupleDistance;
  const auto sa = epd_signature(a, opts);
  if (!roots_b.empty()) opts.root_pairs = roots_b;
  const auto sb = epd_signature(b, opts);
  res.distinguished = !(sa == sb);
  std::ostringstream w;
  w << sa.multiset.size() << " vs " << sb.multiset.size() << " root diagrams";
  if (res.distinguished) {
    for (const auto* side : {&sa.multiset, &sb.multiset}) {
      for (const auto& d : *side) {
        const auto na = occurrences(sa.multiset, d);
        const auto nb = occurrences(sb.multiset, d);
        if (na != nb) {
          w << "; diagram " << describe(d) << " occurs " << na << " vs " << nb << " times";
          res.witness = w.str();
          return res;
        }
      }
    }
  }
  res.witness = w.str();
  return res;
}

}  // namespace locph
