#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "locph/filtration.hpp"
#include "locph/graph.hpp"
#include "locph/persistence.hpp"

namespace locph {

/// 4x4 rook's graph; cell (i, j) is vertex 4i + j.
Graph rook_4x4();

/// Cayley graph on Z4 x Z4 with connection set {±(1,0), ±(0,1), ±(1,1)}; (i, j) is 4i + j.
Graph shrikhande();

/// One member of the five-group CFI family. Group a in 1..5 holds the eight
/// 4-bit vectors of even parity (a <= 5 - ell) or odd parity (otherwise).
struct CfiGraph {
  Graph graph;
  int ell = 0;
  /// bits[m - 1] is the m-th coordinate of the vector.
  struct Label {
    int group;
    std::array<std::uint8_t, 4> bits;
  };
  std::vector<Label> labels;

  /// Vertex u_{a, bits}; throws InputError if the vector has the wrong parity.
  Vertex vertex(int group, std::array<std::uint8_t, 4> bits) const;
  /// The pair u_{1,0000}, u_{2,0000}.
  std::pair<Vertex, Vertex> designated_roots() const;
};

CfiGraph cfi_graph(int ell);

/// Configuration model: shuffle n*r stubs, pair them up, resample until simple.
Graph random_regular(std::size_t n, std::size_t r, std::uint64_t seed,
                     std::size_t max_attempts = 10000);

/// floor((1/2 + eps) ln(2n) / ln(r - 1)).
std::uint32_t theorem4_K(std::size_t n, std::size_t r, double eps);

/// Exact interning of color keys; shared by every graph that is to be compared.
class ColorDictionary {
 public:
  std::uint32_t intern(const std::vector<std::uint32_t>& key);
  std::size_t size() const { return ids_.size(); }

 private:
  std::map<std::vector<std::uint32_t>, std::uint32_t> ids_;
};

struct WlOptions {
  std::size_t max_tuples = std::size_t{1} << 22;
  std::vector<std::uint32_t> labels;  // optional initial vertex labels
};

struct WlColoring {
  std::uint32_t k = 1;
  std::vector<std::uint32_t> colors;               // per vertex (k = 1) or per tuple
  std::map<std::uint32_t, std::uint64_t> histogram;
  std::size_t iterations = 0;
};

/// Refinement until the number of distinct colors stops growing. For k >= 2
/// the tuple (v_1..v_k) is index sum v_i n^(i-1), initial colors encode labels,
/// the equality pattern and the induced adjacency, and each round hashes the
/// old color with the k multisets obtained by replacing one position.
WlColoring wl_refine(const Graph& g, std::uint32_t k, ColorDictionary& dict,
                     const WlOptions& opts = {});

bool same_histogram(const WlColoring& a, const WlColoring& b);

enum class SignatureFilter : std::uint8_t { kSpd, kTupleDistance };

struct SignatureOptions {
  SignatureFilter filter = SignatureFilter::kSpd;
  std::uint32_t k_hops = 1;
  EdgeMode mode = EdgeMode::relaxed();
  /// Pair roots for the tuple filter; empty means every edge.
  std::vector<std::pair<Vertex, Vertex>> root_pairs;
};

/// Per-root diagrams (in root order) plus their sorted multiset.
struct EpdSignature {
  std::vector<PersistenceDiagram> per_root;
  std::vector<PersistenceDiagram> multiset;

  std::vector<std::size_t> count_at(std::uint8_t dimension, PointKind kind, double birth,
                                    double death) const;
  friend bool operator==(const EpdSignature& a, const EpdSignature& b) {
    return a.multiset == b.multiset;
  }
};

EpdSignature epd_signature(const Graph& g, const SignatureOptions& opts);

enum class DistinguishMethod : std::uint8_t { kWl1, kWl2, kWl3, kEpdSpd, kEpdTuple };
DistinguishMethod parse_distinguish_method(std::string_view name);

struct DistinguishResult {
  bool distinguished = false;
  std::string witness;
};

/// `signature` supplies hop radius, edge mode and root pairs for the EPD methods;
/// `roots_b` overrides the root pairs used on graph b when non-empty.
DistinguishResult distinguish(const Graph& a, const Graph& b, DistinguishMethod method,
                              const SignatureOptions& signature,
                              const std::vector<std::pair<Vertex, Vertex>>& roots_b = {});

}  // namespace locph
