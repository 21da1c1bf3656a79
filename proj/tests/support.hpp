#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

#include "locph/graph.hpp"

namespace testsupport {

using locph::Graph;
using locph::Vertex;

/// G(n, p) with a fixed seed.
inline Graph erdos_renyi(std::size_t n, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(p);
  std::vector<std::pair<Vertex, Vertex>> pairs;
  for (Vertex a = 0; a < n; ++a) {
    for (Vertex b = a + 1; b < n; ++b) {
      if (coin(rng)) pairs.emplace_back(a, b);
    }
  }
  return Graph::from_edge_list(pairs, n);
}

inline Graph from_pairs(std::size_t n, std::vector<std::pair<Vertex, Vertex>> pairs) {
  return Graph::from_edge_list(pairs, n);
}

inline Graph cycle(std::size_t n) {
  std::vector<std::pair<Vertex, Vertex>> pairs;
  for (Vertex i = 0; i < n; ++i) pairs.emplace_back(i, static_cast<Vertex>((i + 1) % n));
  return Graph::from_edge_list(pairs, n);
}

inline Graph path(std::size_t n) {
  std::vector<std::pair<Vertex, Vertex>> pairs;
  for (Vertex i = 0; i + 1 < n; ++i) pairs.emplace_back(i, i + 1);
  return Graph::from_edge_list(pairs, n);
}

inline Graph complete(std::size_t n) {
  std::vector<std::pair<Vertex, Vertex>> pairs;
  for (Vertex a = 0; a < n; ++a) {
    for (Vertex b = a + 1; b < n; ++b) pairs.emplace_back(a, b);
  }
  return Graph::from_edge_list(pairs, n);
}

inline std::vector<Vertex> random_permutation(std::size_t n, std::mt19937_64& rng) {
  std::vector<Vertex> perm(n);
  std::iota(perm.begin(), perm.end(), Vertex{0});
  std::shuffle(perm.begin(), perm.end(), rng);
  return perm;
}

/// Plain union-find, kept separate from library code on purpose.
struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a), b = find(b);
    if (a == b) return false;
    parent[std::max(a, b)] = std::min(a, b);
    return true;
  }
};

}  // namespace testsupport
