#pragma once

#include <atomic>
#include <cstdint>
#include <string_view>
#include <vector>

#include "locph/filtration.hpp"
#include "locph/graph.hpp"

namespace locph {

/// ordinary: both ends in the ascending phase (component merges).
/// relative: both ends in the descending phase (branches meeting on the way down).
/// extended: born ascending, dies descending (whole components and loops).
enum class PointKind : std::uint8_t { kOrdinary, kRelative, kExtended };

std::string_view to_string(PointKind kind);

struct PersistencePoint {
  double birth;
  double death;
  std::uint8_t dimension;
  PointKind kind;

  friend bool operator==(const PersistencePoint&, const PersistencePoint&) = default;
  friend auto operator<=>(const PersistencePoint&, const PersistencePoint&) = default;
};

struct PersistenceDiagram {
  std::vector<PersistencePoint> points;

  /// Sorts into (dimension, kind, birth, death) order; equal multisets compare equal.
  void canonicalize();
  std::size_t count(std::uint8_t dimension, PointKind kind) const;
  std::size_t count_at(std::uint8_t dimension, PointKind kind, double birth, double death) const;
  bool empty() const { return points.empty(); }

  friend bool operator==(const PersistenceDiagram&, const PersistenceDiagram&) = default;
};

struct BettiNumbers {
  std::size_t b0 = 0;
  std::size_t b1 = 0;
  friend bool operator==(const BettiNumbers&, const BettiNumbers&) = default;
};

BettiNumbers betti_numbers(const Graph& g);

/// Throws InternalError unless #extended 1D points == b1 and #extended 0D == b0.
/// Every call is tallied in persistence_counters().
void check_betti(const PersistenceDiagram& d, const Graph& complex);

struct PersistenceCounters {
  std::atomic<std::uint64_t> diagrams{0};        // extended_pd evaluations
  std::atomic<std::uint64_t> betti_checks{0};
  std::atomic<std::uint64_t> betti_violations{0};
};
PersistenceCounters& persistence_counters();

/// Ascending union-find: finite 0D merges (elder rule) plus one extended 0D
/// point (component min, component max) per component.
PersistenceDiagram ordinary_pd0(const Filtration& filt);

/// Full extended persistence diagram.
///
/// 0D ordinary and extended points come from an ascending union-find, relative
/// points from a descending one. 1D extended points use the per-vertex split:
/// walking the descending order, each event i (a vertex together with the edges
/// that enter with it, or an edge entering after both endpoints) splits its
/// incident edges into copies C_i, and a union-find over the already-entered
/// part in ascending edge order reports a point (merge value, value of i) every
/// time two copy-bearing components meet.
///
/// Zero-length ordinary and relative points are not reported.
class ExtendedPersistence {
 public:
  PersistenceDiagram compute(const Filtration& filt);

 private:
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint8_t> flagged_;
  std::vector<std::uint32_t> event_of_vertex_;
  std::vector<std::uint32_t> event_of_edge_;
  std::vector<EdgeId> ascending_edges_;
};

PersistenceDiagram extended_pd(const Filtration& filt);

/// Reference EPD by GF(2) column reduction of the coned boundary matrix.
/// Refuses complexes with more than `max_simplices` simplices.
PersistenceDiagram matrix_reduction_epd(const Filtration& filt,
                                        std::size_t max_simplices = 500);

}  // namespace locph
