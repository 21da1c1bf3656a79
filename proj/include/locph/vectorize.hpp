#pragma once

#include <string>
#include <vector>

#include "locph/graph.hpp"
#include "locph/persistence.hpp"

namespace locph {

/// 0 for y <= 0, y on (0, 1], 1 above.
double weight_alpha(double y);

/// Raster over transformed (birth, persistence) space. Row r spans the r-th
/// persistence band, column c the c-th birth band; pixels are stored row-major.
struct PersistenceImageConfig {
  std::size_t rows = 5;
  std::size_t cols = 5;
  double sigma = 1.0;
  double birth_min = 0.0;
  double birth_max = 1.0;
  double persistence_min = 0.0;
  double persistence_max = 1.0;

  void validate() const;
  std::size_t size() const { return rows * cols; }
  friend bool operator==(const PersistenceImageConfig&, const PersistenceImageConfig&) = default;
};

/// Points are read as (min, max) of their two values, mapped by
/// T(x, y) = (x, y - x), weighted by weight_alpha(y - x) and integrated
/// exactly over each pixel. Every value must already lie in [0, 1].
std::vector<double> persistence_image(const PersistenceDiagram& d,
                                      const PersistenceImageConfig& cfg);

/// Per-layer node and edge counts of a one-root vicinity.
struct StructuralCounts {
  std::uint32_t k = 0;
  std::vector<std::uint64_t> n_level;  // k + 1 entries
  std::vector<std::uint64_t> n_intra;  // k + 1 entries
  std::vector<std::uint64_t> n_cross;  // k entries

  std::size_t size() const { return n_level.size() + n_intra.size() + n_cross.size(); }
  friend bool operator==(const StructuralCounts&, const StructuralCounts&) = default;
};

StructuralCounts structural_counts(const VicinityGraph& vg, std::uint32_t k);

struct FeatureSegment {
  std::string name;
  std::size_t offset = 0;
  std::size_t length = 0;
  friend bool operator==(const FeatureSegment&, const FeatureSegment&) = default;
};

struct FeatureLayout {
  std::vector<FeatureSegment> segments;

  std::size_t width() const;
  void append(std::string name, std::size_t length);
  const FeatureSegment& find(const std::string& name) const;
  friend bool operator==(const FeatureLayout&, const FeatureLayout&) = default;
};

struct FeatureVector {
  std::vector<double> values;
  FeatureLayout layout;
};

/// [PI; n_0..n_k; n_00..n_kk; n_01..n_(k-1)k].
FeatureVector pi_plus(const PersistenceDiagram& d, const StructuralCounts& counts,
                      const PersistenceImageConfig& cfg);

/// Reads the count segments back out of a PI+ vector.
StructuralCounts decode_counts(const FeatureVector& v);

}  // namespace locph
