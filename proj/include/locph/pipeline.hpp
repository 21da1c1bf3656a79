#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "locph/curvature.hpp"
#include "locph/filtration.hpp"
#include "locph/graph.hpp"
#include "locph/persistence.hpp"
#include "locph/vectorize.hpp"

namespace locph {

enum class Task : std::uint8_t { kNodeFeatures, kPairFeatures };

enum class FilterKind : std::uint8_t {
  kSpd,
  kCurvatureDistance,
  kPairwiseSum,
  kTupleDistance,
  kHks,
  kMulti,  // hks 0.1, hks 10, curvature
};

struct FilterSpec {
  FilterKind kind = FilterKind::kCurvatureDistance;
  double hks_time = 0.0;  // only for kHks
  friend bool operator==(const FilterSpec&, const FilterSpec&) = default;
};

/// spd | curvature-distance | pairwise-sum | tuple-distance | hks:T | multi
FilterSpec parse_filter(const std::string& name);
std::string to_string(const FilterSpec& f);

struct PipelineConfig {
  std::optional<std::uint32_t> hop_radius;  // default_hop_radius() when unset
  std::optional<FilterSpec> filter;         // task default when unset
  EdgeMode edge_mode = EdgeMode::classic();
  PersistenceImageConfig image;
  bool piplus = false;
  std::size_t workers = 1;
  std::string cache_dir;  // empty: no cache
  std::uint64_t seed = 0;
  double curvature_alpha = 0.5;
  TransportMethod curvature_method = TransportMethod::kExactLp;

  /// Throws InputError on any rule violation for the given task.
  void validate(Task task) const;
  FilterSpec resolved_filter(Task task) const;

  /// Keys: k, filter, edge_mode, pi_rows, pi_cols, sigma, piplus, workers,
  /// cache, seed, curvature_alpha, curvature_method. Unknown keys are rejected.
  static PipelineConfig from_json(const nlohmann::json& doc, Task task);
};

/// 2 when the average degree is below 10, else 1.
std::uint32_t default_hop_radius(const Graph& g);

struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;  // row-major
  FeatureLayout layout;

  std::span<const double> row(std::size_t r) const {
    return {values.data() + r * cols, cols};
  }
};

struct PipelineStats {
  std::atomic<std::uint64_t> diagrams_computed{0};
  std::atomic<std::uint64_t> cache_hits{0};
  std::atomic<std::uint64_t> cache_writes{0};
  std::atomic<std::uint64_t> cache_corrupt{0};
  std::atomic<std::uint64_t> failed_rows{0};
};

FeatureMatrix node_features(const Graph& g, const PipelineConfig& cfg,
                            PipelineStats* stats = nullptr);

FeatureMatrix pair_features(const Graph& g, std::span<const std::pair<Vertex, Vertex>> pairs,
                            const PipelineConfig& cfg, PipelineStats* stats = nullptr);

/// The normalized diagrams behind one row, one per filter component.
std::vector<PersistenceDiagram> row_diagrams(const Graph& g, Vertex u, std::optional<Vertex> v,
                                             const PipelineConfig& cfg);

/// Order-independent content hash of the canonical edge list and weights.
std::uint64_t graph_hash(const Graph& g);
/// Hash of every setting that affects diagrams (not the image raster).
std::uint64_t config_hash(const PipelineConfig& cfg, Task task, std::uint32_t k);

/// One file per row: magic "EPDC", u32 version, u32 component count, per
/// component u64 point count and (f64 birth, f64 death, u8 dim, u8 kind)
/// records, then an FNV-1a 64 checksum of everything before it.
std::string encode_diagrams(const std::vector<PersistenceDiagram>& ds);
/// nullopt on any format or checksum mismatch.
std::optional<std::vector<PersistenceDiagram>> decode_diagrams(const std::string& bytes);

}  // namespace locph
