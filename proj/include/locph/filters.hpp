#pragma once

#include <span>
#include <vector>

#include "locph/curvature.hpp"
#include "locph/filtration.hpp"
#include "locph/graph.hpp"

namespace locph {

/// Hop distance to the single root of `vg`.
VertexFilter spd_filter(const VicinityGraph& vg);

/// Lengths of the vicinity's local edges looked up in per-parent-edge weights.
std::vector<double> local_edge_lengths(const Graph& parent, const VicinityGraph& vg,
                                       std::span<const double> parent_lengths);

/// Weighted distance to the single root under `local_lengths` (e.g. kappa + 1).
VertexFilter curvature_distance_filter(const VicinityGraph& vg,
                                       std::span<const double> local_lengths);

/// d(i, u) + d(i, v) for the two roots, inside the vicinity. Hop metric when
/// `local_lengths` is empty. Vertices unreachable from either root leave the domain.
VertexFilter pairwise_sum_filter(const VicinityGraph& vg,
                                 std::span<const double> local_lengths = {});

/// 1 + min(d1, d2) + q (q + r - 1) with d = d1 + d2, q = d / 2, r = d % 2.
double tuple_distance_value(std::uint32_t d1, std::uint32_t d2);

/// tuple_distance_value of the hop distances to the two roots.
VertexFilter tuple_distance_filter(const VicinityGraph& vg);

/// Spectrum of L = I - D^-1/2 A D^-1/2, with D^-1/2 = 0 at isolated vertices.
class HeatKernelSignature {
 public:
  /// Throws InternalError if the eigensolver fails or a residual exceeds 1e-10.
  explicit HeatKernelSignature(const Graph& g);

  /// hks_i(t) = sum_k exp(-t lambda_k) psi_k(i)^2.
  std::vector<double> at(double t) const;
  std::span<const double> eigenvalues() const { return eigenvalues_; }
  std::size_t size() const { return eigenvalues_.size(); }

 private:
  std::vector<double> eigenvalues_;
  std::vector<double> squared_;  // row-major: squared_[i * n + k] = psi_k(i)^2
};

VertexFilter hks_filter(const Graph& g, double t);

}  // namespace locph
