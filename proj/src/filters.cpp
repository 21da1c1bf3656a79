#include "locph/filters.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Dense>

namespace locph {

namespace {

void require_roots(const VicinityGraph& vg, std::size_t count, const char* who) {
  if (vg.local_roots.size() != count) {
    throw InputError(std::string(who) + " needs a vicinity with " + std::to_string(count) +
                     " root(s)");
  }
}

VertexFilter from_distances(const std::vector<double>& d, const char* who) {
  VertexFilter f = VertexFilter::from_values(d);
  for (double x : d) {
    if (!is_reachable(x)) {
      throw InternalError(std::string(who) + ": vertex unreachable inside a one-root vicinity");
    }
  }
  return f;
}

std::vector<double> hop_as_real(const Graph& g, Vertex root) {
  const auto hop = hop_distances(g, root);
  std::vector<double> out(hop.size(), kUnreachable);
  for (std::size_t v = 0; v < hop.size(); ++v) {
    if (hop[v]) out[v] = *hop[v];
  }
  return out;
}

}  // namespace

VertexFilter spd_filter(const VicinityGraph& vg) {
  require_roots(vg, 1, "spd filter");
  return from_distances(hop_as_real(vg.local, vg.local_roots[0]), "spd filter");
}

std::vector<double> local_edge_lengths(const Graph& parent, const VicinityGraph& vg,
                                       std::span<const double> parent_lengths) {
  if (parent_lengths.size() != parent.num_edges()) {
    throw InputError("edge weights do not match the parent graph");
  }
  std::vector<double> out(vg.local.num_edges());
  for (EdgeId e = 0; e < vg.local.num_edges(); ++e) {
    const auto [a, b] = vg.local.edge(e);
    const auto pe = parent.find_edge(vg.to_parent[a], vg.to_parent[b]);
    if (!pe) throw InternalError("vicinity edge missing from its parent graph");
    out[e] = parent_lengths[*pe];
  }
  return out;
}

VertexFilter curvature_distance_filter(const VicinityGraph& vg,
                                       std::span<const double> local_lengths) {
  require_roots(vg, 1, "curvature distance filter");
  return from_distances(weighted_distances(vg.local, vg.local_roots[0], local_lengths),
                        "curvature distance filter");
}

VertexFilter pairwise_sum_filter(const VicinityGraph& vg, std::span<const double> local_lengths) {
  require_roots(vg, 2, "pairwise sum filter");
  auto dist = [&](Vertex r) {
    return local_lengths.empty() ? hop_as_real(vg.local, r)
                                 : weighted_distances(vg.local, r, local_lengths);
  };
  const auto du = dist(vg.local_roots[0]);
  const auto dv = dist(vg.local_roots[1]);
  VertexFilter f;
  f.values.assign(vg.size(), 0.0);
  f.in_domain.assign(vg.size(), 0);
  for (std::size_t i = 0; i < vg.size(); ++i) {
    if (is_reachable(du[i]) && is_reachable(dv[i])) {
      f.values[i] = du[i] + dv[i];
      f.in_domain[i] = 1;
    }
  }
  return f;
}

double tuple_distance_value(std::uint32_t d1, std::uint32_t d2) {
  const std::int64_t d = static_cast<std::int64_t>(d1) + d2;
  const std::int64_t q = d / 2;
  const std::int64_t r = d % 2;
  return static_cast<double>(1 + std::min(d1, d2) + q * (q + r - 1));
}

VertexFilter tuple_distance_filter(const VicinityGraph& vg) {
  require_roots(vg, 2, "tuple distance filter");
  const auto h1 = hop_distances(vg.local, vg.local_roots[0]);
  const auto h2 = hop_distances(vg.local, vg.local_roots[1]);
  VertexFilter f;
  f.values.assign(vg.size(), 0.0);
  f.in_domain.assign(vg.size(), 0);
  for (std::size_t i = 0; i < vg.size(); ++i) {
    if (h1[i] && h2[i]) {
      f.values[i] = tuple_distance_value(*h1[i], *h2[i]);
      f.in_domain[i] = 1;
    }
  }
  return f;
}

HeatKernelSignature::HeatKernelSignature(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.num_vertices());
  if (n == 0) return;
  Eigen::VectorXd inv_sqrt(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto deg = static_cast<double>(g.degree(static_cast<Vertex>(i)));
    inv_sqrt(i) = deg > 0 ? 1.0 / std::sqrt(deg) : 0.0;
  }
  Eigen::MatrixXd lap = Eigen::MatrixXd::Identity(n, n);
  for (const auto& e : g.edges()) {
    const double w = inv_sqrt(e.u) * inv_sqrt(e.v);
    lap(e.u, e.v) -= w;
    lap(e.v, e.u) -= w;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lap);
  if (solver.info() != Eigen::Success) {
    throw InternalError("Laplacian eigensolver did not converge on a " + std::to_string(n) +
                        "-vertex graph");
  }
  const auto& vals = solver.eigenvalues();
  const auto& vecs = solver.eigenvectors();
  const double residual = (lap * vecs - vecs * vals.asDiagonal()).colwise().norm().maxCoeff();
  if (residual > 1e-10) {
    std::ostringstream msg;
    msg << "Laplacian eigenpair residual " << residual << " exceeds 1e-10 on a " << n
        << "-vertex graph";
    throw InternalError(msg.str());
  }
  eigenvalues_.assign(vals.data(), vals.data() + n);
  squared_.resize(static_cast<std::size_t>(n * n));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < n; ++k) {
      squared_[static_cast<std::size_t>(i * n + k)] = vecs(i, k) * vecs(i, k);
    }
  }
}

std::vector<double> HeatKernelSignature::at(double t) const {
  if (!(t >= 0.0) || !std::isfinite(t)) throw InputError("HKS time must be finite and >= 0");
  const std::size_t n = eigenvalues_.size();
  std::vector<double> decay(n);
  for (std::size_t k = 0; k < n; ++k) decay[k] = std::exp(-t * eigenvalues_[k]);
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) out[i] += decay[k] * squared_[i * n + k];
  }
  return out;
}

VertexFilter hks_filter(const Graph& g, double t) {
  return VertexFilter::from_values(HeatKernelSignature(g).at(t));
}

}  // namespace locph
