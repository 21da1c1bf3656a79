#include "locph/vectorize.hpp"

#include <cmath>

namespace locph {

double weight_alpha(double y) {
  if (y <= 0.0) return 0.0;
  if (y <= 1.0) return y;
  return 1.0;
}

void PersistenceImageConfig::validate() const {
  if (rows == 0 || cols == 0) throw InputError("persistence image needs at least 1x1 pixels");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InputError("sigma must be positive");
  if (!(birth_max > birth_min) || !(persistence_max > persistence_min)) {
    throw InputError("persistence image bounds are degenerate");
  }
}

namespace {

// Mass of N(mean, sigma^2) on each of `count` equal bins of [lo, hi].
void bin_masses(double mean, double sigma, double lo, double hi, std::size_t count,
                std::vector<double>& out) {
  out.resize(count);
  const double step = (hi - lo) / static_cast<double>(count);
  const double scale = 1.0 / (sigma * std::sqrt(2.0));
  double left = 0.5 * std::erfc(-(lo - mean) * scale);
  for (std::size_t i = 0; i < count; ++i) {
    const double edge = i + 1 == count ? hi : lo + step * static_cast<double>(i + 1);
    const double right = 0.5 * std::erfc(-(edge - mean) * scale);
    out[i] = right - left;
    left = right;
  }
}

}  // namespace

std::vector<double> persistence_image(const PersistenceDiagram& d,
                                      const PersistenceImageConfig& cfg) {
  cfg.validate();
  std::vector<double> image(cfg.size(), 0.0);
  std::vector<double> along_birth;
  std::vector<double> along_persistence;
  for (const auto& p : d.points) {
    if (!(p.birth >= 0.0 && p.birth <= 1.0 && p.death >= 0.0 && p.death <= 1.0)) {
      throw InputError("persistence image expects diagram values normalized to [0, 1]");
    }
    const double x = std::min(p.birth, p.death);
    const double y = std::max(p.birth, p.death) - x;
    const double w = weight_alpha(y);
    if (w == 0.0) continue;
    bin_masses(x, cfg.sigma, cfg.birth_min, cfg.birth_max, cfg.cols, along_birth);
    bin_masses(y, cfg.sigma, cfg.persistence_min, cfg.persistence_max, cfg.rows,
               along_persistence);
    for (std::size_t r = 0; r < cfg.rows; ++r) {
      for (std::size_t c = 0; c < cfg.cols; ++c) {
        image[r * cfg.cols + c] += w * along_persistence[r] * along_birth[c];
      }
    }
  }
  return image;
}

StructuralCounts structural_counts(const VicinityGraph& vg, std::uint32_t k) {
  if (vg.local_roots.size() != 1) throw InputError("structural counts need a one-root vicinity");
  StructuralCounts c;
  c.k = k;
  c.n_level.assign(k + 1, 0);
  c.n_intra.assign(k + 1, 0);
  c.n_cross.assign(k, 0);
  const auto level = bounded_hop_distances(vg.local, vg.local_roots[0], k);
  for (const auto& l : level) {
    if (!l) throw InputError("vicinity holds vertices beyond " + std::to_string(k) + " hops");
    ++c.n_level[*l];
  }
  for (const auto& e : vg.local.edges()) {
    const auto a = *level[e.u];
    const auto b = *level[e.v];
    if (a == b) {
      ++c.n_intra[a];
    } else {
      ++c.n_cross[std::min(a, b)];  // BFS layers never differ by more than one
    }
  }
  return c;
}

std::size_t FeatureLayout::width() const {
  return segments.empty() ? 0 : segments.back().offset + segments.back().length;
}

void FeatureLayout::append(std::string name, std::size_t length) {
  segments.push_back({std::move(name), width(), length});
}

const FeatureSegment& FeatureLayout::find(const std::string& name) const {
  for (const auto& s : segments) {
    if (s.name == name) return s;
  }
  throw InputError("feature layout has no segment '" + name + "'");
}

FeatureVector pi_plus(const PersistenceDiagram& d, const StructuralCounts& counts,
                      const PersistenceImageConfig& cfg) {
  if (counts.n_level.size() != counts.k + 1 || counts.n_intra.size() != counts.k + 1 ||
      counts.n_cross.size() != counts.k) {
    throw InputError("structural counts are inconsistent with their hop radius");
  }
  FeatureVector v;
  v.values = persistence_image(d, cfg);
  v.layout.append("pi", cfg.size());
  v.layout.append("n_level", counts.n_level.size());
  v.layout.append("n_intra", counts.n_intra.size());
  v.layout.append("n_cross", counts.n_cross.size());
  for (const auto* seg : {&counts.n_level, &counts.n_intra, &counts.n_cross}) {
    for (auto x : *seg) v.values.push_back(static_cast<double>(x));
  }
  return v;
}

StructuralCounts decode_counts(const FeatureVector& v) {
  const auto& level = v.layout.find("n_level");
  const auto& intra = v.layout.find("n_intra");
  const auto& cross = v.layout.find("n_cross");
  if (level.length == 0 || intra.length != level.length || cross.length + 1 != level.length) {
    throw InputError("feature layout does not describe PI+ counts");
  }
  auto read = [&](const FeatureSegment& s) {
    std::vector<std::uint64_t> out;
    for (std::size_t i = 0; i < s.length; ++i) {
      out.push_back(static_cast<std::uint64_t>(v.values.at(s.offset + i)));
    }
    return out;
  };
  StructuralCounts c;
  c.k = static_cast<std::uint32_t>(cross.length);
  c.n_level = read(level);
  c.n_intra = read(intra);
  c.n_cross = read(cross);
  return c;
}

}  // namespace locph
