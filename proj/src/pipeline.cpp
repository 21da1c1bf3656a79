#include "locph/pipeline.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <thread>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "locph/filters.hpp"

namespace locph {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kFnvOffset = 14695981039346656037ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

struct Fnv {
  std::uint64_t h = kFnvOffset;
  void bytes(const void* p, std::size_t n) {
    const auto* c = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= c[i];
      h *= kFnvPrime;
    }
  }
  void u64(std::uint64_t x) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(x >> (8 * i));
    bytes(b, 8);
  }
  void str(const std::string& s) {
    u64(s.size());
    bytes(s.data(), s.size());
  }
};

std::uint64_t fnv(const std::string& s) {
  Fnv f;
  f.bytes(s.data(), s.size());
  return f.h;
}

constexpr double kMultiTimes[2] = {0.1, 10.0};

// One filter evaluated per row; multi expands to three.
struct Component {
  FilterKind kind;
  double time = 0.0;
  std::string name;
};

std::string format_time(double t) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, t);
  return std::string(buf, res.ptr);
}

std::vector<Component> components_of(const FilterSpec& f, Task task) {
  if (f.kind != FilterKind::kMulti) {
    return {{f.kind, f.hks_time, "pi"}};
  }
  std::vector<Component> out;
  for (double t : kMultiTimes) out.push_back({FilterKind::kHks, t, "pi_hks" + format_time(t)});
  out.push_back({task == Task::kNodeFeatures ? FilterKind::kCurvatureDistance
                                             : FilterKind::kPairwiseSum,
                 0.0, "pi_curvature"});
  return out;
}

bool needs_curvature(const std::vector<Component>& cs) {
  return std::any_of(cs.begin(), cs.end(), [](const Component& c) {
    return c.kind == FilterKind::kCurvatureDistance || c.kind == FilterKind::kPairwiseSum;
  });
}

void put_u32(std::string& out, std::uint32_t x) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>(x >> (8 * i)));
}
void put_u64(std::string& out, std::uint64_t x) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>(x >> (8 * i)));
}

struct Reader {
  const std::string& s;
  std::size_t pos = 0;
  bool ok = true;

  std::uint64_t uint(int width) {
    if (s.size() - pos < static_cast<std::size_t>(width)) {
      ok = false;
      return 0;
    }
    std::uint64_t x = 0;
    for (int i = 0; i < width; ++i) {
      x |= static_cast<std::uint64_t>(static_cast<unsigned char>(s[pos + i])) << (8 * i);
    }
    pos += width;
    return x;
  }
};

std::string hex(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

// Everything one pipeline run shares across rows.
struct RunContext {
  const Graph& g;
  Task task;
  std::uint32_t k;
  EdgeMode mode;
  std::vector<Component> components;
  std::vector<double> lengths;  // kappa + 1 per parent edge, when needed
  fs::path cache_dir;           // empty: no cache
  PipelineStats* stats;
};

std::uint32_t resolve_k(const PipelineConfig& cfg, const Graph& g) {
  return cfg.hop_radius ? *cfg.hop_radius : default_hop_radius(g);
}

RunContext make_context(const Graph& g, const PipelineConfig& cfg, Task task,
                        PipelineStats* stats) {
  cfg.validate(task);
  RunContext ctx{g, task, resolve_k(cfg, g), cfg.edge_mode,
                 components_of(cfg.resolved_filter(task), task), {}, {}, stats};
  if (needs_curvature(ctx.components)) {
    ctx.lengths = ollivier_ricci(g, cfg.curvature_alpha, cfg.curvature_method).kappa_plus_one;
  }
  if (!cfg.cache_dir.empty()) {
    ctx.cache_dir = fs::path(cfg.cache_dir) /
                    (hex(graph_hash(g)) + "-" + hex(config_hash(cfg, task, ctx.k)));
    std::error_code ec;
    fs::create_directories(ctx.cache_dir, ec);
    if (ec) throw InputError("cannot create cache directory " + ctx.cache_dir.string());
  }
  return ctx;
}

VicinityGraph vicinity_for(const RunContext& ctx, Vertex u, std::optional<Vertex> v) {
  return v ? pair_vicinity(ctx.g, u, *v, ctx.k) : k_hop_vicinity(ctx.g, u, ctx.k);
}

VertexFilter evaluate(const RunContext& ctx, const Component& c, const VicinityGraph& vg) {
  switch (c.kind) {
    case FilterKind::kSpd:
      return spd_filter(vg);
    case FilterKind::kCurvatureDistance:
      return curvature_distance_filter(vg, local_edge_lengths(ctx.g, vg, ctx.lengths));
    case FilterKind::kPairwiseSum:
      return pairwise_sum_filter(vg, local_edge_lengths(ctx.g, vg, ctx.lengths));
    case FilterKind::kTupleDistance:
      return tuple_distance_filter(vg);
    case FilterKind::kHks:
      return hks_filter(vg.local, c.time);
    case FilterKind::kMulti:
      break;
  }
  throw InternalError("multi filter reached evaluation");
}

std::vector<PersistenceDiagram> compute_diagrams(const RunContext& ctx, const VicinityGraph& vg,
                                                 ExtendedPersistence& engine) {
  std::vector<PersistenceDiagram> out;
  out.reserve(ctx.components.size());
  for (const auto& c : ctx.components) {
    const auto filt = extend_to_edges(vg.local, evaluate(ctx, c, vg), ctx.mode).normalized();
    auto d = engine.compute(filt);
    d.canonicalize();
    out.push_back(std::move(d));
    if (ctx.stats) ++ctx.stats->diagrams_computed;
  }
  return out;
}

fs::path cache_file(const RunContext& ctx, Vertex u, std::optional<Vertex> v) {
  std::string name = v ? "pair-" + std::to_string(u) + "-" + std::to_string(*v)
                       : "node-" + std::to_string(u);
  return ctx.cache_dir / (name + ".epd");
}

std::optional<std::string> read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void write_atomically(const fs::path& target, const std::string& bytes) {
  // Unique temp name per writer and process; rename() replaces the target in one step.
  static const std::uint64_t process_tag = std::random_device{}();
  static std::atomic<std::uint64_t> serial{0};
  const auto tag = std::hash<std::thread::id>{}(std::this_thread::get_id()) ^ (process_tag << 32);
  fs::path tmp = target;
  tmp += ".tmp" + hex(tag) + "-" + std::to_string(serial++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw InputError("cannot write cache file " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw InputError("cannot publish cache file " + target.string());
  }
}

std::vector<PersistenceDiagram> cached_diagrams(const RunContext& ctx, Vertex u,
                                                std::optional<Vertex> v,
                                                const VicinityGraph& vg,
                                                ExtendedPersistence& engine) {
  if (ctx.cache_dir.empty()) return compute_diagrams(ctx, vg, engine);
  const auto path = cache_file(ctx, u, v);
  if (auto bytes = read_file(path)) {
    auto ds = decode_diagrams(*bytes);
    if (ds && ds->size() == ctx.components.size()) {
      if (ctx.stats) ++ctx.stats->cache_hits;
      return std::move(*ds);
    }
    if (ctx.stats) ++ctx.stats->cache_corrupt;
    spdlog::warn("discarding corrupt cache entry {}", path.string());
  }
  auto ds = compute_diagrams(ctx, vg, engine);
  try {
    write_atomically(path, encode_diagrams(ds));
    if (ctx.stats) ++ctx.stats->cache_writes;
  } catch (const InputError& e) {
    spdlog::warn("{}", e.what());
  }
  return ds;
}

FeatureLayout layout_for(const RunContext& ctx, const PipelineConfig& cfg) {
  FeatureLayout layout;
  for (const auto& c : ctx.components) layout.append(c.name, cfg.image.size());
  if (cfg.piplus) {
    layout.append("n_level", ctx.k + 1);
    layout.append("n_intra", ctx.k + 1);
    layout.append("n_cross", ctx.k);
  }
  return layout;
}

void fill_row(const RunContext& ctx, const PipelineConfig& cfg, Vertex u, std::optional<Vertex> v,
              ExtendedPersistence& engine, std::span<double> row) {
  const auto vg = vicinity_for(ctx, u, v);
  const auto ds = cached_diagrams(ctx, u, v, vg, engine);
  auto out = row.begin();
  for (const auto& d : ds) {
    const auto img = persistence_image(d, cfg.image);
    out = std::copy(img.begin(), img.end(), out);
  }
  if (cfg.piplus) {
    const auto counts = structural_counts(vg, ctx.k);
    for (const auto* seg : {&counts.n_level, &counts.n_intra, &counts.n_cross}) {
      for (auto x : *seg) *out++ = static_cast<double>(x);
    }
  }
  if (out != row.end()) throw InternalError("feature row width mismatch");
}

// Rows are claimed dynamically but written to fixed slots, so output does not
// depend on scheduling.
template <typename RowFn>
void run_rows(std::size_t rows, std::size_t workers, RowFn&& fn) {
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    ExtendedPersistence engine;
    for (std::size_t r = next++; r < rows; r = next++) fn(r, engine);
  };
  const std::size_t n = std::min(workers, rows);
  if (n <= 1) {
    work();
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(n);
  for (std::size_t i = 0; i < n; ++i) pool.emplace_back(work);
  for (auto& t : pool) t.join();
}

FeatureMatrix run(const Graph& g, std::span<const std::pair<Vertex, Vertex>> pairs, Task task,
                  const PipelineConfig& cfg, PipelineStats* stats) {
  const RunContext ctx = make_context(g, cfg, task, stats);
  FeatureMatrix m;
  m.layout = layout_for(ctx, cfg);
  m.rows = task == Task::kNodeFeatures ? g.num_vertices() : pairs.size();
  m.cols = m.layout.width();
  m.values.assign(m.rows * m.cols, 0.0);

  run_rows(m.rows, cfg.workers, [&](std::size_t r, ExtendedPersistence& engine) {
    Vertex u = static_cast<Vertex>(r);
    std::optional<Vertex> v;
    if (task == Task::kPairFeatures) {
      u = pairs[r].first;
      v = pairs[r].second;
    }
    const std::span<double> row(m.values.data() + r * m.cols, m.cols);
    try {
      fill_row(ctx, cfg, u, v, engine, row);
    } catch (const std::exception& e) {
      std::fill(row.begin(), row.end(), 0.0);
      if (stats) ++stats->failed_rows;
      if (v) {
        spdlog::warn("pair ({}, {}): {}; writing a zero row", u, *v, e.what());
      } else {
        spdlog::warn("node {}: {}; writing a zero row", u, e.what());
      }
    }
  });
  return m;
}

}  // namespace

FilterSpec parse_filter(const std::string& name) {
  if (name == "spd") return {FilterKind::kSpd};
  if (name == "curvature-distance") return {FilterKind::kCurvatureDistance};
  if (name == "pairwise-sum") return {FilterKind::kPairwiseSum};
  if (name == "tuple-distance") return {FilterKind::kTupleDistance};
  if (name == "multi") return {FilterKind::kMulti};
  if (name.rfind("hks:", 0) == 0) {
    const std::string t = name.substr(4);
    double value = 0.0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), value);
    if (t.empty() || res.ec != std::errc{} || res.ptr != t.data() + t.size() ||
        !std::isfinite(value) || value < 0.0) {
      throw InputError("bad diffusion time in filter '" + name + "'");
    }
    return {FilterKind::kHks, value};
  }
  throw InputError("unknown filter '" + name +
                   "' (spd, curvature-distance, pairwise-sum, tuple-distance, hks:T, multi)");
}

std::string to_string(const FilterSpec& f) {
  switch (f.kind) {
    case FilterKind::kSpd: return "spd";
    case FilterKind::kCurvatureDistance: return "curvature-distance";
    case FilterKind::kPairwiseSum: return "pairwise-sum";
    case FilterKind::kTupleDistance: return "tuple-distance";
    case FilterKind::kHks: return "hks:" + format_time(f.hks_time);
    case FilterKind::kMulti: return "multi";
  }
  return "?";
}

FilterSpec PipelineConfig::resolved_filter(Task task) const {
  if (filter) return *filter;
  return {task == Task::kNodeFeatures ? FilterKind::kCurvatureDistance : FilterKind::kPairwiseSum};
}

void PipelineConfig::validate(Task task) const {
  if (hop_radius && *hop_radius == 0) throw InputError("k must be at least 1");
  if (hop_radius && *hop_radius > 64) throw InputError("k must be at most 64");
  image.validate();
  if (workers == 0) throw InputError("workers must be at least 1");
  if (workers > 1024) throw InputError("workers must be at most 1024");
  if (!(curvature_alpha >= 0.0 && curvature_alpha < 1.0)) {
    throw InputError("curvature_alpha must lie in [0, 1)");
  }
  const auto f = resolved_filter(task);
  if (f.kind == FilterKind::kHks && !(std::isfinite(f.hks_time) && f.hks_time >= 0.0)) {
    throw InputError("diffusion time must be finite and non-negative");
  }
  const bool one_root = f.kind == FilterKind::kSpd || f.kind == FilterKind::kCurvatureDistance;
  const bool two_roots = f.kind == FilterKind::kPairwiseSum || f.kind == FilterKind::kTupleDistance;
  if (task == Task::kNodeFeatures && two_roots) {
    throw InputError("filter " + to_string(f) + " needs node pairs");
  }
  if (task == Task::kPairFeatures && one_root) {
    throw InputError("filter " + to_string(f) + " needs a single root");
  }
  if (task == Task::kPairFeatures && piplus) {
    throw InputError("PI+ structural counts are defined for single-root vicinities only");
  }
}

PipelineConfig PipelineConfig::from_json(const nlohmann::json& doc, Task task) {
  if (!doc.is_object()) throw InputError("config must be a JSON object");
  PipelineConfig cfg;
  auto count = [](const nlohmann::json& v, const std::string& key) -> std::uint64_t {
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
      throw InputError("config '" + key + "' must be a non-negative integer");
    }
    return v.get<std::uint64_t>();
  };
  auto real = [](const nlohmann::json& v, const std::string& key) {
    if (!v.is_number()) throw InputError("config '" + key + "' must be a number");
    return v.get<double>();
  };
  auto text = [](const nlohmann::json& v, const std::string& key) {
    if (!v.is_string()) throw InputError("config '" + key + "' must be a string");
    return v.get<std::string>();
  };
  for (const auto& [key, v] : doc.items()) {
    if (key == "k") {
      const auto k = count(v, key);
      if (k > 64) throw InputError("k must be at most 64");
      cfg.hop_radius = static_cast<std::uint32_t>(k);
    } else if (key == "filter") {
      cfg.filter = parse_filter(text(v, key));
    } else if (key == "edge_mode") {
      cfg.edge_mode = parse_edge_mode(text(v, key));
    } else if (key == "pi_rows") {
      cfg.image.rows = count(v, key);
    } else if (key == "pi_cols") {
      cfg.image.cols = count(v, key);
    } else if (key == "sigma") {
      cfg.image.sigma = real(v, key);
    } else if (key == "piplus") {
      if (!v.is_boolean()) throw InputError("config 'piplus' must be a boolean");
      cfg.piplus = v.get<bool>();
    } else if (key == "workers") {
      cfg.workers = count(v, key);
    } else if (key == "cache") {
      cfg.cache_dir = text(v, key);
    } else if (key == "seed") {
      cfg.seed = count(v, key);
    } else if (key == "curvature_alpha") {
      cfg.curvature_alpha = real(v, key);
    } else if (key == "curvature_method") {
      cfg.curvature_method = parse_transport_method(text(v, key));
    } else {
      throw InputError("unknown config key '" + key + "'");
    }
  }
  cfg.validate(task);
  return cfg;
}

std::uint32_t default_hop_radius(const Graph& g) {
  if (g.num_vertices() == 0) return 2;
  const double avg = 2.0 * static_cast<double>(g.num_edges()) / static_cast<double>(g.num_vertices());
  return avg < 10.0 ? 2 : 1;
}

FeatureMatrix node_features(const Graph& g, const PipelineConfig& cfg, PipelineStats* stats) {
  return run(g, {}, Task::kNodeFeatures, cfg, stats);
}

FeatureMatrix pair_features(const Graph& g, std::span<const std::pair<Vertex, Vertex>> pairs,
                            const PipelineConfig& cfg, PipelineStats* stats) {
  for (const auto& [u, v] : pairs) {
    if (u >= g.num_vertices() || v >= g.num_vertices()) {
      throw InputError("pair (" + std::to_string(u) + ", " + std::to_string(v) +
                       ") is out of range");
    }
    if (u == v) throw InputError("pair endpoints must differ: " + std::to_string(u));
  }
  return run(g, pairs, Task::kPairFeatures, cfg, stats);
}

std::vector<PersistenceDiagram> row_diagrams(const Graph& g, Vertex u, std::optional<Vertex> v,
                                             const PipelineConfig& cfg) {
  if (u >= g.num_vertices() || (v && *v >= g.num_vertices())) {
    throw InputError("vertex out of range");
  }
  if (v && *v == u) throw InputError("pair endpoints must differ");
  PipelineConfig plain = cfg;
  plain.cache_dir.clear();
  const auto ctx = make_context(g, plain, v ? Task::kPairFeatures : Task::kNodeFeatures, nullptr);
  ExtendedPersistence engine;
  return compute_diagrams(ctx, vicinity_for(ctx, u, v), engine);
}

std::uint64_t graph_hash(const Graph& g) {
  Fnv f;
  f.u64(g.num_vertices());
  f.u64(g.num_edges());
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    f.u64(g.edge(e).u);
    f.u64(g.edge(e).v);
    f.u64(std::bit_cast<std::uint64_t>(g.weight(e)));
  }
  return f.h;
}

std::uint64_t config_hash(const PipelineConfig& cfg, Task task, std::uint32_t k) {
  Fnv f;
  f.str(task == Task::kNodeFeatures ? "node" : "pair");
  f.u64(k);
  f.str(to_string(cfg.resolved_filter(task)));
  f.str(to_string(cfg.edge_mode));
  f.u64(std::bit_cast<std::uint64_t>(cfg.curvature_alpha));
  f.str(std::string(to_string(cfg.curvature_method)));
  return f.h;
}

std::string encode_diagrams(const std::vector<PersistenceDiagram>& ds) {
  std::string out = "EPDC";
  put_u32(out, 1);
  put_u32(out, static_cast<std::uint32_t>(ds.size()));
  for (const auto& d : ds) {
    put_u64(out, d.points.size());
    for (const auto& p : d.points) {
      put_u64(out, std::bit_cast<std::uint64_t>(p.birth));
      put_u64(out, std::bit_cast<std::uint64_t>(p.death));
      out.push_back(static_cast<char>(p.dimension));
      out.push_back(static_cast<char>(p.kind));
    }
  }
  put_u64(out, fnv(out));
  return out;
}

std::optional<std::vector<PersistenceDiagram>> decode_diagrams(const std::string& bytes) {
  constexpr std::size_t kRecord = 18;
  if (bytes.size() < 20 || bytes.compare(0, 4, "EPDC") != 0) return std::nullopt;
  const std::string body = bytes.substr(0, bytes.size() - 8);
  Reader tail{bytes, bytes.size() - 8};
  if (tail.uint(8) != fnv(body)) return std::nullopt;

  Reader r{body, 4};
  if (r.uint(4) != 1) return std::nullopt;
  const auto n = r.uint(4);
  std::vector<PersistenceDiagram> out;
  for (std::uint64_t i = 0; i < n && r.ok; ++i) {
    const auto count = r.uint(8);
    if (!r.ok || count > (body.size() - r.pos) / kRecord) return std::nullopt;
    PersistenceDiagram d;
    d.points.reserve(count);
    for (std::uint64_t j = 0; j < count; ++j) {
      PersistencePoint p{};
      p.birth = std::bit_cast<double>(r.uint(8));
      p.death = std::bit_cast<double>(r.uint(8));
      p.dimension = static_cast<std::uint8_t>(r.uint(1));
      const auto kind = r.uint(1);
      if (kind > 2 || p.dimension > 1) return std::nullopt;
      p.kind = static_cast<PointKind>(kind);
      d.points.push_back(p);
    }
    out.push_back(std::move(d));
  }
  if (!r.ok || r.pos != body.size()) return std::nullopt;
  return out;
}

}  // namespace locph
