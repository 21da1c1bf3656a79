#include "locph/feature_io.hpp"

#include <bit>
#include <charconv>
#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>

namespace locph {

namespace {

constexpr std::uint32_t kBinaryVersion = 1;

std::string number(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

template <typename T>
void put(std::ostream& out, T x) {
  char b[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) b[i] = static_cast<char>(x >> (8 * i));
  out.write(b, sizeof b);
}

template <typename T>
T get(std::istream& in) {
  char b[sizeof(T)];
  if (!in.read(b, sizeof b)) throw InputError("truncated feature matrix");
  T x = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    x |= static_cast<T>(static_cast<unsigned char>(b[i])) << (8 * i);
  }
  return x;
}

void check_shape(const FeatureMatrix& m) {
  if (m.layout.width() != m.cols || m.values.size() != m.rows * m.cols) {
    throw InputError("feature matrix shape does not match its layout");
  }
}

void check_keys(const FeatureMatrix& m, const RowKeys& keys) {
  if (!keys.labels.empty() && keys.labels.size() != m.rows) {
    throw InputError("row label count does not match the matrix");
  }
  for (const auto& l : keys.labels) {
    if (l.size() != keys.key_columns.size()) throw InputError("row label arity mismatch");
  }
}

}  // namespace

MatrixFormat parse_matrix_format(std::string_view name) {
  if (name == "csv") return MatrixFormat::kCsv;
  if (name == "bin") return MatrixFormat::kBinary;
  if (name == "json") return MatrixFormat::kJson;
  throw InputError("unknown format '" + std::string(name) + "' (csv, bin, json)");
}

void write_csv(std::ostream& out, const FeatureMatrix& m, const RowKeys& keys) {
  check_shape(m);
  check_keys(m, keys);
  out << "# layout ";
  for (std::size_t i = 0; i < m.layout.segments.size(); ++i) {
    const auto& s = m.layout.segments[i];
    out << (i ? ";" : "") << s.name << ':' << s.offset << '+' << s.length;
  }
  out << '\n';
  bool first = true;
  for (const auto& k : keys.key_columns) {
    out << (first ? "" : ",") << csv_field(k);
    first = false;
  }
  for (const auto& s : m.layout.segments) {
    for (std::size_t j = 0; j < s.length; ++j) {
      out << (first ? "" : ",") << s.name << '_' << j;
      first = false;
    }
  }
  out << '\n';
  for (std::size_t r = 0; r < m.rows; ++r) {
    first = true;
    if (!keys.labels.empty()) {
      for (const auto& l : keys.labels[r]) {
        out << (first ? "" : ",") << csv_field(l);
        first = false;
      }
    }
    for (double x : m.row(r)) {
      out << (first ? "" : ",") << number(x);
      first = false;
    }
    out << '\n';
  }
}

void write_binary(std::ostream& out, const FeatureMatrix& m) {
  check_shape(m);
  out.write("PIFM", 4);
  put<std::uint32_t>(out, kBinaryVersion);
  put<std::uint64_t>(out, m.rows);
  put<std::uint64_t>(out, m.cols);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(m.layout.segments.size()));
  for (const auto& s : m.layout.segments) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(s.name.size()));
    out.write(s.name.data(), static_cast<std::streamsize>(s.name.size()));
    put<std::uint64_t>(out, s.offset);
    put<std::uint64_t>(out, s.length);
  }
  for (double x : m.values) put<std::uint64_t>(out, std::bit_cast<std::uint64_t>(x));
}

FeatureMatrix read_binary(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::string_view(magic, 4) != "PIFM") {
    throw InputError("not a feature matrix file");
  }
  if (get<std::uint32_t>(in) != kBinaryVersion) throw InputError("unsupported matrix version");
  FeatureMatrix m;
  m.rows = get<std::uint64_t>(in);
  m.cols = get<std::uint64_t>(in);
  const auto segments = get<std::uint32_t>(in);
  for (std::uint32_t i = 0; i < segments; ++i) {
    const auto len = get<std::uint32_t>(in);
    if (len > 4096) throw InputError("segment name too long");
    std::string name(len, '\0');
    if (!in.read(name.data(), len)) throw InputError("truncated feature matrix");
    const auto offset = get<std::uint64_t>(in);
    const auto length = get<std::uint64_t>(in);
    if (offset != m.layout.width()) throw InputError("segments are not contiguous");
    m.layout.append(std::move(name), length);
  }
  if (m.layout.width() != m.cols) throw InputError("layout width does not match column count");
  if (m.cols != 0 && m.rows > (std::uint64_t{1} << 40) / m.cols) {
    throw InputError("feature matrix too large");
  }
  m.values.resize(m.rows * m.cols);
  for (double& x : m.values) x = std::bit_cast<double>(get<std::uint64_t>(in));
  return m;
}

void write_json(std::ostream& out, const FeatureMatrix& m, const RowKeys& keys) {
  check_shape(m);
  check_keys(m, keys);
  nlohmann::json doc;
  doc["rows"] = m.rows;
  doc["cols"] = m.cols;
  doc["layout"] = nlohmann::json::array();
  for (const auto& s : m.layout.segments) {
    doc["layout"].push_back({{"name", s.name}, {"offset", s.offset}, {"length", s.length}});
  }
  doc["keys"] = keys.key_columns;
  doc["labels"] = keys.labels;
  doc["data"] = nlohmann::json::array();
  for (std::size_t r = 0; r < m.rows; ++r) {
    doc["data"].push_back(std::vector<double>(m.row(r).begin(), m.row(r).end()));
  }
  out << doc.dump() << '\n';
}

FeatureMatrix read_json(std::istream& in) {
  try {
    const auto doc = nlohmann::json::parse(in);
    FeatureMatrix m;
    m.rows = doc.at("rows").get<std::size_t>();
    m.cols = doc.at("cols").get<std::size_t>();
    for (const auto& s : doc.at("layout")) {
      if (s.at("offset").get<std::size_t>() != m.layout.width()) {
        throw InputError("segments are not contiguous");
      }
      m.layout.append(s.at("name").get<std::string>(), s.at("length").get<std::size_t>());
    }
    const auto& data = doc.at("data");
    if (data.size() != m.rows) throw InputError("row count mismatch");
    for (const auto& row : data) {
      if (row.size() != m.cols) throw InputError("column count mismatch");
      for (const auto& x : row) m.values.push_back(x.get<double>());
    }
    check_shape(m);
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("bad feature matrix JSON: ") + e.what());
  }
}

void write_matrix(std::ostream& out, const FeatureMatrix& m, const RowKeys& keys,
                  MatrixFormat format) {
  switch (format) {
    case MatrixFormat::kCsv: write_csv(out, m, keys); return;
    case MatrixFormat::kBinary: write_binary(out, m); return;
    case MatrixFormat::kJson: write_json(out, m, keys); return;
  }
}

nlohmann::json diagram_to_json(const PersistenceDiagram& d) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : d.points) {
    pts.push_back({{"birth", p.birth},
                   {"death", p.death},
                   {"dim", p.dimension},
                   {"kind", std::string(to_string(p.kind))}});
  }
  return {{"points", pts}};
}

PersistenceDiagram diagram_from_json(const nlohmann::json& doc) {
  try {
    PersistenceDiagram d;
    for (const auto& p : doc.at("points")) {
      const auto kind = p.at("kind").get<std::string>();
      PointKind k;
      if (kind == to_string(PointKind::kOrdinary)) {
        k = PointKind::kOrdinary;
      } else if (kind == to_string(PointKind::kRelative)) {
        k = PointKind::kRelative;
      } else if (kind == to_string(PointKind::kExtended)) {
        k = PointKind::kExtended;
      } else {
        throw InputError("unknown point kind '" + kind + "'");
      }
      const auto dim = p.at("dim").get<int>();
      if (dim < 0 || dim > 1) throw InputError("point dimension must be 0 or 1");
      d.points.push_back({p.at("birth").get<double>(), p.at("death").get<double>(),
                          static_cast<std::uint8_t>(dim), k});
    }
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("bad diagram JSON: ") + e.what());
  }
}

void write_diagram_csv(std::ostream& out, const PersistenceDiagram& d) {
  out << "birth,death,dim,kind\n";
  for (const auto& p : d.points) {
    out << number(p.birth) << ',' << number(p.death) << ',' << int{p.dimension} << ','
        << to_string(p.kind) << '\n';
  }
}

nlohmann::json filter_to_json(const VertexFilter& f, const std::vector<Vertex>& to_parent,
                              const std::vector<std::string>& names) {
  if (to_parent.size() != f.size()) throw InputError("filter and vertex map differ in size");
  nlohmann::json out = nlohmann::json::object();
  for (Vertex v = 0; v < f.size(); ++v) {
    if (!f.defined(v)) continue;
    const Vertex p = to_parent[v];
    out[p < names.size() ? names[p] : std::to_string(p)] = f.values[v];
  }
  return out;
}

}  // namespace locph
