#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "locph/filtration.hpp"
#include "locph/persistence.hpp"
#include "locph/pipeline.hpp"

namespace locph {

enum class MatrixFormat : std::uint8_t { kCsv, kBinary, kJson };

MatrixFormat parse_matrix_format(std::string_view name);  // csv | bin | json

/// `row_keys` holds one label list per row (one vertex name, or two for a pair);
/// `key_columns` names those label columns in the CSV header.
struct RowKeys {
  std::vector<std::string> key_columns;
  std::vector<std::vector<std::string>> labels;
};

/// First line `# layout name:offset+length;...`, then a header row, then one
/// row per node or pair. Values use 17 significant digits.
void write_csv(std::ostream& out, const FeatureMatrix& m, const RowKeys& keys);

/// "PIFM", u32 version 1, u64 rows, u64 cols, u32 segment count, per segment
/// u32 name length + name bytes + u64 offset + u64 length, then rows*cols
/// little-endian f64 values in row-major order.
void write_binary(std::ostream& out, const FeatureMatrix& m);
FeatureMatrix read_binary(std::istream& in);

/// {"rows", "cols", "layout": [{name, offset, length}], "keys", "labels", "data"}.
void write_json(std::ostream& out, const FeatureMatrix& m, const RowKeys& keys);
FeatureMatrix read_json(std::istream& in);

void write_matrix(std::ostream& out, const FeatureMatrix& m, const RowKeys& keys,
                  MatrixFormat format);

/// {"points": [{"birth", "death", "dim", "kind"}]}.
nlohmann::json diagram_to_json(const PersistenceDiagram& d);
PersistenceDiagram diagram_from_json(const nlohmann::json& doc);
/// Header `birth,death,dim,kind`, one point per line.
void write_diagram_csv(std::ostream& out, const PersistenceDiagram& d);

/// {"vertex name": value} for defined vertices, using the parent graph's names.
nlohmann::json filter_to_json(const VertexFilter& f, const std::vector<Vertex>& to_parent,
                              const std::vector<std::string>& names);

}  // namespace locph
