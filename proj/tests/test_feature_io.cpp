#include <doctest.h>

#include <sstream>

#include <nlohmann/json.hpp>

#include "locph/feature_io.hpp"
#include "support.hpp"

using namespace locph;

namespace {

FeatureMatrix sample() {
  FeatureMatrix m;
  m.layout.append("pi", 3);
  m.layout.append("n_level", 2);
  m.rows = 2;
  m.cols = 5;
  m.values = {0.1, 1.0 / 3.0, 0.0, 1.0, 4.0, 1e-300, 0.30000000000000004, -0.0, 2.0, 5.0};
  return m;
}

}  // namespace

TEST_CASE("csv layout header and exact values") {
  const auto m = sample();
  std::ostringstream out;
  write_csv(out, m, {{"node"}, {{"a"}, {"b,c"}}});
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "# layout pi:0+3;n_level:3+2");
  std::getline(in, line);
  CHECK(line == "node,pi_0,pi_1,pi_2,n_level_0,n_level_1");
  std::getline(in, line);
  CHECK(line.rfind("a,", 0) == 0);
  // 17 significant digits read back bit-exactly.
  std::vector<double> back;
  std::stringstream fields(line.substr(2));
  for (std::string f; std::getline(fields, f, ',');) back.push_back(std::stod(f));
  CHECK(back == std::vector<double>(m.values.begin(), m.values.begin() + 5));
  std::getline(in, line);
  CHECK(line.rfind("\"b,c\",", 0) == 0);

  CHECK_THROWS_AS(write_csv(out, m, {{"node"}, {{"a"}}}), InputError);
}

TEST_CASE("binary round trip") {
  const auto m = sample();
  std::stringstream buf;
  write_binary(buf, m);
  const std::string bytes = buf.str();
  CHECK(bytes.substr(0, 4) == "PIFM");
  // header + 2 segments ("pi", "n_level") + values
  CHECK(bytes.size() == 4 + 4 + 8 + 8 + 4 + (4 + 2 + 16) + (4 + 7 + 16) + 10 * 8);
  std::istringstream in(bytes);
  const auto back = read_binary(in);
  CHECK(back.rows == m.rows);
  CHECK(back.cols == m.cols);
  CHECK(back.layout == m.layout);
  REQUIRE(back.values.size() == m.values.size());
  CHECK(std::memcmp(back.values.data(), m.values.data(), m.values.size() * 8) == 0);

  std::istringstream cut(bytes.substr(0, bytes.size() - 3));
  CHECK_THROWS_AS(read_binary(cut), InputError);
  std::istringstream wrong("PIFX" + bytes.substr(4));
  CHECK_THROWS_AS(read_binary(wrong), InputError);
}

TEST_CASE("json round trip") {
  const auto m = sample();
  std::stringstream buf;
  write_json(buf, m, {{"u", "v"}, {{"0", "1"}, {"2", "3"}}});
  const auto doc = nlohmann::json::parse(buf.str());
  CHECK(doc["labels"][1][0] == "2");
  CHECK(doc["layout"][1]["name"] == "n_level");
  std::istringstream in(buf.str());
  const auto back = read_json(in);
  CHECK(back.values == m.values);
  CHECK(back.layout == m.layout);
  std::istringstream junk("{\"rows\": 1}");
  CHECK_THROWS_AS(read_json(junk), InputError);
}

TEST_CASE("format names") {
  CHECK(parse_matrix_format("bin") == MatrixFormat::kBinary);
  CHECK_THROWS_AS(parse_matrix_format("parquet"), InputError);
}

TEST_CASE("diagram dumps") {
  PersistenceDiagram d;
  d.points = {{0.0, 1.0, 0, PointKind::kExtended}, {0.5, 0.25, 1, PointKind::kRelative}};
  CHECK(diagram_from_json(diagram_to_json(d)) == d);
  std::ostringstream csv;
  write_diagram_csv(csv, d);
  CHECK(csv.str() == "birth,death,dim,kind\n0,1,0,extended\n0.5,0.25,1,relative\n");
  CHECK_THROWS_AS(diagram_from_json(nlohmann::json{{"points", {{{"birth", 0}}}}}), InputError);
  CHECK_THROWS_AS(diagram_from_json(nlohmann::json::parse(
                      R"({"points":[{"birth":0,"death":1,"dim":0,"kind":"odd"}]})")),
                  InputError);
}

TEST_CASE("filter dump uses parent names and skips undefined vertices") {
  auto f = VertexFilter::from_values({0.0, 1.0, 2.0});
  f.in_domain[1] = 0;
  const auto doc = filter_to_json(f, {4, 7, 9}, {"a", "b", "c", "d", "e", "f", "g", "h", "i", "j"});
  CHECK(doc.size() == 2);
  CHECK(doc["e"] == 0.0);
  CHECK(doc["j"] == 2.0);
}
