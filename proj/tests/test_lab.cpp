#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <doctest.h>

#include "oscillab/lab.hpp"

using namespace oscillab;
using nlohmann::json;

namespace {

json small_config(json symbol, std::vector<std::string> criteria) {
  return json{{"symbol", std::move(symbol)},
              {"criteria", std::move(criteria)},
              {"depth", 5},
              {"grid", {{"angles", 8}, {"seminorm_angles", 4}, {"seminorm_depth", 3}, {"arc_nodes", 64},
                        {"boundary_n", 1024}, {"s1_angles", 4}, {"s1_w_angles", 8}}}};
}

std::vector<std::string> csv_rows(const std::string& csv) {
  std::vector<std::string> rows;
  std::istringstream in(csv);
  for (std::string line; std::getline(in, line);) rows.push_back(line);
  return rows;
}

double field(const std::string& row, int index) {
  std::istringstream in(row);
  std::string cell;
  for (int i = 0; i <= index; ++i) std::getline(in, cell, ',');
  return std::stod(cell);
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("oscillab_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("run_sweep examples") {
  const auto c = SweepConfig::from_json(small_config({{"kind", "const"}, {"value", {0.3, 0.0}}}, {"L"}));
  const SweepResult r = run_sweep(c);
  CHECK(r.report.classification == Classification::compact_evidence);
  const auto rows = csv_rows(r.csv);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0] == "kind,approach,value,grid_size,tau_cap_hits");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].rfind("L,", 0) == 0);
    CHECK(field(rows[i], 2) == 0.0);
  }

  const SweepResult id = run_sweep(SweepConfig::from_json(small_config({{"kind", "identity"}}, {"L", "S1"})));
  for (const auto& row : csv_rows(id.csv)) {
    if (row.rfind("L,", 0) == 0) CHECK(field(row, 2) == doctest::Approx(1.0).epsilon(1e-9));
    if (row.rfind("S1,", 0) == 0) CHECK(field(row, 2) == doctest::Approx(0.5 * std::exp(-1.0)).epsilon(1e-6));
  }
  CHECK(id.report.classification == Classification::non_compact_evidence);

  CHECK_THROWS_WITH_AS(SweepConfig::from_json(small_config({{"kind", "identity"}}, {})), "no criteria selected",
                       ConfigError);
}

TEST_CASE("run_sweep writes deterministic outputs") {
  const auto dir = scratch_dir("sweep");
  json j = small_config({{"kind", "poly"}, {"coeffs", {{0.5, 0.0}, {0.5, 0.0}}}}, {"L", "W1", "A-prime"});
  j["outputs"] = {{"csv", (dir / "a.csv").string()}, {"json", (dir / "a.json").string()}, {"svg", (dir / "a.svg").string()}};
  j["workers"] = 1;
  const SweepResult first = run_sweep(SweepConfig::from_json(j));
  j["outputs"] = {{"csv", (dir / "b.csv").string()}, {"json", (dir / "b.json").string()}, {"svg", ""}};
  j["workers"] = 3;
  const SweepResult second = run_sweep(SweepConfig::from_json(j));
  CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
  CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));
  CHECK(first.csv == second.csv);
  CHECK(slurp(dir / "a.svg").rfind("<svg", 0) == 0);
  CHECK_FALSE(std::filesystem::exists(dir / "b.svg"));
  const json report = json::parse(first.json);
  CHECK(report.at("verdict").at("classification") == "non-compact-evidence");
  CHECK_FALSE(report.at("config").contains("workers"));
}

TEST_CASE("config round trip and validation") {
  json j = small_config({{"kind", "moebius"}, {"a", {0.5, 0.25}}}, {"L", "S2"});
  j["thresholds"] = {{"epsilon", 0.2}, {"delta", 0.05}};
  j["seed"] = 7;
  const SweepConfig c = SweepConfig::from_json(j);
  const std::string text = c.serialize();
  CHECK(SweepConfig::from_json(json::parse(text)).serialize() == text);
  CHECK(c.options.epsilon == 0.2);
  CHECK(c.seed == 7);

  auto rejects = [&](json bad) { CHECK_THROWS_AS(SweepConfig::from_json(bad), ConfigError); };
  json extra = j;
  extra["colour"] = "red";
  rejects(extra);
  json depth = j;
  depth["depth"] = 2;
  rejects(depth);
  json kind = j;
  kind["criteria"] = {"L", "Q"};
  rejects(kind);
  json sym = j;
  sym["symbol"] = {{"kind", "lens"}};
  rejects(sym);
  json boundary = j;
  boundary["grid"]["boundary_n"] = 1000;
  rejects(boundary);
  json missing = j;
  missing.erase("symbol");
  rejects(missing);
  json not_self_map = j;
  not_self_map["symbol"] = {{"kind", "poly"}, {"coeffs", {{0.0, 0.0}, {2.0, 0.0}}}};
  CHECK_THROWS(run_sweep(SweepConfig::from_json(not_self_map)));
}

TEST_CASE("run_decompose examples") {
  const json empty = run_decompose(json::array(), "wik", "1/2");
  CHECK(empty.at("verification").at("ok").get<bool>());
  CHECK(empty.at("family").empty());

  const json quarter = run_decompose(json::array({{0, 1, 1, 4}}), "wik", "1/2");
  const json& v = quarter.at("verification");
  CHECK(v.at("ok").get<bool>());
  CHECK(v.at("sandwich").get<bool>());
  CHECK(v.at("disjoint").get<bool>());
  CHECK(v.at("residue") == "0");

  const json half = run_decompose(json::array({{0, 1, 1, 2}}), "density", "");
  CHECK(half.at("verification").at("ok").get<bool>());
  for (const auto& s : half.at("samples")) CHECK(parse_rational(s.at("ratio").get<std::string>()) >= Rational(1, 16));

  CHECK_THROWS(run_decompose(json::array({{0, 1, 1, 4}}), "wik", ""));
  CHECK_THROWS(run_decompose(json::array({{0, 1, 1, 4}}), "split", "1/2"));
  CHECK_THROWS(run_decompose(json::array({{0, 1, 3, 4}}), "wik", "1/2"));
}

TEST_CASE("identity suite") {
  const IdentityReport r = run_identities(4096, 3, 5);
  CHECK(r.ok());
  CHECK(r.rows.size() == 3 * builtin_gallery().size());
  for (const auto& row : r.rows) CHECK(row.spread() < 1e-8);
  CHECK(r.to_json().at("ok").get<bool>());
}

TEST_CASE("gallery definitions") {
  const auto g = builtin_gallery();
  REQUIRE(g.size() == 8);
  for (const auto& e : g) {
    CHECK_FALSE(e.note.empty());
    CHECK_NOTHROW(SelfMap(e.symbol));
  }
  CHECK(gallery_kinds().size() == 11);
}
