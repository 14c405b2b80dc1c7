#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "vsm/config.hpp"

using namespace vsm;

namespace {

std::string error_of(std::string_view text) {
  try {
    (void)parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

bool contains(const std::string& s, std::string_view part) { return s.find(part) != std::string::npos; }

}  // namespace

TEST_CASE("defaults follow the simulation protocol") {
  const RunConfig c;
  CHECK(c.spring.a == 5.0);
  CHECK(c.spring.law == SpringLaw::Additive);
  CHECK(c.grid.nx == 61);
  CHECK(c.grid.ny == 61);
  CHECK(c.grid.cutoff == 1e-4);
  CHECK(c.log_base == LogBase::Natural);
  CHECK(c.load == std::array<double, 2>{0.0, 0.0});
  CHECK(c.designs.size() == 6);
  REQUIRE(c.geometries.size() == 2);
  CHECK(c.geometries[1] == DesignGeometry{0.4, 0.4, 0.5});
  CHECK(c.metric_options().load.is_zero());
}

TEST_CASE("empty and default documents parse to the defaults") {
  CHECK(parse_config("{}") == RunConfig{});
  CHECK(parse_config(defaults_document()) == RunConfig{});
  CHECK(parse_config(config_to_json(RunConfig{})) == RunConfig{});
}

TEST_CASE("config round trip keeps every field") {
  RunConfig c;
  c.designs = {DesignId::FourLegs, DesignId::ViaSea};
  c.geometries = {{0.3, 0.7, 0.25}};
  c.base_offsets.three_legs = 0.1;
  c.spring.a = 3.5;
  c.spring.law = SpringLaw::Product;
  c.grid = {31, 17, 1e-3};
  c.optimizer.grid_points = 11;
  c.optimizer.refine_iterations = 5;
  c.log_base = LogBase::Decimal;
  c.load = {0.5, -0.25};
  c.threads = 4;
  c.output.sweep = "a b.csv";
  const std::string text = config_to_json(c);
  const RunConfig back = parse_config(text);
  CHECK(back == c);
  CHECK(config_to_json(back) == text);
}

TEST_CASE("partial documents override only the named keys") {
  const RunConfig c = parse_config(R"({
    // finer grid
    "grid": {"nx": 121},
    "spring": {"law": "product"} /* block comment */
  })");
  CHECK(c.grid.nx == 121);
  CHECK(c.grid.ny == 61);
  CHECK(c.spring.law == SpringLaw::Product);
  CHECK(c.spring.a == 5.0);
  CHECK(c.designs.size() == 6);
}

TEST_CASE("parse errors name the line") {
  const std::string msg = error_of("{\n  \"grid\": {\n    \"nx\": ,\n  }\n}");
  CHECK(contains(msg, "line 3"));
  CHECK(contains(error_of("{\"grid\": "), "line 1"));
}

TEST_CASE("unknown keys and values are rejected") {
  CHECK(contains(error_of(R"({"gird": {}})"), "unknown key \"gird\""));
  CHECK(contains(error_of(R"({"grid": {"nz": 3}})"), "unknown key \"nz\""));
  CHECK(contains(error_of(R"({"designs": ["five_legs"]})"), "five_legs"));
  CHECK(contains(error_of(R"({"log_base": "log2"})"), "log_base"));
  CHECK(contains(error_of(R"({"spring": {"law": "linear"}})"), "spring.law"));
}

TEST_CASE("type errors are reported with the key path") {
  CHECK(contains(error_of(R"({"grid": {"nx": "61"}})"), "grid.nx"));
  CHECK(contains(error_of(R"({"grid": {"nx": 61.5}})"), "grid.nx"));
  CHECK(contains(error_of(R"({"geometries": [{"r": 0.4, "l": "x", "e": 0.5}]})"), "geometries[0].l"));
  CHECK(contains(error_of(R"({"load": [1]})"), "load"));
  CHECK(contains(error_of(R"({"designs": "four_legs"})"), "designs"));
  CHECK(contains(error_of("[]"), "expected an object"));
}

TEST_CASE("value validation") {
  CHECK(contains(error_of(R"({"grid": {"nx": 1}})"), "grid"));
  CHECK(contains(error_of(R"({"grid": {"cutoff": 1.5}})"), "grid.cutoff"));
  CHECK(contains(error_of(R"({"spring": {"a": -1}})"), "spring.a"));
  CHECK(contains(error_of(R"({"threads": 0})"), "threads"));
  CHECK(contains(error_of(R"({"geometries": []})"), "geometries"));
  CHECK(contains(error_of(R"({"geometries": [{"r": 0}]})"), "geometries[0]"));
  CHECK(contains(error_of(R"({"designs": []})"), "designs"));
  CHECK(contains(error_of(R"({"optimizer": {"grid_points": 1}})"), "optimizer.grid_points"));
}

TEST_CASE("load_config reads files and prefixes the path") {
  const auto dir = std::filesystem::temp_directory_path() / "vsm_test_config";
  std::filesystem::create_directories(dir);
  const auto good = dir / "good.json";
  std::ofstream(good) << "{\"threads\": 3}\n";
  CHECK(load_config(good).threads == 3);

  const auto bad = dir / "bad.json";
  std::ofstream(bad) << "{\n\"threads\": 3,,\n}\n";
  try {
    (void)load_config(bad);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(contains(e.what(), bad.string()));
    CHECK(contains(e.what(), "line 2"));
  }
  CHECK_THROWS_AS(load_config(dir / "missing.json"), ConfigError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("designs built from the config use its spring and geometry") {
  RunConfig c = parse_config(R"({"geometries": [{"r": 0.3, "l": 0.6, "e": 0.4}], "spring": {"a": 2}})");
  const MechanismDesign d = c.design(DesignId::ThreeLegs);
  CHECK(d.e == 0.4);
  CHECK(d.legs.front().geometry.r == 0.3);
  CHECK(d.legs.front().geometry.l == 0.6);
  CHECK(c.spring_model().a() == 2.0);
  CHECK_THROWS((void)c.design(DesignId::ThreeLegs, 1));
}
