#include <doctest.h>

#include <fstream>

#include "roughbie/config.hpp"

using namespace roughbie;
using nlohmann::json;

namespace {

json default_json() {
  std::ifstream is(ROUGHBIE_SOURCE_DIR "/configs/default.json");
  REQUIRE(is.good());
  return json::parse(is);
}

std::string offending_key(const json& j) {
  try {
    parse_config(j);
  } catch (const ConfigError& e) {
    return e.key;
  }
  return "";
}

}  // namespace

TEST_CASE("shipped default configuration parses") {
  const ScenarioConfig c = load_config(ROUGHBIE_SOURCE_DIR "/configs/default.json");
  CHECK(c.upper.sigma == 10.0);
  CHECK(c.lower.epsilon == 2.0);
  CHECK(c.obstacle.radius == 0.5);
  CHECK(c.discretization.gamma_density == 12.0);
  CHECK(c.plane.nx == 21);
  CHECK(c.stability_h.size() == 4);
  CHECK(c.dipole.polarization.norm() == doctest::Approx(1.0));
  CHECK_FALSE(c.warnings.empty());  // the polarization in the file is not unit length
  CHECK_NOTHROW(c.scene());
}

TEST_CASE("errors name the first offending key") {
  json j = default_json();
  j.erase("media");
  CHECK(offending_key(j) == "media");
  j.erase("surface");
  CHECK(offending_key(j) == "surface");

  j = default_json();
  j["solver"]["tol"] = 0.5;
  CHECK(offending_key(j) == "solver.tol");

  j = default_json();
  j["obstacle"]["colour"] = "red";
  CHECK(offending_key(j) == "obstacle.colour");

  j = default_json();
  j["media"]["upper"]["sigma"] = -1.0;
  CHECK(offending_key(j) == "media.upper.sigma");

  j = default_json();
  j["schema_version"] = 99;
  CHECK(offending_key(j) == "schema_version");

  j = default_json();
  j["obstacle"]["center"] = {0.0, 0.0, 0.3};
  CHECK(offending_key(j) == "obstacle");

  j = default_json();
  j["dipole"]["position"] = {0.0, 0.0, 1.2};
  CHECK(offending_key(j) == "dipole");

  CHECK_THROWS_AS(load_config("/nonexistent/roughbie.json"), ConfigError);
}

TEST_CASE("resolved configuration round-trips") {
  const ScenarioConfig c = parse_config(default_json());
  const json once = to_json(c);
  const json twice = to_json(parse_config(once));
  CHECK(once == twice);
}
