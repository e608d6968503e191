#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "roughbie/shape.hpp"

namespace roughbie {

inline constexpr int kSchemaVersion = 1;

struct ConvergeSweep {
  std::vector<double> half_widths{1.0, 1.5, 2.0};
  std::vector<double> densities{6.0};
};

struct FieldGrid {
  Vec3 lo{-1.0, -1.0, -0.6};
  Vec3 hi{1.0, 1.0, 2.4};
  int n[3] = {5, 5, 7};
};

struct ScenarioConfig {
  RoughSurface surface;
  Obstacle obstacle;
  Medium upper, lower;
  Dipole dipole;
  Discretization discretization;
  AssemblyOptions assembly;
  SolveOptions solver;
  MeasurementPlane plane;
  std::vector<double> stability_h{0.08, 0.04, 0.02, 0.01};
  std::vector<double> derivative_h{0.04, 0.02, 0.01};
  double alpha = 0.5;
  int holder_cutoff = 10;
  PerturbationField perturbation;
  ConvergeSweep converge;
  FieldGrid field_grid;
  std::vector<double> energy_radii{4.0, 6.0, 8.0};
  bool dump_system = false;

  std::vector<std::string> warnings;
  nlohmann::json resolved;  // the full configuration after defaults

  Scene scene() const;
};

// Throws ConfigError naming the first offending key (dotted path).
ScenarioConfig parse_config(const nlohmann::json& j);
ScenarioConfig load_config(const std::string& path);
nlohmann::json to_json(const ScenarioConfig& c);

}  // namespace roughbie
