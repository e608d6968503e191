#pragma once

#include <filesystem>

#include "roughbie/config.hpp"

namespace roughbie::cli {

// Built-in oracle suites; returns true when every suite passes. Writes
// selftest.json into `out`.
bool run_selftest(const ScenarioConfig& cfg, const std::filesystem::path& out, bool verbose);

}  // namespace roughbie::cli
