#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "roughbie/solver.hpp"

namespace roughbie {

// Creates the directory (and parents) if needed.
void ensure_directory(const std::filesystem::path& dir);

// Opens `path` for writing and hands the stream to `body`; throws on I/O failure.
void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

// Nodal traces: x,y,z,tag, then re/im of nu x E and nu x H (physical scaling).
void write_densities_csv(const PanelMesh& mesh, const Densities& d, double omega_mu1,
                         std::ostream& os);

nlohmann::json report_json(const SolveReport& r);

}  // namespace roughbie
