#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace shdr {

/// Everything needed to re-run a command: resolved parameters, paths, seed,
/// version and wall-clock runtime. Each output directory holds one.
struct RunManifest {
    std::string subcommand;
    nlohmann::json parameters = nlohmann::json::object();
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    std::uint64_t seed = 0;
    std::string version;
    double runtime_seconds = 0.0;

    nlohmann::json to_json() const;
    static RunManifest from_json(const nlohmann::json& j);

    /// Writes <dir>/manifest.json, replacing any previous manifest.
    std::filesystem::path write(const std::filesystem::path& dir) const;
    static RunManifest read(const std::filesystem::path& file);
};

void write_json(const nlohmann::json& j, const std::filesystem::path& path);

}  // namespace shdr
