#include "shdr/manifest.hpp"

#include <fstream>

#include "shdr/error.hpp"

namespace shdr {

nlohmann::json RunManifest::to_json() const {
    return {
        {"subcommand", subcommand},
        {"parameters", parameters},
        {"inputs", inputs},
        {"outputs", outputs},
        {"seed", seed},
        {"version", version},
        {"runtime_seconds", runtime_seconds},
    };
}

RunManifest RunManifest::from_json(const nlohmann::json& j) {
    RunManifest m;
    m.subcommand = j.at("subcommand").get<std::string>();
    m.parameters = j.value("parameters", nlohmann::json::object());
    m.inputs = j.value("inputs", std::vector<std::string>{});
    m.outputs = j.value("outputs", std::vector<std::string>{});
    m.seed = j.value("seed", std::uint64_t{0});
    m.version = j.value("version", std::string{});
    m.runtime_seconds = j.value("runtime_seconds", 0.0);
    return m;
}

void write_json(const nlohmann::json& j, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out << j.dump(2) << '\n';
}

std::filesystem::path RunManifest::write(const std::filesystem::path& dir) const {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
    const auto path = dir / "manifest.json";
    write_json(to_json(), path);
    return path;
}

RunManifest RunManifest::read(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + file.string());
    try {
        return from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, file.string() + ": " + e.what());
    }
}

}  // namespace shdr
