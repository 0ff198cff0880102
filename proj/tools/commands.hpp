#pragma once

#include <cstdint>
#include <string>

namespace CLI {
class App;
}

namespace shdr::cli {

struct GlobalOptions {
    std::uint64_t seed = 0;
    int threads = 0;
    std::string out_dir = "shdr_out";
};

// Each registers a subcommand whose callback does the work and may throw shdr::Error.
void add_reconstruct(CLI::App& app, GlobalOptions& global);
void add_simulate(CLI::App& app, GlobalOptions& global);
void add_benchmark(CLI::App& app, GlobalOptions& global);
void add_diagnose(CLI::App& app, GlobalOptions& global);
void add_upo(CLI::App& app, GlobalOptions& global);

double parse_p(const std::string& text);

}  // namespace shdr::cli
