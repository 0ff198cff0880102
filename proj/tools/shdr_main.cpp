#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "shdr/error.hpp"
#include "shdr/pipeline.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Reconstruct a hidden driving signal from an ensemble of response time series."};
    app.set_version_flag("--version", shdr::kVersion);
    app.require_subcommand(1);
    app.fallthrough();

    shdr::cli::GlobalOptions global;
    app.add_option("--seed", global.seed, "Master random seed");
    app.add_option("--threads", global.threads, "Worker threads (fallback: SHDR_THREADS, then all cores)")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--out-dir", global.out_dir, "Output directory");

    shdr::cli::add_reconstruct(app, global);
    shdr::cli::add_simulate(app, global);
    shdr::cli::add_benchmark(app, global);
    shdr::cli::add_diagnose(app, global);
    shdr::cli::add_upo(app, global);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const shdr::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return shdr::is_input_error(e.code()) ? 2 : 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
