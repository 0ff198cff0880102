#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "shdr/pipeline.hpp"
#include "shdr/skew_systems.hpp"

namespace shdr {

enum class SweepParameter { Noise, Coupling, NResponses };

std::string to_string(SweepParameter p);
SweepParameter sweep_parameter_from_string(const std::string& s);

struct SweepSpec {
    SweepParameter parameter = SweepParameter::NResponses;
    LogisticRegime regime = LogisticRegime::Period8;
    std::vector<double> grid;                 // snr, coupling, or N values
    std::vector<std::uint64_t> seeds;
    SkewSystemConfig base;                    // logistic settings for every cell
    PipelineOptions pipeline;                 // discrete mode unless overridden
    int quantile_bins = 8;                    // chaotic truth is scored on equal-population bins
    int threads = 0;

    SweepSpec();
};

/// One grid point x seed. Failed cells keep NaN scores and carry an error code.
struct SweepRow {
    double param = 0.0;
    std::uint64_t seed = 0;
    double ari = std::numeric_limits<double>::quiet_NaN();
    double lcc_fraction = std::numeric_limits<double>::quiet_NaN();
    int n_communities = 0;
    double ari_coarse2 = std::numeric_limits<double>::quiet_NaN();
    double ari_coarse4 = std::numeric_limits<double>::quiet_NaN();
    std::string error;
};

struct SweepSummary {
    double param = 0.0;
    int cells = 0;
    int failures = 0;
    double ari_median = 0.0, ari_q1 = 0.0, ari_q3 = 0.0;
    double lcc_median = 0.0, lcc_q1 = 0.0, lcc_q3 = 0.0;
    double communities_median = 0.0;
};

/// Runs one cell: simulate, reconstruct, score.
SweepRow run_sweep_cell(const SweepSpec& spec, double param, std::uint64_t seed);

/// Every grid point x seed, rows in grid-major order. Never throws for a cell failure.
std::vector<SweepRow> benchmark_sweep(const SweepSpec& spec);

std::vector<SweepSummary> summarize(const std::vector<SweepRow>& rows);

/// Linear-interpolated quantile of the finite values (NaN if none).
double quantile(std::vector<double> values, double q);

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& path);
void write_summary_csv(const std::vector<SweepSummary>& summary, const std::filesystem::path& path);

}  // namespace shdr
