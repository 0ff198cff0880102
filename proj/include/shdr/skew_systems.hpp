#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "shdr/timeseries.hpp"

namespace shdr {

enum class LogisticRegime { Period2, Period4, Period8, Chaotic };

double logistic_r(LogisticRegime regime);
int logistic_period(LogisticRegime regime);  // 0 for chaotic
std::string to_string(LogisticRegime regime);
LogisticRegime logistic_regime_from_string(const std::string& s);

enum class MeasurementFilter { Identity, RandomGaussian };

/// Simulator configuration. Fields unused by a given system are ignored but
/// still echoed into the dataset metadata.
struct SkewSystemConfig {
    std::string system = "rossler-lorenz";  // rossler-lorenz | logistic | double-gyre
    int n_responses = 10;
    double coupling = 0.5;
    double snr = std::numeric_limits<double>::infinity();
    int t_points = 3000;
    double dt = 0.05;
    int substeps = 5;
    std::uint64_t seed = 0;
    int burn_in = 4000;  // discarded samples (logistic iterates or continuous samples)

    MeasurementFilter filter = MeasurementFilter::Identity;
    double filter_min_width = 2.0;
    double filter_max_width = 20.0;

    // Logistic cascade.
    LogisticRegime regime = LogisticRegime::Period2;
    double response_r_min = 3.7;
    double response_r_max = 4.0;

    // Rossler -> Lorenz.
    double rossler_a = 0.2, rossler_b = 0.2, rossler_c = 5.7;
    double lorenz_sigma = 10.0, lorenz_rho = 28.0, lorenz_beta = 8.0 / 3.0;
    double jitter = 0.2;
    double timescale_ratio = 4.0;  // response dominant frequency / driver dominant frequency
    int observe = 2;               // observed Lorenz coordinate (0 = x, 1 = y, 2 = z)

    // Double gyre.
    double gyre_A = 0.1;
    double gyre_eps = 0.25;
    double gyre_omega = 2.0 * 3.14159265358979323846 / 10.0;

    nlohmann::json to_json() const;
    /// Applies key=value overrides; unknown keys throw ArgumentRange.
    void apply(const std::map<std::string, std::string>& kv);
};

/// Reads a flat key=value file ('#' comments, blank lines ignored).
std::map<std::string, std::string> read_kv_file(const std::filesystem::path& path);

struct SkewDataset {
    DriverSignal driver_truth;        // continuous series or phase labels, raw-indexed
    ResponseEnsemble responses;
    Eigen::MatrixXd driver_state;     // full driver state per sample (continuous systems)
    std::vector<double> driver_value; // driver scalar per sample (logistic z, Rossler x, sin(wt))
    nlohmann::json config;
};

SkewDataset gen_logistic_skew(LogisticRegime regime, const SkewSystemConfig& cfg);
SkewDataset gen_rossler_lorenz(const SkewSystemConfig& cfg);
SkewDataset gen_double_gyre(const SkewSystemConfig& cfg);
SkewDataset simulate(const SkewSystemConfig& cfg);

/// rms(response) / rms(driver). Throws ConstantSeries on constant input.
double amplitude_coupling_scale(std::span<const double> driver, std::span<const double> response);

/// Zero-phase Gaussian smoothing with reflect padding, kernel truncated at 4 sigma.
std::vector<double> gaussian_smooth(std::span<const double> x, double sigma);

/// Independent RNG stream `stream` derived from a master seed.
std::mt19937_64 rng_stream(std::uint64_t master, std::uint64_t stream);

/// Quantile-bin labels (bins equally populated) for scoring continuous truth with ARI.
std::vector<int> quantile_labels(std::span<const double> x, int bins);

/// Canonical Rossler trajectory sampled every dt after a transient.
Eigen::MatrixXd rossler_trajectory(long samples, double dt, int substeps, std::uint64_t seed,
                                   double a = 0.2, double b = 0.2, double c = 5.7);

}  // namespace shdr
