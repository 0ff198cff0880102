#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "shdr/embedding.hpp"
#include "shdr/reconstruction.hpp"
#include "shdr/recurrence.hpp"
#include "shdr/timeseries.hpp"

namespace shdr {

inline constexpr const char* kVersion = "0.1.0";

enum class ReconstructionMode { Continuous, Discrete, Exact };
enum class GraphKind { Auto, Dense, Knn };
enum class CommunityMethod { Modularity, Components };

std::string to_string(ReconstructionMode m);
std::string to_string(GraphKind g);
std::string to_string(CommunityMethod c);
ReconstructionMode reconstruction_mode_from_string(const std::string& s);
GraphKind graph_kind_from_string(const std::string& s);
CommunityMethod community_method_from_string(const std::string& s);

struct PipelineOptions {
    int dim = 0;           // 0 = false nearest neighbours
    int tau = 0;           // 0 = autocorrelation
    int max_dim = 10;
    int max_lag = 100;
    double fnn_rtol = 15.0;
    double p = 1.0;        // exact mode always uses infinity
    ReconstructionMode mode = ReconstructionMode::Continuous;
    int n_modes = 1;
    double tol = 1e-8;
    int max_iter = 500;
    std::uint64_t seed = 0;
    CommunityMethod community = CommunityMethod::Modularity;
    GraphKind graph = GraphKind::Auto;
    int k = 0;             // 0 = ceil(4 ln T_e)
    double eps = 0.01;     // exact-mode threshold in scaled-distance units
    bool standardize = true;
    int dense_limit = 6000;  // auto graph stays dense up to this many embedded points (continuous mode)
    int threads = 0;

    nlohmann::json to_json() const;
};

struct PipelineResult {
    DriverSignal signal;
    EmbeddingChoice embedding;
    ConsensusGraph graph;                  // graph handed to the driver stage
    std::optional<BinaryGraph> binary;     // exact mode / components
    std::optional<SpectralResult> spectrum;
    std::vector<Eigen::Index> dropped_channels;  // zero-variance channels left out of the consensus
    std::vector<std::string> warnings;
    nlohmann::json parameters;             // fully resolved options
};

/// zscore -> embed -> distances -> consensus -> [sparsify] -> driver stage.
/// Failures are rethrown as StageError naming the stage.
PipelineResult reconstruct(const ResponseEnsemble& ensemble, const PipelineOptions& options);

/// Builds the consensus graph for already-standardized data with fixed embedding.
ConsensusGraph build_consensus(const ResponseEnsemble& ensemble, const EmbeddingParams& params, double p,
                               int threads = 1);

/// First left singular vector of the z-scored, mean-filled data.
DriverSignal baseline_pca(const ResponseEnsemble& ensemble);

/// Per-timepoint mean of the z-scored channels over observed entries.
/// Timepoints with every channel MISSING stay MISSING and are listed in `all_missing`.
DriverSignal baseline_mean(const ResponseEnsemble& ensemble, std::vector<Eigen::Index>* all_missing = nullptr);

}  // namespace shdr
