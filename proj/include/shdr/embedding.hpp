#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "shdr/timeseries.hpp"

namespace shdr {

struct EmbeddingParams {
    int dim = 1;
    int tau = 1;

    /// Raw-index offset of embedded row 0.
    Eigen::Index offset() const { return static_cast<Eigen::Index>(dim - 1) * tau; }
    Eigen::Index embedded_length(Eigen::Index raw_length) const { return raw_length - offset(); }
};

/// Delay-lifted trajectory of one channel. Row t holds
/// [x(t'), x(t'-tau), ..., x(t'-(D-1)tau)] with t' = t + (D-1)tau.
/// Coordinates drawn from MISSING raw values are NaN and flagged in the mask.
struct EmbeddedSeries {
    Eigen::MatrixXd points;
    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> missing_mask;
    EmbeddingParams params;
    Eigen::Index source_channel = 0;

    Eigen::Index rows() const { return points.rows(); }
    Eigen::Index dim() const { return points.cols(); }
    bool has_missing() const { return missing_mask.any(); }
};

EmbeddedSeries embed(std::span<const double> channel, const EmbeddingParams& params,
                     Eigen::Index source_channel = 0);

std::vector<EmbeddedSeries> embed_all(const ResponseEnsemble& ensemble, const EmbeddingParams& params);

/// Delay chosen from the autocorrelation function: the earlier of its first
/// local minimum and its first drop below 1/e, else max_lag. Constant
/// channels return 1.
int choose_tau(std::span<const double> channel, int max_lag);

/// Fraction of false nearest neighbours at dimension `dim`. Each delay vector
/// is extended by the sample tau steps after its newest coordinate.
double false_neighbor_fraction(std::span<const double> channel, int tau, int dim, double rtol,
                               int max_queries = 600);

/// Smallest D <= max_dim whose false-nearest-neighbour fraction is below 5%.
int choose_dim(std::span<const double> channel, int tau, int max_dim, double rtol = 15.0);

struct EmbeddingChoice {
    EmbeddingParams params;
    std::vector<int> per_channel_tau;
    std::vector<int> per_channel_dim;
};

/// One global (D, tau): tau is the median per-channel choice, then D is the
/// median per-channel choice at that tau. Either may be pinned by the caller.
EmbeddingChoice choose_embedding(const ResponseEnsemble& ensemble, int max_lag, int max_dim,
                                 double rtol = 15.0, int fixed_tau = 0, int fixed_dim = 0);

}  // namespace shdr
