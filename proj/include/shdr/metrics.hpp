#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "shdr/recurrence.hpp"

namespace shdr {

// Paired-sequence statistics. Pairs where either side is MISSING are dropped;
// at least 3 usable pairs are required. Constant input throws ConstantSeries.
double pearson(std::span<const double> a, std::span<const double> b);
double spearman(std::span<const double> a, std::span<const double> b);
double mse(std::span<const double> a, std::span<const double> b);
double covariance(std::span<const double> a, std::span<const double> b);  // population

/// Average (mid) ranks, 1-based.
std::vector<double> average_ranks(std::span<const double> x);

/// Adjusted Rand index from pair counts. Equal lengths >= 2.
double adjusted_rand(std::span<const int> truth, std::span<const int> pred);

struct PairCounts {
    long long same_both = 0;     // same cluster in truth and prediction
    long long same_truth = 0;    // same in truth only
    long long same_pred = 0;     // same in prediction only
    long long different = 0;     // different in both
};
PairCounts pair_counts(std::span<const int> truth, std::span<const int> pred);
double adjusted_rand(const PairCounts& c);

struct PercolationReport {
    double lcc_fraction = 0.0;
    std::vector<std::size_t> component_sizes;  // descending
    std::size_t edge_count = 0;
    double threshold_used = 0.0;
};

PercolationReport percolation(const BinaryGraph& b);
/// Keeps edges with A_ij >= threshold (default one kernel bandwidth, e^-1).
PercolationReport percolation(const ConsensusGraph& g, double threshold);
double default_percolation_threshold();

/// Null accuracy 1 - (1 - q)^n for per-response discovery probability q.
double beta_null(double q, int n_responses, int n_states = 2);
std::vector<double> beta_null_curve(double q, std::span<const int> n_responses, int n_states = 2);

/// Pearson correlation over strict upper triangles.
double distmat_pearson(const DistanceMatrix& a, const DistanceMatrix& b);
double distmat_pearson(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Spearman of a continuous reconstruction against a raw-indexed truth series,
/// aligning by the reconstruction's time offset. The sign is chosen to make
/// the correlation positive, so the result is |rho| with the sign reported.
struct AlignedScore {
    double rho = 0.0;  // signed correlation of the un-flipped reconstruction
    double abs_rho = 0.0;
};
AlignedScore aligned_spearman(std::span<const double> truth_raw, std::span<const double> recon,
                              Eigen::Index time_offset);

/// Truncates a raw-indexed sequence to [offset, offset + length).
template <typename T>
std::vector<T> align_to(std::span<const T> raw, Eigen::Index offset, std::size_t length) {
    const auto begin = raw.begin() + offset;
    return std::vector<T>(begin, begin + static_cast<std::ptrdiff_t>(length));
}

}  // namespace shdr
