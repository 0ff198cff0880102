#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "shdr/embedding.hpp"

namespace shdr {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Packed strict upper triangle index for i < j in an n x n matrix.
inline std::size_t packed_index(Eigen::Index n, Eigen::Index i, Eigen::Index j) {
    const auto ui = static_cast<std::size_t>(i);
    const auto un = static_cast<std::size_t>(n);
    return ui * un - ui * (ui + 1) / 2 + static_cast<std::size_t>(j - i - 1);
}

/// Symmetric pairwise distances of one embedded response, stored as the
/// packed strict upper triangle. NaN marks a pair with no jointly observed
/// coordinate.
class DistanceMatrix {
public:
    DistanceMatrix() = default;
    explicit DistanceMatrix(Eigen::Index n);

    Eigen::Index size() const { return n_; }
    double operator()(Eigen::Index i, Eigen::Index j) const;
    void set(Eigen::Index i, Eigen::Index j, double v);

    /// Elementwise population standard deviation over usable upper-triangle entries.
    double sigma() const { return sigma_; }
    bool degenerate() const { return !(sigma_ > 0.0); }
    std::size_t usable_pairs() const { return usable_; }

    std::span<const double> packed() const { return upper_; }
    std::span<double> packed() { return upper_; }

    /// Recomputes sigma and the usable-pair count from the stored entries.
    void finalize();

private:
    Eigen::Index n_ = 0;
    std::vector<double> upper_;
    double sigma_ = 0.0;
    std::size_t usable_ = 0;
};

/// Euclidean distances over jointly observed coordinates, rescaled by
/// sqrt(D / v) when only v of D coordinates are shared.
DistanceMatrix pairwise_distances(const EmbeddedSeries& e);

/// Builds a distance matrix directly from points (rows), no missing values.
DistanceMatrix pairwise_distances(const Eigen::MatrixXd& points);

enum class Sparsity { Dense, Knn };

/// Consensus adjacency over embedded timepoints. Dense graphs keep the full
/// matrix; k-NN graphs keep a symmetric sparse matrix. The diagonal is 1.
class ConsensusGraph {
public:
    ConsensusGraph() = default;
    static ConsensusGraph dense(Eigen::MatrixXd weights, double p);
    static ConsensusGraph sparse(Eigen::SparseMatrix<double> weights, double p, int k);

    Eigen::Index size() const { return n_; }
    Sparsity sparsity() const { return sparsity_; }
    bool is_dense() const { return sparsity_ == Sparsity::Dense; }
    double p() const { return p_; }
    int k() const { return k_; }

    const Eigen::MatrixXd& dense_weights() const { return dense_; }
    const Eigen::SparseMatrix<double>& sparse_weights() const { return sparse_; }

    double weight(Eigen::Index i, Eigen::Index j) const;
    Eigen::VectorXd degrees() const;
    Eigen::VectorXd multiply(const Eigen::VectorXd& x) const;
    std::size_t edge_count() const;  // off-diagonal, positive weight, i < j

    /// Visits every off-diagonal edge once (i < j) with positive weight.
    template <typename F>
    void for_each_edge(F&& f) const {
        if (is_dense()) {
            for (Eigen::Index j = 0; j < n_; ++j)
                for (Eigen::Index i = 0; i < j; ++i)
                    if (dense_(i, j) > 0.0) f(i, j, dense_(i, j));
        } else {
            for (Eigen::Index j = 0; j < sparse_.outerSize(); ++j)
                for (Eigen::SparseMatrix<double>::InnerIterator it(sparse_, j); it; ++it)
                    if (it.row() < j && it.value() > 0.0) f(it.row(), j, it.value());
        }
    }

private:
    Eigen::Index n_ = 0;
    Sparsity sparsity_ = Sparsity::Dense;
    double p_ = 1.0;
    int k_ = 0;
    Eigen::MatrixXd dense_;
    Eigen::SparseMatrix<double> sparse_;
};

/// Streams distance matrices into the consensus
///   A_ij = ((1/N) sum_k exp(-p d_ij^(k) / sigma^(k)))^(1/p),
/// with p = infinity giving exp(-min_k d_ij^(k) / sigma^(k)). Only one
/// distance matrix needs to be alive at a time. Sums are compensated, so the
/// result does not depend on the order matrices are added.
class ConsensusBuilder {
public:
    ConsensusBuilder(Eigen::Index n, double p);

    void add(const DistanceMatrix& d);
    ConsensusGraph finish() const;
    std::size_t count() const { return added_; }
    Eigen::Index size() const { return n_; }

private:
    Eigen::Index n_;
    double p_;
    std::size_t added_ = 0;
    std::vector<double> sum_;
    std::vector<double> comp_;
    std::vector<double> min_scaled_;
    std::vector<std::uint32_t> used_;
};

ConsensusGraph consensus(std::span<const DistanceMatrix> mats, double p);

/// Keeps each row's k largest off-diagonal weights (ties to the smaller
/// column), then symmetrizes by maximum. The diagonal is kept.
ConsensusGraph sparsify_knn(const ConsensusGraph& g, int k);

/// Default neighbour count ceil(4 ln T_e).
int default_knn(Eigen::Index n);

/// Unweighted undirected graph as an edge list plus node count.
struct BinaryGraph {
    Eigen::Index nodes = 0;
    std::vector<std::pair<Eigen::Index, Eigen::Index>> edges;  // i < j
};

/// Exact-mode thresholding: keep edge iff -ln A_ij <= eps. Requires p = infinity.
BinaryGraph binarize(const ConsensusGraph& g, double eps);

/// Edges with weight >= threshold (threshold <= 0 keeps every stored edge).
BinaryGraph threshold_graph(const ConsensusGraph& g, double threshold);

/// Text triplets "i j w", one undirected edge per line (i < j), 0-based,
/// preceded by a "# nodes <n>" comment line.
void write_triplets(const ConsensusGraph& g, const std::filesystem::path& path);
ConsensusGraph read_triplets(const std::filesystem::path& path);

}  // namespace shdr
