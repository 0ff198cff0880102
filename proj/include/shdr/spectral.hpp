#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "shdr/recurrence.hpp"

namespace shdr {

struct SpectralOptions {
    int n_modes = 1;          // subleading modes wanted (excludes the stationary one)
    double tol = 1e-8;        // residual bound ||S u - lambda u||
    int max_iter = 500;       // restart cycles
    int krylov_dim = 0;       // 0 picks max(2 * (n_modes + 1) + 16, 24)
    std::uint64_t seed = 0;
};

/// Leading eigenpairs of S = D^{-1/2} A D^{-1/2}. Column 0 is the stationary
/// mode (eigenvalue 1). `vectors` are in random-walk coordinates v = D^{-1/2} u,
/// `sym_vectors` hold u; both are unit norm with the largest-magnitude entry
/// positive.
struct SpectralResult {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd vectors;
    Eigen::MatrixXd sym_vectors;
    Eigen::VectorXd residuals;
    double next_eigenvalue = 0.0;  // first eigenvalue beyond those returned, if computed
    bool degenerate = false;       // some gap among the returned subleading modes is below tol
    int restarts = 0;
};

/// Applies S to x given the inverse square root of the degree vector.
Eigen::VectorXd apply_normalized(const ConsensusGraph& g, const Eigen::VectorXd& inv_sqrt_degree,
                                 const Eigen::VectorXd& x);

/// Dense S, for small graphs and tests.
Eigen::MatrixXd normalized_adjacency(const ConsensusGraph& g);

/// Component sizes of the graph's positive-weight edges, largest first.
std::vector<std::size_t> graph_components(const ConsensusGraph& g);

/// Thick-restart Lanczos with full reorthogonalization on S restricted to the
/// complement of the stationary mode. Throws DisconnectedGraph if g has more
/// than one component and ConvergenceFailure if residuals stay above tol.
SpectralResult diffusion_modes(const ConsensusGraph& g, const SpectralOptions& options = {});

/// Normalizes to unit length and flips so the largest-magnitude entry is positive.
void fix_sign_and_norm(Eigen::Ref<Eigen::VectorXd> v);

}  // namespace shdr
