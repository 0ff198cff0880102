#pragma once

#include <cstdint>

#include "shdr/community.hpp"
#include "shdr/spectral.hpp"
#include "shdr/timeseries.hpp"

namespace shdr {

struct ContinuousReconstruction {
    DriverSignal signal;      // T_e x m, subleading modes in descending eigenvalue order
    SpectralResult spectrum;  // includes the stationary mode in column 0
};

/// Subleading diffusion modes of the consensus graph as a continuous driver.
ContinuousReconstruction continuous_driver(const ConsensusGraph& g, int n_modes = 1, double tol = 1e-8,
                                           int max_iter = 500, std::uint64_t seed = 0);

/// Greedy-modularity communities as discrete driver labels. The algorithm is
/// deterministic; the seed is accepted for interface symmetry.
DriverSignal discrete_driver(const ConsensusGraph& g, std::uint64_t seed = 0);

/// Connected-component labels of a binary recurrence graph.
DriverSignal exact_labels(const BinaryGraph& b);

}  // namespace shdr
