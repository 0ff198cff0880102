#include "shdr/reconstruction.hpp"

#include "shdr/error.hpp"

namespace shdr {

ContinuousReconstruction continuous_driver(const ConsensusGraph& g, int n_modes, double tol, int max_iter,
                                           std::uint64_t seed) {
    SpectralOptions opts;
    opts.n_modes = n_modes;
    opts.tol = tol;
    opts.max_iter = max_iter;
    opts.seed = seed;
    ContinuousReconstruction out;
    out.spectrum = diffusion_modes(g, opts);
    out.signal.mode = DriverMode::Continuous;
    out.signal.values = out.spectrum.vectors.rightCols(n_modes);
    return out;
}

DriverSignal discrete_driver(const ConsensusGraph& g, std::uint64_t /*seed*/) {
    if (g.size() < 1) throw Error(ErrorCode::EmptyInput, "empty graph");
    return DriverSignal::discrete(greedy_modularity(g));
}

DriverSignal exact_labels(const BinaryGraph& b) {
    if (b.nodes < 1) throw Error(ErrorCode::EmptyInput, "empty graph");
    return DriverSignal::discrete(component_labels(b));
}

}  // namespace shdr
