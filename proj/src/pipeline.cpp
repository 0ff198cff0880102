#include "shdr/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "shdr/community.hpp"
#include "shdr/error.hpp"
#include "shdr/parallel.hpp"

namespace shdr {

std::string to_string(ReconstructionMode m) {
    switch (m) {
        case ReconstructionMode::Continuous: return "continuous";
        case ReconstructionMode::Discrete: return "discrete";
        case ReconstructionMode::Exact: return "exact";
    }
    return "continuous";
}

std::string to_string(GraphKind g) {
    switch (g) {
        case GraphKind::Auto: return "auto";
        case GraphKind::Dense: return "dense";
        case GraphKind::Knn: return "knn";
    }
    return "auto";
}

std::string to_string(CommunityMethod c) {
    return c == CommunityMethod::Modularity ? "modularity" : "components";
}

ReconstructionMode reconstruction_mode_from_string(const std::string& s) {
    if (s == "continuous") return ReconstructionMode::Continuous;
    if (s == "discrete") return ReconstructionMode::Discrete;
    if (s == "exact") return ReconstructionMode::Exact;
    throw Error(ErrorCode::ArgumentRange, "unknown mode '" + s + "'");
}

GraphKind graph_kind_from_string(const std::string& s) {
    if (s == "auto") return GraphKind::Auto;
    if (s == "dense") return GraphKind::Dense;
    if (s == "knn") return GraphKind::Knn;
    throw Error(ErrorCode::ArgumentRange, "unknown graph kind '" + s + "'");
}

CommunityMethod community_method_from_string(const std::string& s) {
    if (s == "modularity") return CommunityMethod::Modularity;
    if (s == "components") return CommunityMethod::Components;
    throw Error(ErrorCode::ArgumentRange, "unknown community method '" + s + "'");
}

nlohmann::json PipelineOptions::to_json() const {
    return {
        {"dim", dim},
        {"tau", tau},
        {"max_dim", max_dim},
        {"max_lag", max_lag},
        {"fnn_rtol", fnn_rtol},
        {"p", std::isinf(p) ? nlohmann::json("inf") : nlohmann::json(p)},
        {"mode", to_string(mode)},
        {"n_modes", n_modes},
        {"tol", tol},
        {"max_iter", max_iter},
        {"seed", seed},
        {"community", to_string(community)},
        {"graph", to_string(graph)},
        {"k", k},
        {"eps", eps},
        {"zscore", standardize},
        {"dense_limit", dense_limit},
    };
}

namespace {

template <typename F>
auto stage(const char* name, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const StageError&) {
        throw;
    } catch (const Error& e) {
        throw StageError(name, e);
    }
}

bool has_spread(std::span<const double> x) {
    bool seen = false;
    double first = 0.0;
    for (double v : x) {
        if (is_missing(v)) continue;
        if (!seen) {
            first = v;
            seen = true;
        } else if (v != first) {
            return true;
        }
    }
    return false;
}

ResponseEnsemble select_channels(const ResponseEnsemble& e, const std::vector<Eigen::Index>& keep) {
    Eigen::MatrixXd m(e.length(), static_cast<Eigen::Index>(keep.size()));
    std::vector<std::string> labels;
    for (std::size_t c = 0; c < keep.size(); ++c) {
        m.col(static_cast<Eigen::Index>(c)) = e.values().col(keep[c]);
        if (!e.labels().empty()) labels.push_back(e.labels()[static_cast<std::size_t>(keep[c])]);
    }
    return ResponseEnsemble(std::move(m), std::move(labels), e.sample_period());
}

}  // namespace

ConsensusGraph build_consensus(const ResponseEnsemble& ensemble, const EmbeddingParams& params, double p,
                               int threads) {
    const Eigen::Index te = params.embedded_length(ensemble.length());
    ConsensusBuilder builder(te, p);
    const auto n = static_cast<std::size_t>(ensemble.channels());
    const auto batch = static_cast<std::size_t>(std::max(1, threads));
    // Distances for a batch are computed in parallel, then folded in channel order.
    for (std::size_t first = 0; first < n; first += batch) {
        const std::size_t count = std::min(batch, n - first);
        std::vector<DistanceMatrix> mats(count);
        parallel_for(count, threads, [&](std::size_t i) {
            const auto ch = static_cast<Eigen::Index>(first + i);
            mats[i] = pairwise_distances(embed(ensemble.channel(ch), params, ch));
        });
        for (const auto& d : mats) builder.add(d);
    }
    return builder.finish();
}

PipelineResult reconstruct(const ResponseEnsemble& input, const PipelineOptions& options) {
    PipelineResult result;
    const int threads = resolve_threads(options.threads);
    const bool exact = options.mode == ReconstructionMode::Exact;
    const double p = exact ? kInfinity : options.p;

    ResponseEnsemble data = stage("zscore", [&] {
        ResponseEnsemble z = options.standardize ? zscore(input) : input;
        std::vector<Eigen::Index> keep;
        for (Eigen::Index k = 0; k < z.channels(); ++k) {
            if (has_spread(z.channel(k)))
                keep.push_back(k);
            else
                result.dropped_channels.push_back(k);
        }
        if (keep.empty()) throw Error(ErrorCode::DegenerateChannel, "every channel is constant");
        if (!result.dropped_channels.empty()) {
            result.warnings.push_back(std::to_string(result.dropped_channels.size()) +
                                      " constant channel(s) left out of the consensus");
            z = select_channels(z, keep);
        }
        return z;
    });

    result.embedding = stage("embed", [&] {
        return choose_embedding(data, options.max_lag, options.max_dim, options.fnn_rtol, options.tau, options.dim);
    });
    const EmbeddingParams params = result.embedding.params;
    const Eigen::Index te = params.embedded_length(data.length());
    if (te < 2) throw StageError("embed", Error(ErrorCode::EmbeddingTooLong, "fewer than 2 embedded points"));

    ConsensusGraph graph = stage("consensus", [&] { return build_consensus(data, params, p, threads); });

    GraphKind kind = options.graph;
    if (kind == GraphKind::Auto) {
        if (exact)
            kind = GraphKind::Dense;
        else if (options.mode == ReconstructionMode::Discrete)
            kind = GraphKind::Knn;
        else
            kind = te <= options.dense_limit ? GraphKind::Dense : GraphKind::Knn;
    }
    int k_used = 0;
    if (kind == GraphKind::Knn) {
        k_used = options.k > 0 ? options.k : default_knn(te);
        k_used = static_cast<int>(std::min<Eigen::Index>(k_used, te - 1));
        graph = stage("sparsify", [&] { return sparsify_knn(graph, k_used); });
    }

    switch (options.mode) {
        case ReconstructionMode::Continuous: {
            auto cont = stage("spectral", [&] {
                return continuous_driver(graph, options.n_modes, options.tol, options.max_iter, options.seed);
            });
            if (cont.spectrum.degenerate)
                result.warnings.push_back("degenerate spectral gap among the returned modes");
            result.signal = std::move(cont.signal);
            result.spectrum = std::move(cont.spectrum);
            break;
        }
        case ReconstructionMode::Discrete: {
            result.signal = stage("community", [&] {
                if (options.community == CommunityMethod::Components) {
                    result.binary = threshold_graph(graph, std::exp(-options.eps));
                    return exact_labels(*result.binary);
                }
                return discrete_driver(graph, options.seed);
            });
            break;
        }
        case ReconstructionMode::Exact: {
            result.signal = stage("exact", [&] {
                result.binary = binarize(graph, options.eps);
                return exact_labels(*result.binary);
            });
            break;
        }
    }
    result.signal.time_offset = params.offset();
    result.graph = std::move(graph);

    result.parameters = options.to_json();
    result.parameters["p"] = std::isinf(p) ? nlohmann::json("inf") : nlohmann::json(p);
    result.parameters["dim"] = params.dim;
    result.parameters["tau"] = params.tau;
    result.parameters["graph"] = to_string(kind);
    result.parameters["k"] = k_used;
    result.parameters["embedded_length"] = te;
    result.parameters["channels_used"] = data.channels();
    result.parameters["dropped_channels"] = result.dropped_channels;
    if (result.spectrum) {
        const auto& ev = result.spectrum->eigenvalues;
        result.parameters["eigenvalues"] = std::vector<double>(ev.data(), ev.data() + ev.size());
        result.parameters["degenerate"] = result.spectrum->degenerate;
    }
    return result;
}

DriverSignal baseline_pca(const ResponseEnsemble& ensemble) {
    if (ensemble.channels() < 2) throw Error(ErrorCode::ArgumentRange, "PCA baseline needs at least 2 channels");
    const ResponseEnsemble z = zscore(ensemble);
    Eigen::MatrixXd m = z.values();
    // z-scored channels have mean 0, so mean filling is zero filling.
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            if (is_missing(m(i, j))) m(i, j) = 0.0;
    Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU);
    Eigen::VectorXd u = svd.matrixU().col(0);
    DriverSignal s;
    s.mode = DriverMode::Continuous;
    s.values = u;
    return s;
}

DriverSignal baseline_mean(const ResponseEnsemble& ensemble, std::vector<Eigen::Index>* all_missing) {
    const ResponseEnsemble z = zscore(ensemble);
    const Eigen::Index T = z.length();
    Eigen::VectorXd out(T);
    for (Eigen::Index t = 0; t < T; ++t) {
        double s = 0.0;
        int n = 0;
        for (Eigen::Index k = 0; k < z.channels(); ++k) {
            const double v = z.values()(t, k);
            if (is_missing(v)) continue;
            s += v;
            ++n;
        }
        out(t) = n ? s / n : kMissing;
        if (!n && all_missing) all_missing->push_back(t);
    }
    DriverSignal sig;
    sig.mode = DriverMode::Continuous;
    sig.values = out;
    return sig;
}

}  // namespace shdr
