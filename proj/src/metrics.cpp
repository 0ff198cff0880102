#include "shdr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <utility>

#include "shdr/error.hpp"
#include "shdr/timeseries.hpp"
#include "shdr/union_find.hpp"

namespace shdr {

namespace {

std::pair<std::vector<double>, std::vector<double>> usable_pairs(std::span<const double> a,
                                                                  std::span<const double> b) {
    if (a.size() != b.size())
        throw Error(ErrorCode::ShapeMismatch,
                    "sequence lengths differ: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
    std::pair<std::vector<double>, std::vector<double>> out;
    out.first.reserve(a.size());
    out.second.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (is_missing(a[i]) || is_missing(b[i])) continue;
        out.first.push_back(a[i]);
        out.second.push_back(b[i]);
    }
    if (out.first.size() < 3) throw Error(ErrorCode::ArgumentRange, "need at least 3 paired values");
    return out;
}

double mean_of(const std::vector<double>& x) {
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double pearson_raw(const std::vector<double>& a, const std::vector<double>& b) {
    const double ma = mean_of(a);
    const double mb = mean_of(b);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (!(saa > 0.0) || !(sbb > 0.0)) throw Error(ErrorCode::ConstantSeries, "constant input has no correlation");
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

}  // namespace

double pearson(std::span<const double> a, std::span<const double> b) {
    const auto [x, y] = usable_pairs(a, b);
    return pearson_raw(x, y);
}

std::vector<double> average_ranks(std::span<const double> x) {
    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return x[i] < x[j]; });
    std::vector<double> ranks(x.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}

double spearman(std::span<const double> a, std::span<const double> b) {
    const auto [x, y] = usable_pairs(a, b);
    return pearson_raw(average_ranks(x), average_ranks(y));
}

double mse(std::span<const double> a, std::span<const double> b) {
    const auto [x, y] = usable_pairs(a, b);
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
    return s / static_cast<double>(x.size());
}

double covariance(std::span<const double> a, std::span<const double> b) {
    const auto [x, y] = usable_pairs(a, b);
    const double mx = mean_of(x);
    const double my = mean_of(y);
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - mx) * (y[i] - my);
    return s / static_cast<double>(x.size());
}

PairCounts pair_counts(std::span<const int> truth, std::span<const int> pred) {
    if (truth.size() != pred.size())
        throw Error(ErrorCode::ShapeMismatch, "label sequences differ in length");
    if (truth.size() < 2) throw Error(ErrorCode::ArgumentRange, "need at least 2 labels");
    std::map<std::pair<int, int>, long long> joint;
    std::map<int, long long> rows, cols;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        ++joint[{truth[i], pred[i]}];
        ++rows[truth[i]];
        ++cols[pred[i]];
    }
    auto choose2 = [](long long v) { return v * (v - 1) / 2; };
    long long both = 0, same_t = 0, same_p = 0;
    for (const auto& [key, v] : joint) both += choose2(v);
    for (const auto& [key, v] : rows) same_t += choose2(v);
    for (const auto& [key, v] : cols) same_p += choose2(v);
    const auto n = static_cast<long long>(truth.size());
    PairCounts c;
    c.same_both = both;
    c.same_truth = same_t - both;
    c.same_pred = same_p - both;
    c.different = choose2(n) - same_t - same_p + both;
    return c;
}

double adjusted_rand(const PairCounts& c) {
    using wide = __int128;
    const wide n11 = c.same_both, n10 = c.same_truth, n01 = c.same_pred, n00 = c.different;
    const wide num = 2 * (n00 * n11 - n01 * n10);
    const wide den = (n00 + n01) * (n01 + n11) + (n00 + n10) * (n10 + n11);
    if (den == 0) return (n01 == 0 && n10 == 0) ? 1.0 : 0.0;
    return static_cast<double>(num) / static_cast<double>(den);
}

double adjusted_rand(std::span<const int> truth, std::span<const int> pred) {
    return adjusted_rand(pair_counts(truth, pred));
}

PercolationReport percolation(const BinaryGraph& b) {
    PercolationReport r;
    UnionFind uf(static_cast<std::size_t>(b.nodes));
    for (const auto& [i, j] : b.edges) uf.unite(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    r.component_sizes = uf.component_sizes();
    r.edge_count = b.edges.size();
    r.lcc_fraction = b.nodes > 0 ? static_cast<double>(r.component_sizes.front()) / static_cast<double>(b.nodes) : 0.0;
    return r;
}

double default_percolation_threshold() { return std::exp(-1.0); }

PercolationReport percolation(const ConsensusGraph& g, double threshold) {
    PercolationReport r = percolation(threshold_graph(g, threshold));
    r.threshold_used = threshold;
    return r;
}

double beta_null(double q, int n_responses, int n_states) {
    if (!(q >= 0.0 && q <= 1.0)) throw Error(ErrorCode::ArgumentRange, "q must lie in [0, 1]");
    if (n_responses < 1) throw Error(ErrorCode::ArgumentRange, "n_responses must be >= 1");
    if (n_states < 2) throw Error(ErrorCode::ArgumentRange, "n_states must be >= 2");
    return 1.0 - std::pow(1.0 - q, n_responses);
}

std::vector<double> beta_null_curve(double q, std::span<const int> n_responses, int n_states) {
    std::vector<double> out;
    out.reserve(n_responses.size());
    for (int n : n_responses) out.push_back(beta_null(q, n, n_states));
    return out;
}

double distmat_pearson(const DistanceMatrix& a, const DistanceMatrix& b) {
    if (a.size() != b.size()) throw Error(ErrorCode::ShapeMismatch, "distance matrices differ in size");
    const auto pa = a.packed();
    const auto pb = b.packed();
    std::vector<double> x, y;
    x.reserve(pa.size());
    y.reserve(pa.size());
    for (std::size_t i = 0; i < pa.size(); ++i) {
        if (std::isnan(pa[i]) || std::isnan(pb[i])) continue;
        x.push_back(pa[i]);
        y.push_back(pb[i]);
    }
    if (x.size() < 2) throw Error(ErrorCode::ConstantSeries, "too few entries to correlate");
    return pearson_raw(x, y);
}

double distmat_pearson(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols())
        throw Error(ErrorCode::ShapeMismatch, "distance matrices must be square and equal in shape");
    std::vector<double> x, y;
    for (Eigen::Index j = 1; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < j; ++i) {
            x.push_back(a(i, j));
            y.push_back(b(i, j));
        }
    if (x.size() < 2) throw Error(ErrorCode::ConstantSeries, "too few entries to correlate");
    return pearson_raw(x, y);
}

AlignedScore aligned_spearman(std::span<const double> truth_raw, std::span<const double> recon,
                              Eigen::Index time_offset) {
    if (time_offset < 0 || static_cast<std::size_t>(time_offset) + recon.size() > truth_raw.size())
        throw Error(ErrorCode::ShapeMismatch, "reconstruction does not fit inside the truth series");
    const auto truth = align_to(truth_raw, time_offset, recon.size());
    AlignedScore s;
    s.rho = spearman(truth, recon);
    s.abs_rho = std::abs(s.rho);
    return s;
}

}  // namespace shdr
