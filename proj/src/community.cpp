#include "shdr/community.hpp"

#include <map>
#include <set>
#include <tuple>

#include "shdr/timeseries.hpp"
#include "shdr/union_find.hpp"

namespace shdr {

std::vector<int> greedy_modularity(const ConsensusGraph& g) {
    const auto n = static_cast<std::size_t>(g.size());
    std::vector<std::map<int, double>> weights(n);  // inter-community weight
    std::vector<double> strength(n, 0.0);
    double total = 0.0;
    g.for_each_edge([&](Eigen::Index i, Eigen::Index j, double w) {
        const auto a = static_cast<int>(i);
        const auto b = static_cast<int>(j);
        weights[i][b] += w;
        weights[j][a] += w;
        strength[i] += w;
        strength[j] += w;
        total += w;
    });

    std::vector<int> owner(n);
    for (std::size_t i = 0; i < n; ++i) owner[i] = static_cast<int>(i);
    if (total <= 0.0) return relabel_by_first_occurrence(owner);

    const double two_m = 2.0 * total;
    std::vector<double> a(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = strength[i] / two_m;

    // Gain for merging communities i and j: 2 (e_ij - a_i a_j), e_ij = w_ij / 2m.
    std::vector<std::map<int, double>> dq(n);
    using Key = std::tuple<double, int, int>;  // (-gain, low, high)
    std::set<Key> heap;
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& [j, w] : weights[i]) {
            const double gain = 2.0 * (w / two_m - a[i] * a[static_cast<std::size_t>(j)]);
            dq[i][j] = gain;
            if (static_cast<int>(i) < j) heap.emplace(-gain, static_cast<int>(i), j);
        }
    }

    std::vector<std::vector<int>> members(n);
    for (std::size_t i = 0; i < n; ++i) members[i] = {static_cast<int>(i)};

    while (!heap.empty()) {
        const auto [neg_gain, lo, hi] = *heap.begin();
        if (!(-neg_gain > 0.0)) break;
        // Merge `hi` into `lo`.
        const auto L = static_cast<std::size_t>(lo);
        const auto Hc = static_cast<std::size_t>(hi);
        for (const auto& [k, gain] : dq[L]) heap.erase({-gain, std::min(lo, k), std::max(lo, k)});
        for (const auto& [k, gain] : dq[Hc]) heap.erase({-gain, std::min(hi, k), std::max(hi, k)});

        std::map<int, double> merged;
        for (const auto& [k, gain] : dq[L]) {
            if (k == hi) continue;
            auto it = dq[Hc].find(k);
            merged[k] = it != dq[Hc].end() ? gain + it->second : gain - 2.0 * a[Hc] * a[static_cast<std::size_t>(k)];
        }
        for (const auto& [k, gain] : dq[Hc]) {
            if (k == lo || merged.count(k)) continue;
            merged[k] = gain - 2.0 * a[L] * a[static_cast<std::size_t>(k)];
        }
        for (const auto& [k, gain] : dq[Hc]) {
            if (k == lo) continue;
            dq[static_cast<std::size_t>(k)].erase(hi);
        }
        for (const auto& [k, gain] : merged) {
            const auto K = static_cast<std::size_t>(k);
            dq[K][lo] = gain;
            // Entries of k against its other neighbours stay in the heap; only the pair with lo changes.
            heap.emplace(-gain, std::min(lo, k), std::max(lo, k));
        }
        dq[L] = std::move(merged);
        dq[Hc].clear();
        a[L] += a[Hc];
        a[Hc] = 0.0;
        members[L].insert(members[L].end(), members[Hc].begin(), members[Hc].end());
        members[Hc].clear();
    }

    for (std::size_t c = 0; c < n; ++c)
        for (int v : members[c]) owner[static_cast<std::size_t>(v)] = static_cast<int>(c);
    return relabel_by_first_occurrence(owner);
}

double modularity(const ConsensusGraph& g, const std::vector<int>& labels) {
    double total = 0.0;
    std::map<int, double> inside, degree;
    g.for_each_edge([&](Eigen::Index i, Eigen::Index j, double w) {
        total += w;
        const int li = labels[static_cast<std::size_t>(i)];
        const int lj = labels[static_cast<std::size_t>(j)];
        degree[li] += w;
        degree[lj] += w;
        if (li == lj) inside[li] += w;
    });
    if (total <= 0.0) return 0.0;
    double q = 0.0;
    for (const auto& [c, d] : degree) {
        const double frac = d / (2.0 * total);
        q += inside[c] / total - frac * frac;
    }
    return q;
}

std::vector<int> component_labels(const BinaryGraph& b) {
    UnionFind uf(static_cast<std::size_t>(b.nodes));
    for (const auto& [i, j] : b.edges) uf.unite(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    return uf.labels();
}

}  // namespace shdr
