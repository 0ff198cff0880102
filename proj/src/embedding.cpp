#include "shdr/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "shdr/error.hpp"

namespace shdr {

EmbeddedSeries embed(std::span<const double> channel, const EmbeddingParams& params,
                     Eigen::Index source_channel) {
    if (params.dim < 1 || params.tau < 1)
        throw Error(ErrorCode::ArgumentRange, "embedding dim and tau must be >= 1");
    const auto T = static_cast<Eigen::Index>(channel.size());
    if (params.offset() >= T)
        throw Error(ErrorCode::EmbeddingTooLong,
                    "(D-1)*tau = " + std::to_string(params.offset()) + " >= T = " + std::to_string(T));

    const Eigen::Index rows = params.embedded_length(T);
    EmbeddedSeries e;
    e.params = params;
    e.source_channel = source_channel;
    e.points.resize(rows, params.dim);
    e.missing_mask.resize(rows, params.dim);
    for (Eigen::Index t = 0; t < rows; ++t) {
        const Eigen::Index now = t + params.offset();
        for (int d = 0; d < params.dim; ++d) {
            const double v = channel[static_cast<std::size_t>(now - static_cast<Eigen::Index>(d) * params.tau)];
            e.points(t, d) = v;
            e.missing_mask(t, d) = is_missing(v);
        }
    }
    return e;
}

std::vector<EmbeddedSeries> embed_all(const ResponseEnsemble& ensemble, const EmbeddingParams& params) {
    std::vector<EmbeddedSeries> out;
    out.reserve(static_cast<std::size_t>(ensemble.channels()));
    for (Eigen::Index k = 0; k < ensemble.channels(); ++k)
        out.push_back(embed(ensemble.channel(k), params, k));
    return out;
}

namespace {

struct Moments {
    double mean = 0.0;
    double var = 0.0;
    std::size_t n = 0;
};

Moments observed_moments(std::span<const double> x) {
    Moments m;
    double sum = 0.0;
    for (double v : x)
        if (!is_missing(v)) { sum += v; ++m.n; }
    if (m.n == 0) return m;
    m.mean = sum / static_cast<double>(m.n);
    double ss = 0.0;
    for (double v : x)
        if (!is_missing(v)) ss += (v - m.mean) * (v - m.mean);
    m.var = ss / static_cast<double>(m.n);
    return m;
}

double autocorrelation(std::span<const double> x, const Moments& m, int lag) {
    double acc = 0.0;
    std::size_t pairs = 0;
    for (std::size_t t = 0; t + static_cast<std::size_t>(lag) < x.size(); ++t) {
        const double a = x[t];
        const double b = x[t + static_cast<std::size_t>(lag)];
        if (is_missing(a) || is_missing(b)) continue;
        acc += (a - m.mean) * (b - m.mean);
        ++pairs;
    }
    if (pairs == 0) return 0.0;
    return acc / (static_cast<double>(pairs) * m.var);
}

}  // namespace

int choose_tau(std::span<const double> channel, int max_lag) {
    if (max_lag < 1) throw Error(ErrorCode::ArgumentRange, "max_lag must be >= 1");
    const Moments m = observed_moments(channel);
    if (m.n < static_cast<std::size_t>(max_lag) + 2)
        throw Error(ErrorCode::ArgumentRange, "channel has fewer than max_lag + 2 observed values");
    if (!(m.var > 0.0)) return 1;

    const double inv_e = std::exp(-1.0);
    std::vector<double> acf(static_cast<std::size_t>(max_lag) + 2, 0.0);
    acf[0] = 1.0;
    const int last = std::min<int>(max_lag + 1, static_cast<int>(channel.size()) - 1);
    for (int lag = 1; lag <= last; ++lag) acf[static_cast<std::size_t>(lag)] = autocorrelation(channel, m, lag);

    int first_cross = 0;
    int first_min = 0;
    for (int lag = 1; lag <= max_lag; ++lag) {
        const double c = acf[static_cast<std::size_t>(lag)];
        if (!first_cross && c < inv_e) first_cross = lag;
        if (!first_min && lag + 1 <= last && c < acf[static_cast<std::size_t>(lag) - 1] &&
            c <= acf[static_cast<std::size_t>(lag) + 1])
            first_min = lag;
        if (first_cross && first_min) break;
    }
    if (first_cross && first_min) return std::min(first_cross, first_min);
    if (first_cross) return first_cross;
    if (first_min) return first_min;
    return max_lag;
}

double false_neighbor_fraction(std::span<const double> channel, int tau, int dim, double rtol,
                               int max_queries) {
    const auto T = static_cast<Eigen::Index>(channel.size());
    // Rows [x_t, x_{t-tau}, ...] are extended by the next sample x_{t+tau}.
    const Eigen::Index start = static_cast<Eigen::Index>(dim - 1) * tau;
    const Eigen::Index stop = T - tau;
    if (start >= stop) return 0.0;

    std::vector<Eigen::Index> valid;
    for (Eigen::Index t = start; t < stop; ++t) {
        bool ok = !is_missing(channel[static_cast<std::size_t>(t + tau)]);
        for (int d = 0; d < dim && ok; ++d)
            ok = !is_missing(channel[static_cast<std::size_t>(t - static_cast<Eigen::Index>(d) * tau)]);
        if (ok) valid.push_back(t);
    }
    if (valid.size() < 2) return 0.0;

    auto coord = [&](Eigen::Index t, int d) {
        return channel[static_cast<std::size_t>(t - static_cast<Eigen::Index>(d) * tau)];
    };

    const std::size_t n = valid.size();
    const std::size_t queries = std::min<std::size_t>(n, static_cast<std::size_t>(max_queries));
    const Eigen::Index theiler = tau;
    std::size_t tested = 0;
    std::size_t false_count = 0;
    for (std::size_t q = 0; q < queries; ++q) {
        const Eigen::Index i = valid[q * n / queries];
        double best = std::numeric_limits<double>::infinity();
        Eigen::Index best_j = -1;
        for (Eigen::Index j : valid) {
            if (std::abs(j - i) < std::max<Eigen::Index>(theiler, 1)) continue;
            double d2 = 0.0;
            for (int d = 0; d < dim && d2 < best; ++d) {
                const double diff = coord(i, d) - coord(j, d);
                d2 += diff * diff;
            }
            if (d2 < best) { best = d2; best_j = j; }
        }
        if (best_j < 0) continue;
        ++tested;
        const double extra = std::abs(channel[static_cast<std::size_t>(i + tau)] -
                                      channel[static_cast<std::size_t>(best_j + tau)]);
        const double r = std::sqrt(best);
        if (r == 0.0 ? extra > 0.0 : extra / r > rtol) ++false_count;
    }
    return tested ? static_cast<double>(false_count) / static_cast<double>(tested) : 0.0;
}

int choose_dim(std::span<const double> channel, int tau, int max_dim, double rtol) {
    if (max_dim < 1 || tau < 1) throw Error(ErrorCode::ArgumentRange, "max_dim and tau must be >= 1");
    if (static_cast<Eigen::Index>(channel.size()) - static_cast<Eigen::Index>(max_dim - 1) * tau < 10)
        throw Error(ErrorCode::EmbeddingTooLong, "fewer than 10 embedded rows at max_dim");
    const Moments m = observed_moments(channel);
    if (!(m.var > 0.0)) return 1;
    for (int dim = 1; dim < max_dim; ++dim)
        if (false_neighbor_fraction(channel, tau, dim, rtol) < 0.05) return dim;
    return max_dim;
}

namespace {

int lower_median(std::vector<int> v) {
    std::sort(v.begin(), v.end());
    return v[(v.size() - 1) / 2];
}

}  // namespace

EmbeddingChoice choose_embedding(const ResponseEnsemble& ensemble, int max_lag, int max_dim,
                                 double rtol, int fixed_tau, int fixed_dim) {
    EmbeddingChoice choice;
    const Eigen::Index T = ensemble.length();
    if (fixed_tau > 0) {
        choice.params.tau = fixed_tau;
    } else {
        const int lag_cap = static_cast<int>(std::min<Eigen::Index>(max_lag, T / 2));
        for (Eigen::Index k = 0; k < ensemble.channels(); ++k)
            choice.per_channel_tau.push_back(choose_tau(ensemble.channel(k), std::max(1, lag_cap)));
        choice.params.tau = lower_median(choice.per_channel_tau);
    }
    if (fixed_dim > 0) {
        choice.params.dim = fixed_dim;
    } else {
        // Shrink the search so at least 10 rows survive at the largest dimension.
        int dim_cap = max_dim;
        while (dim_cap > 1 && T - static_cast<Eigen::Index>(dim_cap - 1) * choice.params.tau < 10) --dim_cap;
        for (Eigen::Index k = 0; k < ensemble.channels(); ++k)
            choice.per_channel_dim.push_back(choose_dim(ensemble.channel(k), choice.params.tau, dim_cap, rtol));
        choice.params.dim = lower_median(choice.per_channel_dim);
    }
    if (choice.params.offset() >= T)
        throw Error(ErrorCode::EmbeddingTooLong, "(D-1)*tau exceeds series length");
    return choice;
}

}  // namespace shdr
