#include "shdr/recurrence.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "shdr/error.hpp"

namespace shdr {

DistanceMatrix::DistanceMatrix(Eigen::Index n)
    : n_(n), upper_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n > 0 ? n - 1 : 0) / 2, 0.0) {}

double DistanceMatrix::operator()(Eigen::Index i, Eigen::Index j) const {
    if (i == j) return 0.0;
    if (i > j) std::swap(i, j);
    return upper_[packed_index(n_, i, j)];
}

void DistanceMatrix::set(Eigen::Index i, Eigen::Index j, double v) {
    if (i == j) return;
    if (i > j) std::swap(i, j);
    upper_[packed_index(n_, i, j)] = v;
}

void DistanceMatrix::finalize() {
    // Two-pass population variance over usable entries.
    double sum = 0.0;
    usable_ = 0;
    for (double v : upper_)
        if (!std::isnan(v)) { sum += v; ++usable_; }
    if (usable_ == 0) { sigma_ = 0.0; return; }
    const double mean = sum / static_cast<double>(usable_);
    double ss = 0.0;
    for (double v : upper_)
        if (!std::isnan(v)) ss += (v - mean) * (v - mean);
    sigma_ = std::sqrt(ss / static_cast<double>(usable_));
}

DistanceMatrix pairwise_distances(const Eigen::MatrixXd& points) {
    const Eigen::Index n = points.rows();
    if (n < 2) throw Error(ErrorCode::ShortSeries, "need at least 2 embedded rows");
    DistanceMatrix d(n);
    // Row-major copy keeps the inner loop contiguous.
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows = points;
    const Eigen::Index dim = rows.cols();
    auto packed = d.packed();
    std::size_t idx = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double* a = rows.data() + i * dim;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double* b = rows.data() + j * dim;
            double s = 0.0;
            for (Eigen::Index c = 0; c < dim; ++c) {
                const double diff = a[c] - b[c];
                s += diff * diff;
            }
            packed[idx++] = std::sqrt(s);
        }
    }
    d.finalize();
    return d;
}

DistanceMatrix pairwise_distances(const EmbeddedSeries& e) {
    if (!e.has_missing()) {
        DistanceMatrix d = pairwise_distances(e.points);
        if (d.usable_pairs() == 0) throw Error(ErrorCode::NoUsablePairs, "no usable pairs");
        return d;
    }
    const Eigen::Index n = e.rows();
    if (n < 2) throw Error(ErrorCode::ShortSeries, "need at least 2 embedded rows");
    const Eigen::Index dim = e.dim();
    DistanceMatrix d(n);
    auto packed = d.packed();
    std::size_t idx = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            double s = 0.0;
            Eigen::Index shared = 0;
            for (Eigen::Index c = 0; c < dim; ++c) {
                if (e.missing_mask(i, c) || e.missing_mask(j, c)) continue;
                const double diff = e.points(i, c) - e.points(j, c);
                s += diff * diff;
                ++shared;
            }
            packed[idx++] = shared == 0 ? std::numeric_limits<double>::quiet_NaN()
                                        : std::sqrt(s * static_cast<double>(dim) / static_cast<double>(shared));
        }
    }
    d.finalize();
    if (d.usable_pairs() == 0) throw Error(ErrorCode::NoUsablePairs, "every pair lacks shared coordinates");
    return d;
}

ConsensusGraph ConsensusGraph::dense(Eigen::MatrixXd weights, double p) {
    ConsensusGraph g;
    g.n_ = weights.rows();
    g.sparsity_ = Sparsity::Dense;
    g.p_ = p;
    g.dense_ = std::move(weights);
    return g;
}

ConsensusGraph ConsensusGraph::sparse(Eigen::SparseMatrix<double> weights, double p, int k) {
    ConsensusGraph g;
    g.n_ = weights.rows();
    g.sparsity_ = Sparsity::Knn;
    g.p_ = p;
    g.k_ = k;
    g.sparse_ = std::move(weights);
    g.sparse_.makeCompressed();
    return g;
}

double ConsensusGraph::weight(Eigen::Index i, Eigen::Index j) const {
    return is_dense() ? dense_(i, j) : sparse_.coeff(i, j);
}

Eigen::VectorXd ConsensusGraph::degrees() const {
    if (is_dense()) return dense_.rowwise().sum();
    Eigen::VectorXd deg = Eigen::VectorXd::Zero(n_);
    for (Eigen::Index j = 0; j < sparse_.outerSize(); ++j)
        for (Eigen::SparseMatrix<double>::InnerIterator it(sparse_, j); it; ++it) deg(it.row()) += it.value();
    return deg;
}

Eigen::VectorXd ConsensusGraph::multiply(const Eigen::VectorXd& x) const {
    if (is_dense()) return dense_ * x;
    return sparse_ * x;
}

std::size_t ConsensusGraph::edge_count() const {
    std::size_t count = 0;
    for_each_edge([&](Eigen::Index, Eigen::Index, double) { ++count; });
    return count;
}

ConsensusBuilder::ConsensusBuilder(Eigen::Index n, double p) : n_(n), p_(p) {
    if (n < 1) throw Error(ErrorCode::ArgumentRange, "consensus needs at least one node");
    if (!(p >= 1.0)) throw Error(ErrorCode::ArgumentRange, "p must be >= 1 or infinity");
    const std::size_t m = static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2;
    used_.assign(m, 0);
    if (std::isinf(p_)) {
        min_scaled_.assign(m, kInfinity);
    } else {
        sum_.assign(m, 0.0);
        comp_.assign(m, 0.0);
        // Large p can underflow every term; the minimum gives the limiting value.
        if (p_ > 1.0) min_scaled_.assign(m, kInfinity);
    }
}

void ConsensusBuilder::add(const DistanceMatrix& d) {
    if (d.size() != n_)
        throw Error(ErrorCode::ShapeMismatch, "distance matrix size " + std::to_string(d.size()) +
                                                  " != consensus size " + std::to_string(n_));
    if (d.degenerate())
        throw Error(ErrorCode::DegenerateGeometry, "distance matrix has zero spread (sigma = 0)");
    const double inv_sigma = 1.0 / d.sigma();
    const auto packed = d.packed();
    const std::size_t m = packed.size();
    const bool track_min = !min_scaled_.empty();
    const bool exact = std::isinf(p_);
    for (std::size_t idx = 0; idx < m; ++idx) {
        const double dist = packed[idx];
        if (std::isnan(dist)) continue;
        const double x = dist * inv_sigma;
        ++used_[idx];
        if (track_min && x < min_scaled_[idx]) min_scaled_[idx] = x;
        if (exact) continue;
        // Neumaier compensated summation.
        const double term = std::exp(-p_ * x);
        const double s = sum_[idx];
        const double t = s + term;
        if (std::abs(s) >= std::abs(term))
            comp_[idx] += (s - t) + term;
        else
            comp_[idx] += (term - t) + s;
        sum_[idx] = t;
    }
    ++added_;
}

ConsensusGraph ConsensusBuilder::finish() const {
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n_, n_);
    const bool exact = std::isinf(p_);
    std::size_t idx = 0;
    for (Eigen::Index i = 0; i < n_; ++i) {
        for (Eigen::Index j = i + 1; j < n_; ++j, ++idx) {
            double w = 0.0;
            const std::uint32_t used = used_[idx];
            if (used > 0) {
                if (exact) {
                    w = std::exp(-min_scaled_[idx]);
                } else {
                    const double mean = (sum_[idx] + comp_[idx]) / static_cast<double>(used);
                    if (mean >= std::numeric_limits<double>::min())
                        w = p_ == 1.0 ? mean : std::exp(std::log(mean) / p_);
                    else
                        w = std::exp(-min_scaled_[idx] - std::log(static_cast<double>(used)) / p_);
                }
            }
            a(i, j) = w;
            a(j, i) = w;
        }
    }
    return ConsensusGraph::dense(std::move(a), p_);
}

ConsensusGraph consensus(std::span<const DistanceMatrix> mats, double p) {
    if (mats.empty()) throw Error(ErrorCode::EmptyInput, "no distance matrices");
    ConsensusBuilder builder(mats.front().size(), p);
    for (const auto& d : mats) builder.add(d);
    return builder.finish();
}

int default_knn(Eigen::Index n) {
    return static_cast<int>(std::ceil(4.0 * std::log(static_cast<double>(std::max<Eigen::Index>(n, 2)))));
}

ConsensusGraph sparsify_knn(const ConsensusGraph& g, int k) {
    const Eigen::Index n = g.size();
    if (k < 1 || k >= n)
        throw Error(ErrorCode::ArgumentRange,
                    "knn k = " + std::to_string(k) + " must satisfy 1 <= k < " + std::to_string(n));

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(2 * k + 1));
    std::vector<std::pair<double, Eigen::Index>> row;
    row.reserve(static_cast<std::size_t>(n));
    auto better = [](const auto& a, const auto& b) {
        return a.first > b.first || (a.first == b.first && a.second < b.second);
    };

    for (Eigen::Index i = 0; i < n; ++i) {
        row.clear();
        if (g.is_dense()) {
            for (Eigen::Index j = 0; j < n; ++j)
                if (j != i) row.emplace_back(g.dense_weights()(j, i), j);
        } else {
            // Symmetric storage: column i lists row i's neighbours.
            for (Eigen::SparseMatrix<double>::InnerIterator it(g.sparse_weights(), i); it; ++it)
                if (it.row() != i) row.emplace_back(it.value(), it.row());
        }
        const std::size_t keep = std::min<std::size_t>(static_cast<std::size_t>(k), row.size());
        std::partial_sort(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(keep), row.end(), better);
        for (std::size_t r = 0; r < keep; ++r) {
            if (!(row[r].first > 0.0)) break;
            triplets.emplace_back(i, row[r].second, row[r].first);
            triplets.emplace_back(row[r].second, i, row[r].first);
        }
        triplets.emplace_back(i, i, g.weight(i, i));
    }
    Eigen::SparseMatrix<double> w(n, n);
    w.setFromTriplets(triplets.begin(), triplets.end(), [](double a, double b) { return std::max(a, b); });
    return ConsensusGraph::sparse(std::move(w), g.p(), k);
}

BinaryGraph binarize(const ConsensusGraph& g, double eps) {
    if (!std::isinf(g.p()))
        throw Error(ErrorCode::ArgumentRange, "binarize requires an exact-mode (p = inf) consensus");
    if (!(eps > 0.0)) throw Error(ErrorCode::ArgumentRange, "eps must be > 0");
    return threshold_graph(g, std::exp(-eps));
}

BinaryGraph threshold_graph(const ConsensusGraph& g, double threshold) {
    BinaryGraph b;
    b.nodes = g.size();
    g.for_each_edge([&](Eigen::Index i, Eigen::Index j, double w) {
        if (w >= threshold) b.edges.emplace_back(i, j);
    });
    return b;
}

void write_triplets(const ConsensusGraph& g, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out << "# nodes " << g.size() << '\n' << std::setprecision(17);
    g.for_each_edge([&](Eigen::Index i, Eigen::Index j, double w) { out << i << ' ' << j << ' ' << w << '\n'; });
}

ConsensusGraph read_triplets(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    std::string line;
    Eigen::Index n = -1;
    std::vector<Eigen::Triplet<double>> triplets;
    Eigen::Index max_index = -1;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ss(line);
        if (line[0] == '#') {
            std::string hash, key;
            Eigen::Index value = 0;
            if (ss >> hash >> key >> value && key == "nodes") n = value;
            continue;
        }
        Eigen::Index i = 0, j = 0;
        double w = 0.0;
        if (!(ss >> i >> j >> w) || i < 0 || j < 0)
            throw Error(ErrorCode::ParseError, "bad triplet at line " + std::to_string(lineno));
        triplets.emplace_back(i, j, w);
        triplets.emplace_back(j, i, w);
        max_index = std::max({max_index, i, j});
    }
    if (n < 0) n = max_index + 1;
    if (n < 1) throw Error(ErrorCode::EmptyInput, "graph file has no nodes");
    for (Eigen::Index i = 0; i < n; ++i) triplets.emplace_back(i, i, 1.0);
    Eigen::SparseMatrix<double> w(n, n);
    w.setFromTriplets(triplets.begin(), triplets.end(), [](double a, double b) { return std::max(a, b); });
    return ConsensusGraph::sparse(std::move(w), 1.0, 0);
}

}  // namespace shdr
