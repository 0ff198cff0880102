#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <doctest.h>

#include "shdr/error.hpp"
#include "shdr/recurrence.hpp"
#include "test_util.hpp"

using namespace shdr;
using testutil::error_code_of;

namespace {

DistanceMatrix from_entries(Eigen::Index n, const std::vector<double>& upper) {
    DistanceMatrix d(n);
    std::size_t k = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) d.set(i, j, upper[k++]);
    d.finalize();
    return d;
}

DistanceMatrix random_distances(Eigen::Index n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 3.0);
    Eigen::MatrixXd pts(n, 3);
    for (Eigen::Index i = 0; i < n; ++i)
        for (int c = 0; c < 3; ++c) pts(i, c) = u(rng);
    return pairwise_distances(pts);
}

// Population std over the packed entries, written independently of the library.
double oracle_sigma(const DistanceMatrix& d) {
    const auto v = d.packed();
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size()));
}

}  // namespace

TEST_CASE("pairwise distances on small point sets") {
    Eigen::MatrixXd a(2, 2);
    a << 0, 0, 3, 4;
    CHECK(pairwise_distances(a)(0, 1) == doctest::Approx(5.0));
    CHECK(pairwise_distances(a)(1, 0) == doctest::Approx(5.0));
    CHECK(pairwise_distances(a)(0, 0) == 0.0);
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(2, 2);
    CHECK(pairwise_distances(b)(0, 1) == 0.0);
}

TEST_CASE("partially observed pairs are rescaled") {
    EmbeddedSeries e;
    e.points.resize(2, 2);
    e.points << 1, kMissing, 2, 7;
    e.missing_mask.resize(2, 2);
    e.missing_mask << false, true, false, false;
    e.params = {2, 1};
    const auto d = pairwise_distances(e);
    CHECK(d(0, 1) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("pairs with no shared coordinate are unusable") {
    EmbeddedSeries e;
    e.points.resize(3, 2);
    e.points << 1, kMissing, kMissing, 2, 0, 5;
    e.missing_mask = e.points.array().isNaN();
    e.params = {2, 1};
    const auto d = pairwise_distances(e);
    CHECK(std::isnan(d(0, 1)));
    CHECK(d.usable_pairs() == 2);

    EmbeddedSeries none;
    none.points.resize(2, 2);
    none.points << 1, kMissing, kMissing, 2;
    none.missing_mask = none.points.array().isNaN();
    none.params = {2, 1};
    CHECK(error_code_of([&] { pairwise_distances(none); }) == ErrorCode::NoUsablePairs);
}

TEST_CASE("distance matrix is symmetric with population sigma") {
    std::mt19937_64 rng(1);
    const auto d = random_distances(30, rng);
    for (Eigen::Index i = 0; i < 30; ++i)
        for (Eigen::Index j = 0; j < 30; ++j) CHECK(d(i, j) == d(j, i));
    CHECK(d.sigma() == doctest::Approx(oracle_sigma(d)).epsilon(1e-12));
}

TEST_CASE("consensus of a single zero distance is one") {
    const auto d = from_entries(3, {0.0, 1.0, 2.0});
    for (double p : {1.0, 2.0, kInfinity}) CHECK(consensus(std::vector{d}, p).weight(0, 1) == 1.0);
}

TEST_CASE("two responses at scaled distances 0 and ln 2") {
    // {x, y, y} has sigma = |x - y| sqrt(2) / 3, so x / sigma = ln 2 for this x.
    const double y_minus_x = 1.0;
    const double x = std::log(2.0) * std::sqrt(2.0) / 3.0 * y_minus_x;
    const auto a = from_entries(3, {0.0, 1.0, 2.0});
    const auto b = from_entries(3, {x, x + y_minus_x, x + y_minus_x});
    REQUIRE(b(0, 1) / b.sigma() == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    const std::vector mats{a, b};
    CHECK(consensus(mats, 1.0).weight(0, 1) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(consensus(mats, kInfinity).weight(0, 1) == 1.0);
}

TEST_CASE("p = 1 consensus is the mean kernel") {
    std::mt19937_64 rng(2);
    std::vector<DistanceMatrix> mats;
    for (int k = 0; k < 5; ++k) mats.push_back(random_distances(20, rng));
    const auto g = consensus(mats, 1.0);
    for (Eigen::Index i = 0; i < 20; ++i)
        for (Eigen::Index j = 0; j < 20; ++j) {
            double s = 0.0;
            for (const auto& d : mats) s += std::exp(-d(i, j) / d.sigma());
            CHECK(g.weight(i, j) == doctest::Approx(s / 5.0).epsilon(1e-12));
        }
}

TEST_CASE("consensus lies between the smallest and largest kernel") {
    std::mt19937_64 rng(3);
    std::vector<DistanceMatrix> mats;
    for (int k = 0; k < 4; ++k) mats.push_back(random_distances(15, rng));
    for (double p : {1.0, 1.5, 3.0, 10.0, 64.0, kInfinity}) {
        const auto g = consensus(mats, p);
        for (Eigen::Index i = 0; i < 15; ++i)
            for (Eigen::Index j = i + 1; j < 15; ++j) {
                double lo = 1.0;
                double hi = 0.0;
                for (const auto& d : mats) {
                    const double k = std::exp(-d(i, j) / d.sigma());
                    lo = std::min(lo, k);
                    hi = std::max(hi, k);
                }
                CHECK(g.weight(i, j) >= lo * (1 - 1e-12));
                CHECK(g.weight(i, j) <= hi * (1 + 1e-12));
                if (std::isinf(p)) CHECK(g.weight(i, j) == doctest::Approx(hi).epsilon(1e-14));
            }
    }
}

TEST_CASE("p = 64 agrees with the min rule") {
    // Two responses with similar kernels put the p-mean within 1e-3 of the max.
    const auto a = from_entries(3, {0.5, 1.0, 2.0});
    const auto b = from_entries(3, {0.5001, 1.0, 2.0});
    const std::vector mats{a, b};
    const auto g64 = consensus(mats, 64.0);
    const auto ginf = consensus(mats, kInfinity);
    for (Eigen::Index i = 0; i < 3; ++i)
        for (Eigen::Index j = 0; j < 3; ++j) CHECK(std::abs(g64.weight(i, j) - ginf.weight(i, j)) <= 1e-3);
}

TEST_CASE("raising a distance never raises the weight") {
    std::mt19937_64 rng(4);
    const auto a = random_distances(10, rng);
    const auto b = random_distances(10, rng);
    // set() without finalize() leaves sigma where it was.
    DistanceMatrix bumped = a;
    bumped.set(2, 7, a(2, 7) + 0.5);
    REQUIRE(bumped.sigma() == a.sigma());
    for (double p : {1.0, 4.0, kInfinity}) {
        const double before = consensus(std::vector{a, b}, p).weight(2, 7);
        const double after = consensus(std::vector{bumped, b}, p).weight(2, 7);
        CHECK(after <= before);
    }
}

TEST_CASE("input order does not change the consensus bits") {
    std::mt19937_64 rng(5);
    std::vector<DistanceMatrix> mats;
    for (int k = 0; k < 7; ++k) mats.push_back(random_distances(25, rng));
    const auto ref = consensus(mats, 1.0).dense_weights();
    std::vector<int> order(7);
    std::iota(order.begin(), order.end(), 0);
    for (int trial = 0; trial < 5; ++trial) {
        std::shuffle(order.begin(), order.end(), rng);
        std::vector<DistanceMatrix> perm;
        for (int o : order) perm.push_back(mats[static_cast<std::size_t>(o)]);
        CHECK((consensus(perm, 1.0).dense_weights().array() == ref.array()).all());
    }
}

TEST_CASE("consensus errors") {
    const auto a = from_entries(3, {0.0, 1.0, 2.0});
    const auto b = from_entries(4, {1, 2, 3, 4, 5, 6});
    CHECK(error_code_of([&] { consensus(std::vector{a, b}, 1.0); }) == ErrorCode::ShapeMismatch);
    CHECK(error_code_of([&] { ConsensusBuilder(3, 0.5); }) == ErrorCode::ArgumentRange);
    const auto flat = from_entries(3, {1.0, 1.0, 1.0});
    CHECK(error_code_of([&] { consensus(std::vector{flat}, 1.0); }) == ErrorCode::DegenerateGeometry);
}

TEST_CASE("unusable pairs get zero weight") {
    EmbeddedSeries e;
    e.points.resize(3, 2);
    e.points << 1, kMissing, kMissing, 2, 0, 5;
    e.missing_mask = e.points.array().isNaN();
    e.params = {2, 1};
    const auto g = consensus(std::vector{pairwise_distances(e)}, 1.0);
    CHECK(g.weight(0, 1) == 0.0);
    CHECK(g.weight(0, 2) > 0.0);
}

TEST_CASE("diagonal is one and weights lie in (0, 1]") {
    std::mt19937_64 rng(6);
    const auto g = consensus(std::vector{random_distances(12, rng), random_distances(12, rng)}, 2.0);
    for (Eigen::Index i = 0; i < 12; ++i) {
        CHECK(g.weight(i, i) == 1.0);
        for (Eigen::Index j = 0; j < 12; ++j) {
            CHECK(g.weight(i, j) > 0.0);
            CHECK(g.weight(i, j) <= 1.0);
            CHECK(g.weight(i, j) == g.weight(j, i));
        }
    }
}

TEST_CASE("knn with k = n - 1 keeps everything") {
    std::mt19937_64 rng(7);
    const auto g = consensus(std::vector{random_distances(4, rng)}, 1.0);
    const auto s = sparsify_knn(g, 3);
    for (Eigen::Index i = 0; i < 4; ++i)
        for (Eigen::Index j = 0; j < 4; ++j) CHECK(s.weight(i, j) == g.weight(i, j));
}

TEST_CASE("knn on a star restores every hub edge") {
    Eigen::MatrixXd w = Eigen::MatrixXd::Identity(4, 4);
    w(0, 1) = w(1, 0) = 0.9;
    w(0, 2) = w(2, 0) = 0.8;
    w(0, 3) = w(3, 0) = 0.7;
    w(1, 2) = w(2, 1) = 0.1;
    w(1, 3) = w(3, 1) = 0.1;
    w(2, 3) = w(3, 2) = 0.1;
    const auto s = sparsify_knn(ConsensusGraph::dense(w, 1.0), 1);
    CHECK(s.weight(0, 1) == 0.9);
    CHECK(s.weight(0, 2) == 0.8);
    CHECK(s.weight(0, 3) == 0.7);
    CHECK(s.weight(1, 2) == 0.0);
    CHECK(s.edge_count() == 3);
    CHECK(s.weight(2, 2) == 1.0);
}

TEST_CASE("knn ties go to the smaller column") {
    Eigen::MatrixXd w = Eigen::MatrixXd::Constant(4, 4, 0.5);
    w.diagonal().setOnes();
    const auto s = sparsify_knn(ConsensusGraph::dense(w, 1.0), 1);
    // Every row keeps its smallest-index neighbour: 0-1, 1-0, 2-0, 3-0.
    CHECK(s.edge_count() == 3);
    CHECK(s.weight(0, 1) == 0.5);
    CHECK(s.weight(0, 2) == 0.5);
    CHECK(s.weight(0, 3) == 0.5);
}

TEST_CASE("knn keeps at least k neighbours per row and stays symmetric") {
    std::mt19937_64 rng(8);
    const auto g = consensus(std::vector{random_distances(60, rng), random_distances(60, rng)}, 1.0);
    const int k = 5;
    const auto s = sparsify_knn(g, k);
    for (Eigen::Index i = 0; i < 60; ++i) {
        int count = 0;
        for (Eigen::Index j = 0; j < 60; ++j) {
            CHECK(s.weight(i, j) == s.weight(j, i));
            if (j != i && s.weight(i, j) > 0.0) ++count;
        }
        CHECK(count >= k);
    }
    CHECK(error_code_of([&] { sparsify_knn(g, 60); }) == ErrorCode::ArgumentRange);
    CHECK(error_code_of([&] { sparsify_knn(g, 0); }) == ErrorCode::ArgumentRange);
}

TEST_CASE("default neighbour count") {
    CHECK(default_knn(100) == 19);
    CHECK(default_knn(1000) == 28);
}

TEST_CASE("binarize threshold is inclusive") {
    Eigen::MatrixXd w = Eigen::MatrixXd::Identity(4, 4);
    w(0, 1) = w(1, 0) = 1.0;
    w(1, 2) = w(2, 1) = std::exp(-2.0);
    w(2, 3) = w(3, 2) = std::exp(-1.0);
    const auto g = ConsensusGraph::dense(w, kInfinity);
    const auto b = binarize(g, 1.0);
    CHECK(b.nodes == 4);
    const auto has = [&](Eigen::Index i, Eigen::Index j) {
        return std::find(b.edges.begin(), b.edges.end(), std::pair{i, j}) != b.edges.end();
    };
    CHECK(has(0, 1));
    CHECK_FALSE(has(1, 2));
    CHECK(has(2, 3));
    CHECK(error_code_of([&] { binarize(ConsensusGraph::dense(w, 1.0), 1.0); }) == ErrorCode::ArgumentRange);
}

TEST_CASE("triplet files round trip") {
    std::mt19937_64 rng(9);
    const auto g = sparsify_knn(consensus(std::vector{random_distances(30, rng)}, 1.0), 4);
    const auto dir = testutil::temp_dir("triplets");
    write_triplets(g, dir / "g.txt");
    const auto back = read_triplets(dir / "g.txt");
    REQUIRE(back.size() == 30);
    CHECK(back.edge_count() == g.edge_count());
    for (Eigen::Index i = 0; i < 30; ++i)
        for (Eigen::Index j = 0; j < 30; ++j) CHECK(back.weight(i, j) == g.weight(i, j));
}
