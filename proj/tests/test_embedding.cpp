#include <cmath>
#include <numbers>
#include <random>

#include <doctest.h>

#include "shdr/dynamics.hpp"
#include "shdr/embedding.hpp"
#include "shdr/error.hpp"
#include "test_util.hpp"

using namespace shdr;
using testutil::error_code_of;

namespace {

Eigen::MatrixXd rows_of(std::initializer_list<std::initializer_list<double>> r) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(r.size()), static_cast<Eigen::Index>(r.begin()->size()));
    Eigen::Index i = 0;
    for (const auto& row : r) {
        Eigen::Index j = 0;
        for (double v : row) m(i, j++) = v;
        ++i;
    }
    return m;
}

}  // namespace

TEST_CASE("embed unrolls backward delays") {
    const std::vector<double> x{1, 2, 3, 4, 5};
    CHECK(embed(x, {2, 1}).points == rows_of({{2, 1}, {3, 2}, {4, 3}, {5, 4}}));
    CHECK(embed(x, {1, 1}).points == rows_of({{1}, {2}, {3}, {4}, {5}}));
    const std::vector<double> y{1, 2, 3, 4, 5, 6};
    CHECK(embed(y, {3, 2}).points == rows_of({{5, 3, 1}, {6, 4, 2}}));
}

TEST_CASE("embed rejects windows longer than the series") {
    const std::vector<double> x{1, 2, 3};
    CHECK(embed(x, {3, 1}).rows() == 1);
    CHECK(error_code_of([&] { embed(x, {4, 1}); }) == ErrorCode::EmbeddingTooLong);
    CHECK(error_code_of([&] { embed(x, {2, 3}); }) == ErrorCode::EmbeddingTooLong);
}

TEST_CASE("embed flags entries drawn from missing samples") {
    const std::vector<double> x{1, kMissing, 3, 4};
    const auto e = embed(x, {2, 1});
    CHECK(e.missing_mask(0, 0));
    CHECK(e.missing_mask(1, 1));
    CHECK_FALSE(e.missing_mask(2, 0));
    CHECK(e.has_missing());
}

TEST_CASE("first column of consecutive rows recovers the shifted series") {
    std::vector<double> x(40);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(0.3 * static_cast<double>(i)) + 0.01 * static_cast<double>(i);
    const EmbeddingParams p{4, 3};
    const auto e = embed(x, p);
    REQUIRE(e.rows() == 40 - 9);
    for (Eigen::Index t = 0; t < e.rows(); ++t) {
        CHECK(e.points(t, 0) == x[static_cast<std::size_t>(t + p.offset())]);
        CHECK(e.points(t, p.dim - 1) == x[static_cast<std::size_t>(t)]);
    }
}

TEST_CASE("choose_tau on a period-40 sine lands near a quarter period") {
    std::vector<double> x(2000);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(2.0 * std::numbers::pi * static_cast<double>(i) / 40.0);
    const int tau = choose_tau(x, 60);
    CHECK(tau >= 8);
    CHECK(tau <= 12);
}

TEST_CASE("choose_tau on white noise and constants") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n;
    std::vector<double> x(3000);
    for (double& v : x) v = n(rng);
    CHECK(choose_tau(x, 50) == 1);
    const std::vector<double> c(100, 2.5);
    CHECK(choose_tau(c, 10) == 1);
}

TEST_CASE("choose_tau ignores missing entries") {
    std::vector<double> x(2000);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(2.0 * std::numbers::pi * static_cast<double>(i) / 40.0);
    std::vector<double> holes = x;
    for (std::size_t i = 0; i < holes.size(); i += 37) holes[i] = kMissing;
    CHECK(std::abs(choose_tau(holes, 60) - choose_tau(x, 60)) <= 1);
}

TEST_CASE("choose_tau precondition") {
    const std::vector<double> x{1, 2, 3, 4};
    CHECK(error_code_of([&] { choose_tau(x, 5); }) == ErrorCode::ArgumentRange);
}

TEST_CASE("false neighbours pick a small dimension for the logistic map") {
    std::vector<double> x(2000);
    double v = 0.4;
    for (int i = 0; i < 500; ++i) v = 4.0 * v * (1.0 - v);
    for (double& s : x) {
        s = v;
        v = 4.0 * v * (1.0 - v);
    }
    const int d = choose_dim(x, 1, 8);
    CHECK(d >= 1);
    CHECK(d <= 2);
}

TEST_CASE("false neighbours pick 3 to 5 dimensions for Lorenz x") {
    const Lorenz f;
    Eigen::Vector3d s(1.0, 1.0, 25.0);
    s = rk4_integrate(f, 0.0, s, 0.01, 2000);
    std::vector<double> x(4000);
    for (double& v : x) {
        v = s(0);
        s = rk4_integrate(f, 0.0, s, 0.01, 2);
    }
    const int tau = choose_tau(x, 100);
    const int d = choose_dim(x, tau, 8);
    CHECK(d >= 3);
    CHECK(d <= 5);
}

TEST_CASE("constant channel embeds in one dimension") {
    const std::vector<double> c(200, 1.0);
    CHECK(choose_dim(c, 1, 5) == 1);
}

TEST_CASE("choose_dim precondition") {
    const std::vector<double> x(20, 0.5);
    CHECK(error_code_of([&] { choose_dim(x, 5, 4); }) == ErrorCode::EmbeddingTooLong);
}

TEST_CASE("global embedding is shared by every channel") {
    Eigen::MatrixXd m(600, 3);
    for (Eigen::Index t = 0; t < 600; ++t)
        for (Eigen::Index k = 0; k < 3; ++k)
            m(t, k) = std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / (36.0 + 4.0 * static_cast<double>(k)));
    const ResponseEnsemble e(m);
    const auto choice = choose_embedding(e, 50, 6);
    CHECK(choice.per_channel_tau.size() == 3);
    CHECK(choice.params.tau >= 8);
    CHECK(choice.params.tau <= 12);
    const auto all = embed_all(e, choice.params);
    for (const auto& s : all) CHECK(s.rows() == 600 - choice.params.offset());
    const auto pinned = choose_embedding(e, 50, 6, 15.0, 3, 2);
    CHECK(pinned.params.tau == 3);
    CHECK(pinned.params.dim == 2);
}
