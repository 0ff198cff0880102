#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include <doctest.h>

#include "shdr/benchmark.hpp"
#include "shdr/error.hpp"
#include "shdr/manifest.hpp"
#include "shdr/metrics.hpp"
#include "shdr/pipeline.hpp"
#include "shdr/skew_systems.hpp"
#include "test_util.hpp"

using namespace shdr;
using testutil::error_code_of;

namespace {

SkewDataset logistic(LogisticRegime regime, int n, int t, double snr, std::uint64_t seed, double coupling = 0.5) {
    SkewSystemConfig c;
    c.system = "logistic";
    c.regime = regime;
    c.n_responses = n;
    c.t_points = t;
    c.snr = snr;
    c.seed = seed;
    c.coupling = coupling;
    return simulate(c);
}

double ari_vs_truth(const SkewDataset& ds, const DriverSignal& s) {
    const auto truth = align_to<int>(ds.driver_truth.labels, s.time_offset, s.labels.size());
    return adjusted_rand(truth, s.labels);
}

Eigen::VectorXd column(const DriverSignal& s) { return s.values.col(0); }

}  // namespace

TEST_CASE("constant input fails in the zscore stage") {
    const ResponseEnsemble e(Eigen::MatrixXd::Constant(50, 1, 2.0));
    try {
        reconstruct(e, {});
        FAIL("no throw");
    } catch (const StageError& err) {
        CHECK(err.code() == ErrorCode::DegenerateChannel);
        CHECK(err.stage() == "zscore");
    }
}

TEST_CASE("constant channels are dropped with a warning") {
    const auto ds = logistic(LogisticRegime::Period2, 4, 300, kInfinity, 1);
    Eigen::MatrixXd m(300, 5);
    m.leftCols(4) = ds.responses.values();
    m.col(4).setConstant(1.0);
    PipelineOptions o;
    o.mode = ReconstructionMode::Exact;
    const auto r = reconstruct(ResponseEnsemble(m), o);
    CHECK(r.dropped_channels == std::vector<Eigen::Index>{4});
    CHECK_FALSE(r.warnings.empty());
    CHECK(ari_vs_truth(ds, r.signal) == 1.0);
}

TEST_CASE("noiseless period-2 cascade is recovered exactly") {
    const auto ds = logistic(LogisticRegime::Period2, 10, 3000, kInfinity, 0);
    PipelineOptions o;
    o.mode = ReconstructionMode::Exact;
    const auto r = reconstruct(ds.responses, o);
    REQUIRE(r.signal.mode == DriverMode::Discrete);
    CHECK(ari_vs_truth(ds, r.signal) == 1.0);
    CHECK(r.binary.has_value());
    for (std::size_t i = 0; i + 1 < r.signal.labels.size(); ++i)
        CHECK(r.signal.labels[i] != r.signal.labels[i + 1]);
}

TEST_CASE("modularity on the noiseless exact-mode graph recovers period 2") {
    const auto ds = logistic(LogisticRegime::Period2, 10, 600, kInfinity, 4);
    PipelineOptions o;
    o.mode = ReconstructionMode::Exact;
    const auto r = reconstruct(ds.responses, o);
    auto labels = discrete_driver(r.graph);
    labels.time_offset = r.signal.time_offset;
    CHECK(ari_vs_truth(ds, labels) == 1.0);
}

TEST_CASE("reconstruction is deterministic") {
    SkewSystemConfig c;
    c.n_responses = 6;
    c.t_points = 800;
    c.snr = 10.0;
    c.seed = 7;
    const auto ds = simulate(c);
    PipelineOptions o;
    o.seed = 3;
    const auto a = reconstruct(ds.responses, o);
    o.threads = 2;
    const auto b = reconstruct(ds.responses, o);
    CHECK((a.signal.values.array() == b.signal.values.array()).all());
    CHECK(a.parameters == b.parameters);
}

TEST_CASE("missing entries are tolerated") {
    SkewSystemConfig c;
    c.n_responses = 8;
    c.t_points = 1000;
    c.seed = 8;
    auto ds = simulate(c);
    Eigen::MatrixXd m = ds.responses.values();
    std::mt19937_64 rng(9);
    std::bernoulli_distribution drop(0.3);
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            if (drop(rng)) m(i, j) = kMissing;
    PipelineOptions o;
    o.dim = 3;
    o.tau = 3;
    const auto r = reconstruct(ResponseEnsemble(m), o);
    CHECK(r.signal.values.rows() == 1000 - 6);
    CHECK(r.signal.values.allFinite());
}

TEST_CASE("resolved parameters are recorded") {
    const auto ds = logistic(LogisticRegime::Period4, 5, 400, 10.0, 2);
    PipelineOptions o;
    o.mode = ReconstructionMode::Discrete;
    const auto r = reconstruct(ds.responses, o);
    CHECK(r.parameters.at("dim").get<int>() >= 1);
    CHECK(r.parameters.at("graph") == "knn");
    CHECK(r.parameters.at("k").get<int>() == default_knn(r.parameters.at("embedded_length").get<Eigen::Index>()));
    CHECK(r.parameters.at("mode") == "discrete");
}

TEST_CASE("PCA baseline on rank-one data") {
    Eigen::MatrixXd m(200, 2);
    for (Eigen::Index i = 0; i < 200; ++i) m(i, 0) = m(i, 1) = std::sin(0.1 * static_cast<double>(i)) + 0.001 * static_cast<double>(i);
    const Eigen::VectorXd pc = column(baseline_pca(ResponseEnsemble(m)));
    const Eigen::VectorXd x = m.col(0);
    CHECK(std::abs(spearman(std::span<const double>(pc.data(), 200), std::span<const double>(x.data(), 200))) ==
          doctest::Approx(1.0));
    CHECK(error_code_of([] { baseline_pca(ResponseEnsemble(Eigen::MatrixXd::Ones(5, 1))); }) ==
          ErrorCode::ArgumentRange);
}

TEST_CASE("PCA baseline follows the better represented sinusoid") {
    // z-scoring equalizes channel variance, so weight comes from repetition.
    Eigen::MatrixXd m(400, 3);
    for (Eigen::Index i = 0; i < 400; ++i) {
        const double t = static_cast<double>(i);
        m(i, 0) = m(i, 1) = std::sin(2 * std::numbers::pi * t / 40.0);
        m(i, 2) = std::cos(2 * std::numbers::pi * t / 40.0);
    }
    const Eigen::VectorXd pc = column(baseline_pca(ResponseEnsemble(m)));
    const Eigen::VectorXd a = m.col(0);
    CHECK(std::abs(pearson(std::span<const double>(pc.data(), 400), std::span<const double>(a.data(), 400))) >
          0.99);
}

TEST_CASE("mean baseline") {
    Eigen::MatrixXd m(50, 2);
    for (Eigen::Index i = 0; i < 50; ++i) {
        m(i, 0) = std::sin(0.3 * static_cast<double>(i));
        m(i, 1) = -m(i, 0);
    }
    const Eigen::VectorXd cancel = column(baseline_mean(ResponseEnsemble(m)));
    CHECK(cancel.cwiseAbs().maxCoeff() <= 1e-12);

    m.col(1) = m.col(0);
    const Eigen::VectorXd same = column(baseline_mean(ResponseEnsemble(m)));
    const auto z = zscore(ResponseEnsemble(Eigen::MatrixXd(m.col(0))));
    CHECK((same - z.values().col(0)).cwiseAbs().maxCoeff() <= 1e-12);

    m(3, 0) = m(3, 1) = kMissing;
    std::vector<Eigen::Index> holes;
    const Eigen::VectorXd gap = column(baseline_mean(ResponseEnsemble(m), &holes));
    CHECK(is_missing(gap(3)));
    CHECK(holes == std::vector<Eigen::Index>{3});
}

TEST_CASE("mean baseline improves with more noisy copies") {
    std::mt19937_64 rng(41);
    std::normal_distribution<double> noise(0.0, 2.0);
    std::vector<double> driver(500);
    for (std::size_t i = 0; i < driver.size(); ++i) driver[i] = std::sin(0.05 * static_cast<double>(i));
    double last = -1.0;
    for (int n : {1, 4, 16, 64}) {
        std::vector<double> scores;
        for (int seed = 0; seed < 5; ++seed) {
            Eigen::MatrixXd m(500, n);
            for (Eigen::Index i = 0; i < 500; ++i)
                for (int k = 0; k < n; ++k) m(i, k) = driver[static_cast<std::size_t>(i)] + noise(rng);
            const Eigen::VectorXd b = column(baseline_mean(ResponseEnsemble(m)));
            scores.push_back(spearman(std::span<const double>(b.data(), 500), driver));
        }
        const double med = quantile(scores, 0.5);
        CHECK(med > last);
        last = med;
    }
}

TEST_CASE("sweep emits one row per cell, failures included") {
    SweepSpec s;
    s.parameter = SweepParameter::Coupling;
    s.regime = LogisticRegime::Period2;
    s.base.t_points = 300;
    s.base.response_r_max = 4.0;
    s.grid = {0.0, 0.5};
    s.seeds = {1, 2, 3};
    auto rows = benchmark_sweep(s);
    CHECK(rows.size() == 6);
    CHECK(rows[0].param == 0.0);
    CHECK(rows[3].param == 0.5);

    s.base.response_r_min = s.base.response_r_max = 6.0;  // responses blow up
    rows = benchmark_sweep(s);
    REQUIRE(rows.size() == 6);
    for (const auto& r : rows) {
        CHECK(std::isnan(r.ari));
        CHECK(!r.error.empty());
    }
    const auto summary = summarize(rows);
    CHECK(summary.size() == 2);
    CHECK(summary[0].failures == 3);

    const auto dir = testutil::temp_dir("sweep");
    write_sweep_csv(rows, dir / "rows.csv");
    std::ifstream in(dir / "rows.csv");
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) ++lines;
    CHECK(lines == 7);
}

TEST_CASE("period-2 accuracy rises with signal to noise") {
    SweepSpec s;
    s.parameter = SweepParameter::Noise;
    s.regime = LogisticRegime::Period2;
    s.base.t_points = 1000;
    s.grid = {0.3, 1.0, 3.0, 10.0, 30.0};
    for (std::uint64_t seed = 0; seed < 20; ++seed) s.seeds.push_back(seed);
    const auto summary = summarize(benchmark_sweep(s));
    REQUIRE(summary.size() == 5);
    int inversions = 0;
    for (std::size_t i = 1; i < summary.size(); ++i)
        if (summary[i].ari_median < summary[i - 1].ari_median) ++inversions;
    CHECK(inversions <= 1);
    CHECK(summary.back().ari_median > summary.front().ari_median);
}

TEST_CASE("quantile interpolates") {
    CHECK(quantile({1, 2, 3, 4}, 0.5) == doctest::Approx(2.5));
    CHECK(quantile({4, 1, 3, 2}, 0.0) == 1.0);
    CHECK(quantile({1, kMissing, 3}, 1.0) == 3.0);
    CHECK(std::isnan(quantile({}, 0.5)));
}

TEST_CASE("manifest round trip") {
    RunManifest m;
    m.subcommand = "reconstruct";
    m.parameters = {{"p", 1.0}, {"mode", "continuous"}};
    m.inputs = {"in.csv"};
    m.outputs = {"driver.csv"};
    m.seed = 42;
    m.version = kVersion;
    m.runtime_seconds = 1.5;
    const auto dir = testutil::temp_dir("manifest");
    const auto path = m.write(dir);
    CHECK(path == dir / "manifest.json");
    const auto back = RunManifest::read(path);
    CHECK(back.to_json() == m.to_json());
}

TEST_CASE("knn reconstruction of 50 channels fits the time budget") {
    SkewSystemConfig c;
    c.n_responses = 50;
    c.t_points = 3000;
    c.snr = 10.0;
    c.seed = 5;
    const auto ds = simulate(c);
    PipelineOptions o;
    o.graph = GraphKind::Knn;
    o.threads = 1;
    const auto start = std::chrono::steady_clock::now();
    const auto r = reconstruct(ds.responses, o);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    MESSAGE("knn reconstruct T=3000 N=50: " << seconds << " s");
    CHECK(seconds < 60.0);
    CHECK(r.parameters.at("graph") == "knn");
}
