#include "shdr/benchmark.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>

#include "shdr/error.hpp"
#include "shdr/metrics.hpp"
#include "shdr/parallel.hpp"

namespace shdr {

std::string to_string(SweepParameter p) {
    switch (p) {
        case SweepParameter::Noise: return "noise";
        case SweepParameter::Coupling: return "coupling";
        case SweepParameter::NResponses: return "n_responses";
    }
    return "n_responses";
}

SweepParameter sweep_parameter_from_string(const std::string& s) {
    if (s == "noise" || s == "snr") return SweepParameter::Noise;
    if (s == "coupling") return SweepParameter::Coupling;
    if (s == "n_responses" || s == "n") return SweepParameter::NResponses;
    throw Error(ErrorCode::ArgumentRange, "unknown sweep parameter '" + s + "'");
}

SweepSpec::SweepSpec() {
    base.system = "logistic";
    base.n_responses = 10;
    base.coupling = 0.5;
    base.snr = 10.0;
    base.t_points = 3000;
    pipeline.mode = ReconstructionMode::Discrete;
    pipeline.dim = 2;
    pipeline.tau = 1;
    pipeline.threads = 1;
}

SweepRow run_sweep_cell(const SweepSpec& spec, double param, std::uint64_t seed) {
    SweepRow row;
    row.param = param;
    row.seed = seed;
    try {
        SkewSystemConfig cfg = spec.base;
        cfg.seed = seed;
        cfg.regime = spec.regime;
        switch (spec.parameter) {
            case SweepParameter::Noise: cfg.snr = param; break;
            case SweepParameter::Coupling: cfg.coupling = param; break;
            case SweepParameter::NResponses: cfg.n_responses = static_cast<int>(std::lround(param)); break;
        }
        const SkewDataset data = gen_logistic_skew(spec.regime, cfg);
        PipelineOptions opts = spec.pipeline;
        opts.seed = seed;
        const PipelineResult res = reconstruct(data.responses, opts);
        if (res.signal.mode != DriverMode::Discrete)
            throw Error(ErrorCode::ArgumentRange, "benchmark sweeps need a discrete or exact reconstruction");

        const std::size_t n = res.signal.labels.size();
        const Eigen::Index off = res.signal.time_offset;
        std::vector<int> truth;
        if (data.driver_truth.mode == DriverMode::Discrete) {
            truth = align_to<int>(data.driver_truth.labels, off, n);
        } else {
            const auto z = align_to<double>(data.driver_value, off, n);
            truth = quantile_labels(z, spec.quantile_bins);
        }
        row.ari = adjusted_rand(truth, res.signal.labels);
        row.n_communities = 1 + *std::max_element(res.signal.labels.begin(), res.signal.labels.end());
        const int period = logistic_period(spec.regime);
        auto coarse = [&](int m) {
            std::vector<int> c(truth.size());
            for (std::size_t i = 0; i < c.size(); ++i) c[i] = truth[i] % m;
            return adjusted_rand(c, res.signal.labels);
        };
        if (period >= 4) row.ari_coarse2 = coarse(2);
        if (period >= 8) row.ari_coarse4 = coarse(4);
        // Percolation of the reconstruction graph itself (every stored edge).
        row.lcc_fraction = percolation(res.graph, 0.0).lcc_fraction;
    } catch (const Error& e) {
        row.error = std::string(to_string(e.code()));
    } catch (const std::exception&) {
        row.error = "InternalError";
    }
    return row;
}

std::vector<SweepRow> benchmark_sweep(const SweepSpec& spec) {
    if (spec.grid.empty() || spec.seeds.empty()) throw Error(ErrorCode::ArgumentRange, "empty sweep grid or seed list");
    std::vector<SweepRow> rows(spec.grid.size() * spec.seeds.size());
    parallel_for(rows.size(), resolve_threads(spec.threads), [&](std::size_t idx) {
        const std::size_t g = idx / spec.seeds.size();
        const std::size_t s = idx % spec.seeds.size();
        rows[idx] = run_sweep_cell(spec, spec.grid[g], spec.seeds[s]);
    });
    return rows;
}

double quantile(std::vector<double> values, double q) {
    values.erase(std::remove_if(values.begin(), values.end(), [](double v) { return !std::isfinite(v); }),
                 values.end());
    if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

std::vector<SweepSummary> summarize(const std::vector<SweepRow>& rows) {
    std::vector<double> order;
    std::map<double, std::vector<const SweepRow*>> groups;
    for (const SweepRow& r : rows) {
        if (!groups.count(r.param)) order.push_back(r.param);
        groups[r.param].push_back(&r);
    }
    std::vector<SweepSummary> out;
    for (double p : order) {
        SweepSummary s;
        s.param = p;
        std::vector<double> ari, lcc, comm;
        for (const SweepRow* r : groups[p]) {
            ++s.cells;
            if (!r->error.empty()) {
                ++s.failures;
                continue;
            }
            ari.push_back(r->ari);
            lcc.push_back(r->lcc_fraction);
            comm.push_back(r->n_communities);
        }
        s.ari_median = quantile(ari, 0.5);
        s.ari_q1 = quantile(ari, 0.25);
        s.ari_q3 = quantile(ari, 0.75);
        s.lcc_median = quantile(lcc, 0.5);
        s.lcc_q1 = quantile(lcc, 0.25);
        s.lcc_q3 = quantile(lcc, 0.75);
        s.communities_median = quantile(comm, 0.5);
        out.push_back(s);
    }
    return out;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out << std::setprecision(10);
    return out;
}

}  // namespace

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& path) {
    auto out = open_out(path);
    auto cell = [&](double v) -> std::ostream& {
        if (std::isfinite(v)) out << v;
        return out;
    };
    out << "param,seed,ari,lcc_fraction,n_communities,ari_coarse2,ari_coarse4,error\n";
    for (const SweepRow& r : rows) {
        out << r.param << ',' << r.seed << ',';
        cell(r.ari) << ',';
        cell(r.lcc_fraction) << ',' << r.n_communities << ',';
        cell(r.ari_coarse2) << ',';
        cell(r.ari_coarse4) << ',' << r.error << '\n';
    }
}

void write_summary_csv(const std::vector<SweepSummary>& summary, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "param,cells,failures,ari_median,ari_q1,ari_q3,lcc_median,lcc_q1,lcc_q3,communities_median\n";
    for (const SweepSummary& s : summary)
        out << s.param << ',' << s.cells << ',' << s.failures << ',' << s.ari_median << ',' << s.ari_q1 << ','
            << s.ari_q3 << ',' << s.lcc_median << ',' << s.lcc_q1 << ',' << s.lcc_q3 << ','
            << s.communities_median << '\n';
}

}  // namespace shdr
