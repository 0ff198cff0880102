#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "shdr/benchmark.hpp"
#include "shdr/error.hpp"
#include "shdr/manifest.hpp"
#include "shdr/metrics.hpp"
#include "shdr/parallel.hpp"
#include "shdr/pipeline.hpp"
#include "shdr/skew_systems.hpp"
#include "shdr/upo.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace shdr::cli {

double parse_p(const std::string& text) {
    std::string s = text;
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "inf" || s == "infinity") return kInfinity;
    double v = 0.0;
    try {
        std::size_t used = 0;
        v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
    } catch (const std::exception&) {
        throw Error(ErrorCode::ArgumentRange, "--p expects a number >= 1 or 'inf', got '" + text + "'");
    }
    if (!(v >= 1.0)) throw Error(ErrorCode::ArgumentRange, "--p must be >= 1");
    return v;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

fs::path prepare_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir + ": " + ec.message());
    return fs::path(dir);
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw Error(ErrorCode::ArgumentRange, "not a number in list: '" + item + "'");
        }
    }
    if (out.empty()) throw Error(ErrorCode::ArgumentRange, "empty list '" + text + "'");
    return out;
}

double parse_snr(const std::string& text) {
    if (text == "inf" || text == "INF") return kInfinity;
    try {
        return std::stod(text);
    } catch (const std::exception&) {
        throw Error(ErrorCode::ArgumentRange, "snr must be a number or 'inf'");
    }
}

// ---------------------------------------------------------------- reconstruct

struct ReconstructArgs {
    std::string input;
    bool header = false;
    std::string delimiter = ",";
    double sample_period = 1.0;
    std::string p = "1";
    std::string mode = "continuous";
    std::string community = "modularity";
    std::string graph = "auto";
    bool no_zscore = false;
    bool export_graph = false;
    bool baselines = false;
    PipelineOptions opts;
};

void run_reconstruct(const ReconstructArgs& a, const GlobalOptions& g) {
    const auto start = Clock::now();
    IngestOptions ingest;
    ingest.header = a.header;
    ingest.delimiter = a.delimiter.empty() ? ',' : a.delimiter[0];
    ingest.sample_period = a.sample_period;
    const ResponseEnsemble ensemble = load_csv(a.input, ingest);

    PipelineOptions opts = a.opts;
    opts.p = parse_p(a.p);
    opts.mode = reconstruction_mode_from_string(a.mode);
    opts.community = community_method_from_string(a.community);
    opts.graph = graph_kind_from_string(a.graph);
    opts.standardize = !a.no_zscore;
    opts.seed = g.seed;
    opts.threads = g.threads;

    const PipelineResult res = reconstruct(ensemble, opts);
    const fs::path dir = prepare_dir(g.out_dir);
    RunManifest m;
    m.subcommand = "reconstruct";
    m.inputs = {a.input};
    m.seed = g.seed;
    m.version = kVersion;

    save_driver_csv(res.signal, dir / "driver.csv");
    json params = res.parameters;
    params["warnings"] = res.warnings;
    write_json(driver_sidecar(res.signal, params), dir / "driver.json");
    m.outputs = {(dir / "driver.csv").string(), (dir / "driver.json").string()};
    if (a.export_graph) {
        write_triplets(res.graph, dir / "graph.txt");
        m.outputs.push_back((dir / "graph.txt").string());
    }
    if (a.baselines) {
        DriverSignal mean = baseline_mean(ensemble);
        save_driver_csv(mean, dir / "baseline_mean.csv");
        m.outputs.push_back((dir / "baseline_mean.csv").string());
        if (ensemble.channels() >= 2) {
            save_driver_csv(baseline_pca(ensemble), dir / "baseline_pca.csv");
            m.outputs.push_back((dir / "baseline_pca.csv").string());
        }
    }
    for (const auto& w : res.warnings) std::cerr << "warning: " << w << '\n';
    m.parameters = params;
    m.parameters["header"] = a.header;
    m.parameters["delimiter"] = a.delimiter;
    m.parameters["sample_period"] = a.sample_period;
    m.runtime_seconds = seconds_since(start);
    m.write(dir);
    std::cout << "wrote " << (dir / "driver.csv").string() << " (" << res.signal.size() << " points, offset "
              << res.signal.time_offset << ")\n";
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    std::string config;
    std::vector<std::string> sets;
    std::string system;
    int n_responses = -1;
    double coupling = -1.0;
    std::string snr;
    int t_points = -1;
    std::string regime;
    std::string filter;
};

SkewSystemConfig resolve_config(const SimulateArgs& a, const GlobalOptions& g) {
    SkewSystemConfig cfg;
    if (!a.config.empty()) cfg.apply(read_kv_file(a.config));
    std::map<std::string, std::string> kv;
    for (const auto& s : a.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw Error(ErrorCode::ArgumentRange, "--set expects key=value, got '" + s + "'");
        kv[s.substr(0, eq)] = s.substr(eq + 1);
    }
    cfg.apply(kv);
    if (!a.system.empty()) cfg.system = a.system;
    if (a.n_responses > 0) cfg.n_responses = a.n_responses;
    if (a.coupling >= 0.0) cfg.coupling = a.coupling;
    if (!a.snr.empty()) cfg.snr = parse_snr(a.snr);
    if (a.t_points > 0) cfg.t_points = a.t_points;
    if (!a.regime.empty()) cfg.regime = logistic_regime_from_string(a.regime);
    if (!a.filter.empty()) cfg.apply({{"filter", a.filter}});
    cfg.seed = g.seed;
    return cfg;
}

void run_simulate(const SimulateArgs& a, const GlobalOptions& g) {
    const auto start = Clock::now();
    const SkewSystemConfig cfg = resolve_config(a, g);
    if (g.threads > 0) setenv("SHDR_THREADS", std::to_string(g.threads).c_str(), 1);
    const SkewDataset ds = simulate(cfg);
    const fs::path dir = prepare_dir(g.out_dir);
    save_csv(ds.responses, dir / "responses.csv");
    save_driver_csv(ds.driver_truth, dir / "driver_truth.csv");
    write_json(ds.config, dir / "config.json");
    RunManifest m;
    m.subcommand = "simulate";
    m.parameters = ds.config;
    if (!a.config.empty()) m.inputs = {a.config};
    m.outputs = {(dir / "responses.csv").string(), (dir / "driver_truth.csv").string(),
                 (dir / "config.json").string()};
    m.seed = g.seed;
    m.version = kVersion;
    m.runtime_seconds = seconds_since(start);
    m.write(dir);
    std::cout << "wrote " << ds.responses.channels() << " responses x " << ds.responses.length() << " samples to "
              << dir.string() << '\n';
}

// ---------------------------------------------------------------- benchmark

struct BenchmarkArgs {
    std::string experiment = "n_responses";
    std::string regime = "period8";
    std::string grid = "1,2,4,8,16,32,64";
    int seeds = 20;
    std::string snr = "10";
    double coupling = 0.5;
    int n_responses = 10;
    int t_points = 3000;
    std::string mode = "discrete";
    std::string p = "1";
    int dim = 2;
    int tau = 1;
    int k = 0;
    double eps = 0.01;
};

void run_benchmark(const BenchmarkArgs& a, const GlobalOptions& g) {
    const auto start = Clock::now();
    SweepSpec spec;
    spec.parameter = sweep_parameter_from_string(a.experiment);
    spec.regime = logistic_regime_from_string(a.regime);
    spec.grid = parse_list(a.grid);
    if (a.seeds < 1) throw Error(ErrorCode::ArgumentRange, "--seeds must be >= 1");
    for (int s = 0; s < a.seeds; ++s) spec.seeds.push_back(g.seed + static_cast<std::uint64_t>(s));
    spec.base.snr = parse_snr(a.snr);
    spec.base.coupling = a.coupling;
    spec.base.n_responses = a.n_responses;
    spec.base.t_points = a.t_points;
    spec.pipeline.mode = reconstruction_mode_from_string(a.mode);
    spec.pipeline.p = parse_p(a.p);
    spec.pipeline.dim = a.dim;
    spec.pipeline.tau = a.tau;
    spec.pipeline.k = a.k;
    spec.pipeline.eps = a.eps;
    spec.threads = g.threads;

    const auto rows = benchmark_sweep(spec);
    const auto summary = summarize(rows);
    const fs::path dir = prepare_dir(g.out_dir);
    write_sweep_csv(rows, dir / "sweep.csv");
    write_summary_csv(summary, dir / "summary.csv");
    RunManifest m;
    m.subcommand = "benchmark";
    m.parameters = {{"experiment", to_string(spec.parameter)},
                    {"regime", to_string(spec.regime)},
                    {"grid", spec.grid},
                    {"seeds", spec.seeds},
                    {"base", spec.base.to_json()},
                    {"pipeline", spec.pipeline.to_json()}};
    m.outputs = {(dir / "sweep.csv").string(), (dir / "summary.csv").string()};
    m.seed = g.seed;
    m.version = kVersion;
    m.runtime_seconds = seconds_since(start);
    m.write(dir);
    std::cout << std::setw(10) << to_string(spec.parameter) << "  ari_median  lcc_median  failures\n";
    for (const auto& s : summary)
        std::cout << std::setw(10) << s.param << "  " << std::setw(10) << s.ari_median << "  " << std::setw(10)
                  << s.lcc_median << "  " << s.failures << '\n';
}

// ---------------------------------------------------------------- diagnose

struct DiagnoseArgs {
    std::string truth;
    std::string recon;
    std::string truth_mode = "continuous";
    std::string recon_mode;
    long offset = -1;
    std::string graph;
    double threshold = -1.0;
    double q = -1.0;
    std::string n_list = "1,2,4,8,16,32,64";
    int n_states = 2;
    int bins = 8;
};

json nullable(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void run_diagnose(const DiagnoseArgs& a, const GlobalOptions& g) {
    const auto start = Clock::now();
    json report = {{"spearman", nullptr}, {"pearson", nullptr}, {"mse", nullptr}, {"covariance", nullptr},
                   {"ari", nullptr},      {"lcc_fraction", nullptr}, {"component_sizes", nullptr},
                   {"beta_null_curve", nullptr}};
    std::vector<std::string> inputs;
    if (!a.truth.empty() && !a.recon.empty()) {
        const DriverMode tmode = driver_mode_from_string(a.truth_mode);
        const fs::path recon_path(a.recon);
        long offset = a.offset;
        std::string rmode_text = a.recon_mode;
        // Offset and mode default to the reconstruction's sidecar when present.
        const fs::path sidecar = fs::path(recon_path).replace_extension(".json");
        if (fs::exists(sidecar)) {
            std::ifstream in(sidecar);
            const json side = json::parse(in, nullptr, false);
            if (!side.is_discarded()) {
                if (offset < 0) offset = side.value("time_offset", 0L);
                if (rmode_text.empty()) rmode_text = side.value("mode", std::string("continuous"));
            }
        }
        if (offset < 0) offset = 0;
        if (rmode_text.empty()) rmode_text = "continuous";
        const DriverMode rmode = driver_mode_from_string(rmode_text);
        const DriverSignal truth = load_driver_csv(a.truth, tmode);
        const DriverSignal recon = load_driver_csv(a.recon, rmode);
        inputs = {a.truth, a.recon};
        const auto n = static_cast<std::size_t>(recon.size());
        if (static_cast<std::size_t>(offset) + n > static_cast<std::size_t>(truth.size()))
            throw Error(ErrorCode::ShapeMismatch, "reconstruction (plus offset) is longer than the truth series");

        if (tmode == DriverMode::Continuous && rmode == DriverMode::Continuous) {
            const auto t = align_to<double>(truth.mode_values(0), offset, n);
            const auto r = recon.mode_values(0);
            // Eigenvector sign is arbitrary: report with the sign that makes Spearman positive.
            const double sign = spearman(t, r) < 0.0 ? -1.0 : 1.0;
            std::vector<double> rs(r);
            for (double& v : rs) v *= sign;
            report["spearman"] = spearman(t, rs);
            report["pearson"] = pearson(t, rs);
            report["mse"] = mse(t, rs);
            report["covariance"] = covariance(t, rs);
            report["sign"] = sign;
        } else if (rmode == DriverMode::Discrete) {
            std::vector<int> t;
            if (tmode == DriverMode::Discrete) {
                t = align_to<int>(truth.labels, offset, n);
            } else {
                t = quantile_labels(align_to<double>(truth.mode_values(0), offset, n), a.bins);
            }
            report["ari"] = adjusted_rand(t, recon.labels);
        } else {
            throw Error(ErrorCode::ArgumentRange, "continuous reconstruction against discrete truth is not scored");
        }
        report["time_offset"] = offset;
    }
    if (!a.graph.empty()) {
        const ConsensusGraph graph = read_triplets(a.graph);
        const double thr = a.threshold >= 0.0 ? a.threshold : default_percolation_threshold();
        const PercolationReport p = percolation(graph, thr);
        report["lcc_fraction"] = p.lcc_fraction;
        report["component_sizes"] = p.component_sizes;
        report["edge_count"] = p.edge_count;
        report["threshold_used"] = p.threshold_used;
        inputs.push_back(a.graph);
    }
    if (a.q >= 0.0) {
        std::vector<int> ns;
        for (double v : parse_list(a.n_list)) ns.push_back(static_cast<int>(std::lround(v)));
        const auto curve = beta_null_curve(a.q, ns, a.n_states);
        json c = json::array();
        for (std::size_t i = 0; i < ns.size(); ++i) c.push_back({{"n_responses", ns[i]}, {"null_accuracy", curve[i]}});
        report["beta_null_curve"] = c;
    }
    const fs::path dir = prepare_dir(g.out_dir);
    write_json(report, dir / "diagnose.json");
    RunManifest m;
    m.subcommand = "diagnose";
    m.parameters = {{"truth_mode", a.truth_mode}, {"offset", a.offset}, {"threshold", a.threshold},
                    {"q", a.q},                   {"n_list", a.n_list}, {"n_states", a.n_states},
                    {"bins", a.bins}};
    m.inputs = inputs;
    m.outputs = {(dir / "diagnose.json").string()};
    m.seed = g.seed;
    m.version = kVersion;
    m.runtime_seconds = seconds_since(start);
    m.write(dir);
    std::cout << report.dump(2) << '\n';
}

// ---------------------------------------------------------------- upo

struct UpoArgs {
    std::string input;
    bool header = false;
    bool rossler = false;
    long samples = 100000;
    double dt = 0.05;
    int max_period = 0;
    double eps = 0.0;
    int n_orbits = 3;
    std::string recon;
    double recon_dt = 0.0;
};

void run_upo(const UpoArgs& a, const GlobalOptions& g) {
    const auto start = Clock::now();
    Eigen::MatrixXd traj;
    if (a.rossler) {
        traj = rossler_trajectory(a.samples, a.dt, 5, g.seed);
    } else {
        if (a.input.empty()) throw Error(ErrorCode::ArgumentRange, "give a trajectory CSV or --rossler");
        IngestOptions ingest;
        ingest.header = a.header;
        const ResponseEnsemble e = load_csv(a.input, ingest);
        if (e.missing_count() > 0) throw Error(ErrorCode::ParseError, "trajectory must not contain missing values");
        traj = e.values();
    }
    UpoOptions opts;
    opts.max_period = a.max_period;
    opts.eps = a.eps;
    opts.n_orbits = a.n_orbits;
    opts.dt = a.dt;
    const auto orbits = find_upos(traj, opts);

    const fs::path dir = prepare_dir(g.out_dir);
    RunManifest m;
    m.subcommand = "upo";
    json meta = json::array();
    for (std::size_t i = 0; i < orbits.size(); ++i) {
        const auto& o = orbits[i];
        const fs::path file = dir / ("orbit_" + std::to_string(i) + ".csv");
        save_csv(ResponseEnsemble(o.points, {}, o.dt), file);
        m.outputs.push_back(file.string());
        meta.push_back({{"file", file.filename().string()},
                        {"period_samples", o.period_samples},
                        {"period", o.period()},
                        {"recurrence_gap", o.recurrence_gap},
                        {"shadow_fraction", o.shadow_fraction}});
    }
    json out = {{"orbits", meta}};
    if (!a.recon.empty()) {
        const DriverSignal recon = load_driver_csv(a.recon, DriverMode::Continuous);
        const double rdt = a.recon_dt > 0.0 ? a.recon_dt : a.dt;
        out["reconstruction_correlation"] = orbit_reconstruction_correlation(recon, rdt, orbits);
        m.inputs.push_back(a.recon);
    }
    write_json(out, dir / "orbits.json");
    m.outputs.push_back((dir / "orbits.json").string());
    if (!a.input.empty()) m.inputs.push_back(a.input);
    m.parameters = {{"rossler", a.rossler}, {"samples", a.samples}, {"dt", a.dt}, {"max_period", a.max_period},
                    {"eps", a.eps},         {"n_orbits", a.n_orbits}, {"recon_dt", a.recon_dt}};
    m.seed = g.seed;
    m.version = kVersion;
    m.runtime_seconds = seconds_since(start);
    m.write(dir);
    std::cout << out.dump(2) << '\n';
}

}  // namespace

void add_reconstruct(CLI::App& app, GlobalOptions& global) {
    auto args = std::make_shared<ReconstructArgs>();
    auto* sub = app.add_subcommand("reconstruct", "Reconstruct the driver from a response CSV");
    sub->add_option("input", args->input, "Response CSV (rows = time, columns = channels)")->required();
    sub->add_flag("--header", args->header, "First row is a header");
    sub->add_option("--delimiter", args->delimiter, "Cell delimiter");
    sub->add_option("--sample-period", args->sample_period, "Sampling interval");
    sub->add_option("--dim", args->opts.dim, "Embedding dimension (0 = false nearest neighbours)");
    sub->add_option("--tau", args->opts.tau, "Embedding delay (0 = autocorrelation)");
    sub->add_option("--max-dim", args->opts.max_dim, "Largest dimension searched");
    sub->add_option("--max-lag", args->opts.max_lag, "Largest delay searched");
    sub->add_option("--p", args->p, "Consensus norm p >= 1 or 'inf'");
    sub->add_option("--mode", args->mode, "continuous | discrete | exact")
        ->check(CLI::IsMember({"continuous", "discrete", "exact"}));
    sub->add_option("--n-modes", args->opts.n_modes, "Subleading modes returned (continuous)");
    sub->add_option("--tol", args->opts.tol, "Eigen residual tolerance");
    sub->add_option("--max-iter", args->opts.max_iter, "Eigensolver restart limit");
    sub->add_option("--community", args->community, "modularity | components (discrete)")
        ->check(CLI::IsMember({"modularity", "components"}));
    sub->add_option("--graph", args->graph, "auto | dense | knn")->check(CLI::IsMember({"auto", "dense", "knn"}));
    sub->add_option("--k", args->opts.k, "Neighbours per row for knn graphs (0 = ceil(4 ln T_e))");
    sub->add_option("--eps", args->opts.eps, "Recurrence threshold in scaled-distance units (exact/components)");
    sub->add_option("--dense-limit", args->opts.dense_limit, "Largest embedded length kept dense under --graph auto");
    sub->add_flag("--no-zscore", args->no_zscore, "Skip per-channel standardization");
    sub->add_flag("--export-graph", args->export_graph, "Write the graph as i j w triplets");
    sub->add_flag("--baselines", args->baselines, "Also write PCA and mean baselines");
    sub->callback([args, &global] { run_reconstruct(*args, global); });
}

void add_simulate(CLI::App& app, GlobalOptions& global) {
    auto args = std::make_shared<SimulateArgs>();
    auto* sub = app.add_subcommand("simulate", "Generate a synthetic skew-product dataset");
    sub->add_option("--config", args->config, "Flat key=value config file")->check(CLI::ExistingFile);
    sub->add_option("--set", args->sets, "Override a config key (key=value), repeatable");
    sub->add_option("--system", args->system, "rossler-lorenz | logistic | double-gyre")
        ->check(CLI::IsMember({"rossler-lorenz", "logistic", "double-gyre"}));
    sub->add_option("--n-responses", args->n_responses, "Number of responses");
    sub->add_option("--coupling", args->coupling, "Driver-to-response coupling");
    sub->add_option("--snr", args->snr, "Signal-to-noise variance ratio or 'inf'");
    sub->add_option("--t-points", args->t_points, "Samples per series");
    sub->add_option("--regime", args->regime, "period2 | period4 | period8 | chaotic");
    sub->add_option("--filter", args->filter, "identity | gaussian");
    sub->callback([args, &global] { run_simulate(*args, global); });
}

void add_benchmark(CLI::App& app, GlobalOptions& global) {
    auto args = std::make_shared<BenchmarkArgs>();
    auto* sub = app.add_subcommand("benchmark", "Sweep noise, coupling or ensemble size on logistic cascades");
    sub->add_option("--experiment", args->experiment, "noise | coupling | n_responses");
    sub->add_option("--regime", args->regime, "period2 | period4 | period8 | chaotic");
    sub->add_option("--grid", args->grid, "Comma-separated parameter values");
    sub->add_option("--seeds", args->seeds, "Replicates per grid point (seeds start at --seed)");
    sub->add_option("--snr", args->snr, "Fixed snr for non-noise sweeps");
    sub->add_option("--coupling", args->coupling, "Fixed coupling for non-coupling sweeps");
    sub->add_option("--n-responses", args->n_responses, "Fixed ensemble size for non-N sweeps");
    sub->add_option("--t-points", args->t_points, "Samples per series");
    sub->add_option("--mode", args->mode, "discrete | exact")->check(CLI::IsMember({"discrete", "exact"}));
    sub->add_option("--p", args->p, "Consensus norm p >= 1 or 'inf'");
    sub->add_option("--dim", args->dim, "Embedding dimension (0 = automatic)");
    sub->add_option("--tau", args->tau, "Embedding delay (0 = automatic)");
    sub->add_option("--k", args->k, "Neighbours per row (0 = ceil(4 ln T_e))");
    sub->add_option("--eps", args->eps, "Exact-mode threshold");
    sub->callback([args, &global] { run_benchmark(*args, global); });
}

void add_diagnose(CLI::App& app, GlobalOptions& global) {
    auto args = std::make_shared<DiagnoseArgs>();
    auto* sub = app.add_subcommand("diagnose", "Score a reconstruction and report graph diagnostics");
    sub->add_option("--truth", args->truth, "True driver CSV")->check(CLI::ExistingFile);
    sub->add_option("--recon", args->recon, "Reconstructed driver CSV")->check(CLI::ExistingFile);
    sub->add_option("--truth-mode", args->truth_mode, "continuous | discrete");
    sub->add_option("--recon-mode", args->recon_mode, "continuous | discrete (default: from sidecar)");
    sub->add_option("--offset", args->offset, "Raw index of the reconstruction's first point (default: sidecar)");
    sub->add_option("--graph", args->graph, "Graph triplet file for percolation")->check(CLI::ExistingFile);
    sub->add_option("--threshold", args->threshold, "Edge weight threshold (default e^-1)");
    sub->add_option("--q", args->q, "Per-response discovery probability for the null curve");
    sub->add_option("--n-list", args->n_list, "Ensemble sizes for the null curve");
    sub->add_option("--n-states", args->n_states, "Driver states for the null curve");
    sub->add_option("--bins", args->bins, "Quantile bins when discrete labels meet a continuous truth");
    sub->callback([args, &global] { run_diagnose(*args, global); });
}

void add_upo(CLI::App& app, GlobalOptions& global) {
    auto args = std::make_shared<UpoArgs>();
    auto* sub = app.add_subcommand("upo", "Extract unstable periodic orbits by closest recurrences");
    sub->add_option("input", args->input, "Trajectory CSV (columns = coordinates)");
    sub->add_flag("--header", args->header, "First row is a header");
    sub->add_flag("--rossler", args->rossler, "Use a canonical Rossler trajectory instead of a file");
    sub->add_option("--samples", args->samples, "Samples of the generated trajectory");
    sub->add_option("--dt", args->dt, "Trajectory sampling interval");
    sub->add_option("--max-period", args->max_period, "Largest period in samples (0 = 5 x FFT period)");
    sub->add_option("--eps", args->eps, "Recurrence tolerance (0 = 0.05 x rms)");
    sub->add_option("--n-orbits", args->n_orbits, "Orbits to keep");
    sub->add_option("--recon", args->recon, "Continuous reconstruction CSV to correlate against")
        ->check(CLI::ExistingFile);
    sub->add_option("--recon-dt", args->recon_dt, "Reconstruction sampling interval (default --dt)");
    sub->callback([args, &global] { run_upo(*args, global); });
}

}  // namespace shdr::cli
