#include "shdr/skew_systems.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numeric>

#include "shdr/dynamics.hpp"
#include "shdr/error.hpp"
#include "shdr/parallel.hpp"

namespace shdr {

double logistic_r(LogisticRegime regime) {
    switch (regime) {
        case LogisticRegime::Period2: return 3.2;
        case LogisticRegime::Period4: return 3.5;
        case LogisticRegime::Period8: return 3.55;
        case LogisticRegime::Chaotic: return 3.9;
    }
    return 3.9;
}

int logistic_period(LogisticRegime regime) {
    switch (regime) {
        case LogisticRegime::Period2: return 2;
        case LogisticRegime::Period4: return 4;
        case LogisticRegime::Period8: return 8;
        case LogisticRegime::Chaotic: return 0;
    }
    return 0;
}

std::string to_string(LogisticRegime regime) {
    switch (regime) {
        case LogisticRegime::Period2: return "period2";
        case LogisticRegime::Period4: return "period4";
        case LogisticRegime::Period8: return "period8";
        case LogisticRegime::Chaotic: return "chaotic";
    }
    return "chaotic";
}

LogisticRegime logistic_regime_from_string(const std::string& s) {
    if (s == "period2") return LogisticRegime::Period2;
    if (s == "period4") return LogisticRegime::Period4;
    if (s == "period8") return LogisticRegime::Period8;
    if (s == "chaotic") return LogisticRegime::Chaotic;
    throw Error(ErrorCode::ArgumentRange, "unknown logistic regime '" + s + "'");
}

nlohmann::json SkewSystemConfig::to_json() const {
    auto num = [](double v) -> nlohmann::json {
        if (std::isinf(v)) return "inf";
        return v;
    };
    return {
        {"system", system},
        {"n_responses", n_responses},
        {"coupling", coupling},
        {"snr", num(snr)},
        {"t_points", t_points},
        {"dt", dt},
        {"substeps", substeps},
        {"seed", seed},
        {"burn_in", burn_in},
        {"filter", filter == MeasurementFilter::Identity ? "identity" : "gaussian"},
        {"filter_min_width", filter_min_width},
        {"filter_max_width", filter_max_width},
        {"regime", to_string(regime)},
        {"response_r_min", response_r_min},
        {"response_r_max", response_r_max},
        {"rossler_a", rossler_a},
        {"rossler_b", rossler_b},
        {"rossler_c", rossler_c},
        {"lorenz_sigma", lorenz_sigma},
        {"lorenz_rho", lorenz_rho},
        {"lorenz_beta", lorenz_beta},
        {"jitter", jitter},
        {"timescale_ratio", timescale_ratio},
        {"observe", observe},
        {"gyre_A", gyre_A},
        {"gyre_eps", gyre_eps},
        {"gyre_omega", gyre_omega},
    };
}

namespace {

double parse_real(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used == value.size()) return v;
    } catch (const std::exception&) {
    }
    throw Error(ErrorCode::ArgumentRange, "key '" + key + "': not a number: '" + value + "'");
}

long long parse_integer(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(value, &used);
        if (used == value.size()) return v;
    } catch (const std::exception&) {
    }
    throw Error(ErrorCode::ArgumentRange, "key '" + key + "': not an integer: '" + value + "'");
}

}  // namespace

void SkewSystemConfig::apply(const std::map<std::string, std::string>& kv) {
    const std::map<std::string, double*> reals = {
        {"coupling", &coupling},           {"snr", &snr},
        {"dt", &dt},                       {"filter_min_width", &filter_min_width},
        {"filter_max_width", &filter_max_width}, {"response_r_min", &response_r_min},
        {"response_r_max", &response_r_max}, {"rossler_a", &rossler_a},
        {"rossler_b", &rossler_b},         {"rossler_c", &rossler_c},
        {"lorenz_sigma", &lorenz_sigma},   {"lorenz_rho", &lorenz_rho},
        {"lorenz_beta", &lorenz_beta},     {"jitter", &jitter},
        {"timescale_ratio", &timescale_ratio}, {"gyre_A", &gyre_A},
        {"gyre_eps", &gyre_eps},           {"gyre_omega", &gyre_omega},
    };
    const std::map<std::string, int*> ints = {
        {"n_responses", &n_responses}, {"t_points", &t_points}, {"substeps", &substeps},
        {"burn_in", &burn_in},         {"observe", &observe},
    };
    for (const auto& [key, value] : kv) {
        if (auto r = reals.find(key); r != reals.end()) {
            *r->second = parse_real(key, value);
        } else if (auto i = ints.find(key); i != ints.end()) {
            *i->second = static_cast<int>(parse_integer(key, value));
        } else if (key == "seed") {
            seed = static_cast<std::uint64_t>(parse_integer(key, value));
        } else if (key == "system" || key == "driver") {
            system = value;
        } else if (key == "regime") {
            regime = logistic_regime_from_string(value);
        } else if (key == "filter") {
            if (value == "identity") filter = MeasurementFilter::Identity;
            else if (value == "gaussian" || value == "random_gaussian") filter = MeasurementFilter::RandomGaussian;
            else throw Error(ErrorCode::ArgumentRange, "unknown filter '" + value + "'");
        } else {
            throw Error(ErrorCode::ArgumentRange, "unknown config key '" + key + "'");
        }
    }
}

std::map<std::string, std::string> read_kv_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t lineno = 0;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(lineno) + ": expected key=value");
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

std::mt19937_64 rng_stream(std::uint64_t master, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      0x5eedu};
    return std::mt19937_64(seq);
}

namespace {

double rms(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s / static_cast<double>(x.size()));
}

double variance(std::span<const double> x) {
    const double m = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size());
}

void add_noise(std::vector<double>& y, double snr, std::mt19937_64& rng) {
    if (std::isinf(snr)) return;
    const double sd = std::sqrt(variance(y) / snr);
    std::normal_distribution<double> noise(0.0, sd);
    for (double& v : y) v += noise(rng);
}

void validate(const SkewSystemConfig& cfg) {
    if (cfg.n_responses < 1) throw Error(ErrorCode::ArgumentRange, "n_responses must be >= 1");
    if (cfg.coupling < 0.0) throw Error(ErrorCode::ArgumentRange, "coupling must be >= 0");
    if (!(cfg.snr > 0.0)) throw Error(ErrorCode::ArgumentRange, "snr must be > 0 or inf");
    if (!(cfg.dt > 0.0)) throw Error(ErrorCode::ArgumentRange, "dt must be > 0");
    if (cfg.substeps < 1) throw Error(ErrorCode::ArgumentRange, "substeps must be >= 1");
    if (cfg.burn_in < 0) throw Error(ErrorCode::ArgumentRange, "burn_in must be >= 0");
    if (cfg.t_points < 2) throw Error(ErrorCode::ArgumentRange, "t_points must be >= 2");
}

ResponseEnsemble to_ensemble(const std::vector<std::vector<double>>& cols, double period) {
    const auto T = static_cast<Eigen::Index>(cols.front().size());
    Eigen::MatrixXd m(T, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k)
        m.col(static_cast<Eigen::Index>(k)) = Eigen::Map<const Eigen::VectorXd>(cols[k].data(), T);
    return ResponseEnsemble(std::move(m), {}, period);
}

}  // namespace

double amplitude_coupling_scale(std::span<const double> driver, std::span<const double> response) {
    auto constant = [](std::span<const double> x) {
        return x.empty() || std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); });
    };
    if (constant(driver) || constant(response))
        throw Error(ErrorCode::ConstantSeries, "amplitude scale needs nonconstant series");
    return rms(response) / rms(driver);
}

std::vector<double> gaussian_smooth(std::span<const double> x, double sigma) {
    const auto n = static_cast<long>(x.size());
    if (n == 0 || !(sigma > 0.0)) return {x.begin(), x.end()};
    const long radius = static_cast<long>(4.0 * sigma + 0.5);
    std::vector<double> w(static_cast<std::size_t>(2 * radius + 1));
    double total = 0.0;
    for (long i = -radius; i <= radius; ++i) {
        const double v = std::exp(-0.5 * (static_cast<double>(i) / sigma) * (static_cast<double>(i) / sigma));
        w[static_cast<std::size_t>(i + radius)] = v;
        total += v;
    }
    for (double& v : w) v /= total;
    // Reflect about the outer edge: (d c b a | a b c d | d c b a).
    auto reflect = [n](long i) {
        const long period = 2 * n;
        i %= period;
        if (i < 0) i += period;
        return i < n ? i : period - 1 - i;
    };
    std::vector<double> out(x.size(), 0.0);
    for (long t = 0; t < n; ++t) {
        double s = 0.0;
        for (long i = -radius; i <= radius; ++i)
            s += w[static_cast<std::size_t>(i + radius)] * x[static_cast<std::size_t>(reflect(t + i))];
        out[static_cast<std::size_t>(t)] = s;
    }
    return out;
}

std::vector<int> quantile_labels(std::span<const double> x, int bins) {
    if (bins < 1) throw Error(ErrorCode::ArgumentRange, "bins must be >= 1");
    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<int> labels(x.size());
    for (std::size_t p = 0; p < order.size(); ++p)
        labels[order[p]] = static_cast<int>(p * static_cast<std::size_t>(bins) / order.size());
    return labels;
}

SkewDataset gen_logistic_skew(LogisticRegime regime, const SkewSystemConfig& cfg) {
    validate(cfg);
    if (cfg.t_points < 100) throw Error(ErrorCode::ArgumentRange, "t_points must be >= 100");
    const auto total = static_cast<std::size_t>(cfg.burn_in + cfg.t_points);
    const double r = logistic_r(regime);

    auto driver_rng = rng_stream(cfg.seed, 0);
    std::uniform_real_distribution<double> init(0.1, 0.9);
    std::vector<double> z(total);
    z[0] = init(driver_rng);
    for (std::size_t n = 1; n < total; ++n) z[n] = r * z[n - 1] * (1.0 - z[n - 1]);

    const auto burn = static_cast<std::size_t>(cfg.burn_in);
    std::vector<std::vector<double>> cols(static_cast<std::size_t>(cfg.n_responses));
    for (std::size_t k = 0; k < cols.size(); ++k) {
        auto rng = rng_stream(cfg.seed, k + 1);
        std::uniform_real_distribution<double> band(cfg.response_r_min, cfg.response_r_max);
        const double rk = band(rng);
        double y = init(rng);
        std::vector<double>& out = cols[k];
        out.reserve(static_cast<std::size_t>(cfg.t_points));
        for (std::size_t n = 0; n < total; ++n) {
            if (n >= burn) out.push_back(y);
            y = (1.0 - cfg.coupling) * rk * y * (1.0 - y) + cfg.coupling * z[n];
            if (!std::isfinite(y) || std::abs(y) > 10.0)
                throw Error(ErrorCode::DivergedTrajectory,
                            "response " + std::to_string(k) + " diverged at step " + std::to_string(n));
        }
        add_noise(out, cfg.snr, rng);
    }

    SkewDataset ds;
    ds.driver_value.assign(z.begin() + static_cast<std::ptrdiff_t>(burn), z.end());
    const int period = logistic_period(regime);
    if (period > 0) {
        const auto P = static_cast<std::size_t>(period);
        const auto first = std::min_element(ds.driver_value.begin(), ds.driver_value.begin() + period);
        const auto anchor = static_cast<std::size_t>(first - ds.driver_value.begin());
        std::vector<int> phase(ds.driver_value.size());
        for (std::size_t n = 0; n < phase.size(); ++n) phase[n] = static_cast<int>((n + P - anchor) % P);
        ds.driver_truth = DriverSignal::discrete(std::move(phase));
    } else {
        ds.driver_truth = DriverSignal::continuous(ds.driver_value);
    }
    ds.responses = to_ensemble(cols, 1.0);
    ds.driver_state = Eigen::Map<const Eigen::VectorXd>(ds.driver_value.data(),
                                                        static_cast<Eigen::Index>(ds.driver_value.size()));
    ds.config = cfg.to_json();
    ds.config["system"] = "logistic";
    ds.config["regime"] = to_string(regime);
    ds.config["driver_r"] = r;
    return ds;
}

Eigen::MatrixXd rossler_trajectory(long samples, double dt, int substeps, std::uint64_t seed, double a, double b,
                                   double c) {
    const Rossler f{a, b, c};
    auto rng = rng_stream(seed, 0);
    std::normal_distribution<double> jitter(0.0, 0.1);
    Eigen::Vector3d s(1.0 + jitter(rng), 1.0 + jitter(rng), jitter(rng));
    s = rk4_integrate(f, 0.0, s, 0.01, 2000);
    const double h = dt / substeps;
    Eigen::MatrixXd out(samples, 3);
    for (long n = 0; n < samples; ++n) {
        out.row(n) = s.transpose();
        s = rk4_integrate(f, 0.0, s, h, substeps);
    }
    return out;
}

namespace {

struct LorenzReference {
    double rms_x = 0.0;
    double period = 0.0;  // of the observed coordinate, Lorenz time units
};

// Decoupled canonical run used for amplitude and timescale matching.
LorenzReference lorenz_reference(const SkewSystemConfig& cfg) {
    const Lorenz f{cfg.lorenz_sigma, cfg.lorenz_rho, cfg.lorenz_beta};
    const double h = 0.01;
    Eigen::Vector3d s(1.0, 1.0, 25.0);
    s = rk4_integrate(f, 0.0, s, h, 5000);
    const long samples = 20000;
    std::vector<double> x(static_cast<std::size_t>(samples)), obs(static_cast<std::size_t>(samples));
    for (long n = 0; n < samples; ++n) {
        x[static_cast<std::size_t>(n)] = s(0);
        obs[static_cast<std::size_t>(n)] = s(cfg.observe);
        s = rk4_step(f, 0.0, s, h);
    }
    return {rms(x), dominant_period(obs, h)};
}

}  // namespace

SkewDataset gen_rossler_lorenz(const SkewSystemConfig& cfg) {
    validate(cfg);
    if (cfg.observe < 0 || cfg.observe > 2) throw Error(ErrorCode::ArgumentRange, "observe must be 0, 1 or 2");
    const int sub = cfg.substeps;
    const double h = cfg.dt / sub;
    const long total = static_cast<long>(cfg.burn_in) + cfg.t_points;
    const long fine = total * sub;

    // Driver sampled on a half-step grid so every RK4 stage of the response sees it exactly.
    const Rossler rossler{cfg.rossler_a, cfg.rossler_b, cfg.rossler_c};
    auto driver_rng = rng_stream(cfg.seed, 0);
    std::normal_distribution<double> start(0.0, 0.1);
    Eigen::Vector3d s(1.0 + start(driver_rng), 1.0 + start(driver_rng), start(driver_rng));
    s = rk4_integrate(rossler, 0.0, s, 0.01, 2000);
    std::vector<double> half(static_cast<std::size_t>(2 * fine + 1));
    Eigen::MatrixXd state(cfg.t_points, 3);
    for (long i = 0; i <= 2 * fine; ++i) {
        if (!s.allFinite()) throw Error(ErrorCode::DivergedTrajectory, "driver diverged");
        half[static_cast<std::size_t>(i)] = s(0);
        if (i % (2 * sub) == 0) {
            const long n = i / (2 * sub);
            if (n >= cfg.burn_in && n < total) state.row(n - cfg.burn_in) = s.transpose();
        }
        if (i < 2 * fine) s = rk4_step(rossler, 0.0, s, 0.5 * h);
    }

    SkewDataset ds;
    ds.driver_state = state;
    ds.driver_value.assign(state.col(0).data(), state.col(0).data() + state.rows());

    const LorenzReference ref = lorenz_reference(cfg);
    const double driver_period = dominant_period(ds.driver_value, cfg.dt);
    const double a_rel = ref.rms_x / rms(ds.driver_value);
    const double tscale = cfg.timescale_ratio * ref.period / driver_period;

    std::vector<std::vector<double>> cols(static_cast<std::size_t>(cfg.n_responses));
    auto replica = [&](std::size_t k) {
        auto rng = rng_stream(cfg.seed, k + 1);
        std::uniform_real_distribution<double> jit(1.0 - cfg.jitter, 1.0 + cfg.jitter);
        const double sigma = cfg.lorenz_sigma * jit(rng);
        const double rho = cfg.lorenz_rho * jit(rng);
        const double beta = cfg.lorenz_beta * jit(rng);
        std::normal_distribution<double> normal;
        Eigen::Vector3d y(normal(rng), normal(rng), 25.0 + normal(rng));
        const double gain = cfg.coupling * a_rel;
        auto field = [&](double drive, const Eigen::Vector3d& v) -> Eigen::Vector3d {
            return tscale * Eigen::Vector3d(sigma * (v(1) - v(0) + gain * drive), v(0) * (rho - v(2)) - v(1),
                                            v(0) * v(1) - beta * v(2));
        };
        std::vector<double>& out = cols[k];
        out.resize(static_cast<std::size_t>(cfg.t_points));
        for (long i = 0; i < fine; ++i) {
            if (i % sub == 0 && i / sub >= cfg.burn_in) out[static_cast<std::size_t>(i / sub - cfg.burn_in)] = y(cfg.observe);
            const double d0 = half[static_cast<std::size_t>(2 * i)];
            const double d1 = half[static_cast<std::size_t>(2 * i + 1)];
            const double d2 = half[static_cast<std::size_t>(2 * i + 2)];
            const Eigen::Vector3d k1 = field(d0, y);
            const Eigen::Vector3d k2 = field(d1, y + 0.5 * h * k1);
            const Eigen::Vector3d k3 = field(d1, y + 0.5 * h * k2);
            const Eigen::Vector3d k4 = field(d2, y + h * k3);
            y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            if (!y.allFinite() || y.cwiseAbs().maxCoeff() > 1e6)
                throw Error(ErrorCode::DivergedTrajectory, "response " + std::to_string(k) + " diverged");
        }
        if (cfg.filter == MeasurementFilter::RandomGaussian) {
            std::uniform_real_distribution<double> width(cfg.filter_min_width, cfg.filter_max_width);
            out = gaussian_smooth(out, 0.5 * width(rng));
        }
        add_noise(out, cfg.snr, rng);
    };
    parallel_for(cols.size(), resolve_threads(0), replica);

    ds.driver_truth = DriverSignal::continuous(ds.driver_value);
    ds.responses = to_ensemble(cols, cfg.dt);
    ds.config = cfg.to_json();
    ds.config["system"] = "rossler-lorenz";
    ds.config["amplitude_scale"] = a_rel;
    ds.config["timescale"] = tscale;
    ds.config["driver_period"] = driver_period;
    ds.config["response_period"] = ref.period;
    return ds;
}

SkewDataset gen_double_gyre(const SkewSystemConfig& cfg) {
    validate(cfg);
    const int sub = cfg.substeps;
    const double h = cfg.dt / sub;
    const long total = static_cast<long>(cfg.burn_in) + cfg.t_points;
    const DoubleGyre flow{cfg.gyre_A, cfg.gyre_eps, cfg.gyre_omega};
    // Brownian diffusivity tied to the flow's velocity scale pi * A.
    const double kappa = std::isinf(cfg.snr) ? 0.0 : std::numbers::pi * cfg.gyre_A / (100.0 * cfg.snr);
    const double step_sd = std::sqrt(2.0 * kappa * h);

    std::vector<std::vector<double>> cols(static_cast<std::size_t>(cfg.n_responses));
    auto tracer = [&](std::size_t k) {
        auto rng = rng_stream(cfg.seed, k + 1);
        std::uniform_real_distribution<double> ux(0.0, 2.0), uy(0.0, 1.0);
        std::normal_distribution<double> normal;
        Eigen::Vector2d p(ux(rng), uy(rng));
        std::vector<double>& out = cols[k];
        out.resize(static_cast<std::size_t>(cfg.t_points));
        auto fold = [](double v, double hi) {
            for (int guard = 0; guard < 8 && (v < 0.0 || v > hi); ++guard) v = v < 0.0 ? -v : 2.0 * hi - v;
            return std::clamp(v, 0.0, hi);
        };
        for (long n = 0; n < total; ++n) {
            if (n >= cfg.burn_in) out[static_cast<std::size_t>(n - cfg.burn_in)] = std::hypot(p(0) - 1.0, p(1) - 0.5);
            for (int s = 0; s < sub; ++s) {
                const double t = static_cast<double>(n) * cfg.dt + s * h;
                p = rk4_step(flow, t, p, h);
                if (kappa > 0.0) {
                    p(0) += step_sd * normal(rng);
                    p(1) += step_sd * normal(rng);
                }
                p(0) = fold(p(0), 2.0);
                p(1) = fold(p(1), 1.0);
            }
        }
    };
    parallel_for(cols.size(), resolve_threads(0), tracer);

    SkewDataset ds;
    ds.driver_value.resize(static_cast<std::size_t>(cfg.t_points));
    ds.driver_state.resize(cfg.t_points, 2);
    for (long n = 0; n < cfg.t_points; ++n) {
        const double t = static_cast<double>(n + cfg.burn_in) * cfg.dt;
        ds.driver_value[static_cast<std::size_t>(n)] = std::sin(cfg.gyre_omega * t);
        ds.driver_state(n, 0) = std::sin(cfg.gyre_omega * t);
        ds.driver_state(n, 1) = std::cos(cfg.gyre_omega * t);
    }
    ds.driver_truth = DriverSignal::continuous(ds.driver_value);
    ds.responses = to_ensemble(cols, cfg.dt);
    ds.config = cfg.to_json();
    ds.config["system"] = "double-gyre";
    ds.config["diffusivity"] = kappa;
    return ds;
}

SkewDataset simulate(const SkewSystemConfig& cfg) {
    if (cfg.system == "rossler-lorenz") return gen_rossler_lorenz(cfg);
    if (cfg.system == "logistic") return gen_logistic_skew(cfg.regime, cfg);
    if (cfg.system == "double-gyre") return gen_double_gyre(cfg);
    throw Error(ErrorCode::ArgumentRange, "unknown system '" + cfg.system + "'");
}

}  // namespace shdr
