#include "shdr/upo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "shdr/dynamics.hpp"
#include "shdr/embedding.hpp"
#include "shdr/error.hpp"
#include "shdr/metrics.hpp"

namespace shdr {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

double dist(const RowMatrix& x, Eigen::Index a, Eigen::Index b) { return (x.row(a) - x.row(b)).norm(); }

struct Candidate {
    Eigen::Index start;
    int period;
    double gap;
};

// Smallest period P at which the orbit from t has left the 4 eps ball and
// returns to a local minimum of the closure gap no larger than eps.
bool first_return(const RowMatrix& x, Eigen::Index t, int max_period, double eps, Candidate& out) {
    bool exited = false;
    for (int p = 1; p <= max_period; ++p) {
        const double g = dist(x, t, t + p);
        if (!exited) {
            exited = g > 4.0 * eps;
            continue;
        }
        if (g > eps) continue;
        const double prev = dist(x, t, t + p - 1);
        const double next = dist(x, t, t + p + 1);
        if (g <= prev && g <= next) {
            out = {t, p, g};
            return true;
        }
    }
    return false;
}

}  // namespace

double trajectory_rms(const Eigen::MatrixXd& traj) {
    const Eigen::RowVectorXd mean = traj.colwise().mean();
    return std::sqrt((traj.rowwise() - mean).rowwise().squaredNorm().mean());
}

double hausdorff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    auto directed = [](const Eigen::MatrixXd& p, const Eigen::MatrixXd& q) {
        double worst = 0.0;
        for (Eigen::Index i = 0; i < p.rows(); ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (Eigen::Index j = 0; j < q.rows() && best > worst; ++j)
                best = std::min(best, (p.row(i) - q.row(j)).squaredNorm());
            worst = std::max(worst, best);
        }
        return std::sqrt(worst);
    };
    return std::max(directed(a, b), directed(b, a));
}

double shadow_fraction(const Eigen::MatrixXd& traj, const PeriodicOrbit& orbit, double eps) {
    const Eigen::Index T = traj.rows();
    const Eigen::Index P = orbit.points.rows();
    if (T == 0 || P == 0) return 0.0;
    const RowMatrix x = traj;
    const RowMatrix o = orbit.points;
    const double eps2 = eps * eps;
    const Eigen::Index window = std::max<Eigen::Index>(2, P / 10);

    auto nearest_full = [&](Eigen::Index s, double& d2) {
        Eigen::Index best = 0;
        d2 = std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < P; ++j) {
            const double v = (x.row(s) - o.row(j)).squaredNorm();
            if (v < d2) { d2 = v; best = j; }
        }
        return best;
    };

    Eigen::Index counted = 0;
    Eigen::Index run = 0;
    Eigen::Index phase = -1;
    for (Eigen::Index s = 0; s < T; ++s) {
        bool continued = false;
        if (phase >= 0) {
            // Look for the next orbit point near the expected phase advance of one sample.
            double best = std::numeric_limits<double>::infinity();
            Eigen::Index arg = -1;
            for (Eigen::Index w = -window; w <= window; ++w) {
                const Eigen::Index j = ((phase + 1 + w) % P + P) % P;
                const double v = (x.row(s) - o.row(j)).squaredNorm();
                if (v < best) { best = v; arg = j; }
            }
            if (best <= eps2) {
                phase = arg;
                ++run;
                continued = true;
            }
        }
        if (!continued) {
            if (run >= P) counted += run;
            run = 0;
            double d2 = 0.0;
            const Eigen::Index j = nearest_full(s, d2);
            if (d2 <= eps2) {
                phase = j;
                run = 1;
            } else {
                phase = -1;
            }
        }
    }
    if (run >= P) counted += run;
    return static_cast<double>(counted) / static_cast<double>(T);
}

std::vector<PeriodicOrbit> find_upos(const Eigen::MatrixXd& traj, const UpoOptions& options) {
    const Eigen::Index T = traj.rows();
    if (T < 8 || traj.cols() < 1) throw Error(ErrorCode::ShortSeries, "trajectory too short");
    if (!(options.dt > 0.0)) throw Error(ErrorCode::ArgumentRange, "dt must be > 0");
    int max_period = options.max_period;
    if (max_period <= 0) {
        std::vector<double> first(traj.col(0).data(), traj.col(0).data() + T);
        const double period = dominant_period(first, 1.0);
        max_period = static_cast<int>(std::ceil(5.0 * period));
    }
    if (static_cast<Eigen::Index>(3) * max_period > T)
        throw Error(ErrorCode::ArgumentRange, "trajectory length must be >= 3 * max_period");
    const double eps = options.eps > 0.0 ? options.eps : 0.05 * trajectory_rms(traj);
    if (!(eps > 0.0)) throw Error(ErrorCode::ArgumentRange, "eps must be > 0");

    const RowMatrix x = traj;
    std::vector<Candidate> raw(static_cast<std::size_t>(T), Candidate{-1, 0, 0.0});
    for (Eigen::Index t = 0; t + max_period + 1 < T; ++t) {
        Candidate c{};
        if (first_return(x, t, max_period, eps, c)) raw[static_cast<std::size_t>(t)] = c;
    }
    // Neighbouring starts trace the same passage; keep local minima of the gap along t.
    std::vector<Candidate> candidates;
    for (std::size_t t = 0; t < raw.size(); ++t) {
        const Candidate& c = raw[t];
        if (c.start < 0) continue;
        auto no_better = [&](std::size_t u) {
            return u >= raw.size() || raw[u].start < 0 || raw[u].period != c.period || raw[u].gap >= c.gap;
        };
        const bool left_ok = t == 0 || raw[t - 1].start < 0 || raw[t - 1].period != c.period || raw[t - 1].gap > c.gap;
        if (left_ok && no_better(t + 1)) candidates.push_back(c);
    }
    if (candidates.empty())
        throw Error(ErrorCode::NoOrbitsFound, "no closest recurrences within eps; try a larger eps");

    std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        return a.gap < b.gap || (a.gap == b.gap && a.period < b.period);
    });

    std::vector<PeriodicOrbit> leaders;
    for (const Candidate& c : candidates) {
        const Eigen::MatrixXd seg = traj.middleRows(c.start, c.period);
        bool absorbed = false;
        for (const PeriodicOrbit& lead : leaders) {
            // Cheap rejection first: the segment's start must lie near the leader's curve.
            double near = std::numeric_limits<double>::infinity();
            for (Eigen::Index j = 0; j < lead.points.rows(); ++j)
                near = std::min(near, (seg.row(0) - lead.points.row(j)).norm());
            if (near >= eps) continue;
            if (hausdorff(seg, lead.points) < eps) {
                absorbed = true;
                break;
            }
        }
        if (absorbed) continue;
        PeriodicOrbit o;
        o.points = seg;
        o.period_samples = c.period;
        o.recurrence_gap = c.gap;
        o.dt = options.dt;
        o.start = c.start;
        leaders.push_back(std::move(o));
    }

    for (PeriodicOrbit& o : leaders) o.shadow_fraction = shadow_fraction(traj, o, eps);
    std::stable_sort(leaders.begin(), leaders.end(), [](const PeriodicOrbit& a, const PeriodicOrbit& b) {
        return a.shadow_fraction > b.shadow_fraction ||
               (a.shadow_fraction == b.shadow_fraction && a.period_samples < b.period_samples);
    });
    if (options.n_orbits > 0 && leaders.size() > static_cast<std::size_t>(options.n_orbits))
        leaders.resize(static_cast<std::size_t>(options.n_orbits));
    for (const PeriodicOrbit& o : leaders)
        if (o.recurrence_gap > eps) throw Error(ErrorCode::ConvergenceFailure, "orbit gap exceeds eps");
    return leaders;
}

Eigen::MatrixXd resample_closed_curve(const Eigen::MatrixXd& points, int n) {
    const Eigen::Index P = points.rows();
    if (P < 1) throw Error(ErrorCode::EmptyInput, "empty orbit");
    std::vector<double> cum(static_cast<std::size_t>(P) + 1, 0.0);
    for (Eigen::Index i = 0; i < P; ++i)
        cum[static_cast<std::size_t>(i) + 1] =
            cum[static_cast<std::size_t>(i)] + (points.row((i + 1) % P) - points.row(i)).norm();
    const double length = cum.back();
    Eigen::MatrixXd out(n, points.cols());
    if (!(length > 0.0)) {
        for (int k = 0; k < n; ++k) out.row(k) = points.row(0);
        return out;
    }
    std::size_t seg = 0;
    for (int k = 0; k < n; ++k) {
        const double s = length * k / n;
        while (seg + 1 < static_cast<std::size_t>(P) && cum[seg + 1] <= s) ++seg;
        const double span = cum[seg + 1] - cum[seg];
        const double frac = span > 0.0 ? (s - cum[seg]) / span : 0.0;
        const auto a = static_cast<Eigen::Index>(seg);
        out.row(k) = (1.0 - frac) * points.row(a) + frac * points.row((a + 1) % P);
    }
    return out;
}

Eigen::MatrixXd euclidean_distance_matrix(const Eigen::MatrixXd& points) {
    const Eigen::Index n = points.rows();
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index j = 1; j < n; ++j)
        for (Eigen::Index i = 0; i < j; ++i) d(i, j) = d(j, i) = (points.row(i) - points.row(j)).norm();
    return d;
}

Eigen::MatrixXd orbit_distance_matrix(const PeriodicOrbit& orbit, int n_points) {
    if (n_points < 4) throw Error(ErrorCode::ArgumentRange, "n_points must be >= 4");
    return euclidean_distance_matrix(resample_closed_curve(orbit.points, n_points));
}

namespace {

// Orbit position at time t (orbit time units), periodic, linear between samples.
Eigen::RowVectorXd orbit_at(const PeriodicOrbit& orbit, double t) {
    const double P = static_cast<double>(orbit.points.rows());
    double u = std::fmod(t / orbit.dt, P);
    if (u < 0.0) u += P;
    const auto i = static_cast<Eigen::Index>(std::floor(u));
    const double frac = u - static_cast<double>(i);
    const Eigen::Index a = i % orbit.points.rows();
    const Eigen::Index b = (a + 1) % orbit.points.rows();
    return (1.0 - frac) * orbit.points.row(a) + frac * orbit.points.row(b);
}

Eigen::MatrixXd lift_reconstruction(const DriverSignal& recon) {
    if (recon.values.cols() > 1) return recon.values;
    const std::vector<double> v(recon.values.data(), recon.values.data() + recon.values.rows());
    Eigen::MatrixXd col = recon.values;
    const ResponseEnsemble single(col);
    const auto T = static_cast<int>(v.size());
    const EmbeddingChoice choice = choose_embedding(single, std::min(100, T / 4), 6);
    return embed(v, choice.params).points;
}

}  // namespace

std::vector<double> orbit_reconstruction_correlation(const DriverSignal& recon, double recon_dt,
                                                     const std::vector<PeriodicOrbit>& orbits, int max_points) {
    if (recon.mode != DriverMode::Continuous) throw Error(ErrorCode::ArgumentRange, "continuous reconstruction required");
    if (recon.values.rows() < 100) throw Error(ErrorCode::ShortSeries, "reconstruction must have >= 100 samples");
    if (!(recon_dt > 0.0)) throw Error(ErrorCode::ArgumentRange, "recon_dt must be > 0");
    const Eigen::MatrixXd lifted = lift_reconstruction(recon);
    const Eigen::Index n = std::min<Eigen::Index>(lifted.rows(), max_points);
    const Eigen::MatrixXd recon_d = euclidean_distance_matrix(lifted.topRows(n));

    std::vector<double> out;
    out.reserve(orbits.size());
    for (const PeriodicOrbit& orbit : orbits) {
        const double period = orbit.period();
        const int phases = std::min(orbit.period_samples, 64);
        double best = -std::numeric_limits<double>::infinity();
        for (int ph = 0; ph < phases; ++ph) {
            const double t0 = period * ph / phases;
            Eigen::MatrixXd tiled(n, orbit.points.cols());
            for (Eigen::Index i = 0; i < n; ++i) tiled.row(i) = orbit_at(orbit, t0 + static_cast<double>(i) * recon_dt);
            best = std::max(best, distmat_pearson(recon_d, euclidean_distance_matrix(tiled)));
        }
        out.push_back(best);
    }
    return out;
}

}  // namespace shdr
