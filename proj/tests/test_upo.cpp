#include <cmath>
#include <numbers>
#include <random>

#include <doctest.h>

#include "shdr/error.hpp"
#include "shdr/skew_systems.hpp"
#include "shdr/upo.hpp"
#include "test_util.hpp"

using namespace shdr;
using testutil::error_code_of;

namespace {

// Limit cycle of period `period` samples with a little shape so it is not a circle.
Eigen::MatrixXd limit_cycle(int samples, double period) {
    Eigen::MatrixXd x(samples, 2);
    for (int i = 0; i < samples; ++i) {
        const double s = 2 * std::numbers::pi * i / period;
        x(i, 0) = std::cos(s) + 0.2 * std::cos(2 * s);
        x(i, 1) = std::sin(s);
    }
    return x;
}

Eigen::Matrix3d rotation(double a, double b) {
    Eigen::Matrix3d rz, rx;
    rz << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
    rx << 1, 0, 0, 0, std::cos(b), -std::sin(b), 0, std::sin(b), std::cos(b);
    return rz * rx;
}

}  // namespace

TEST_CASE("limit cycle yields one orbit that shadows everything") {
    const auto traj = limit_cycle(2000, 50.0);
    UpoOptions o;
    o.max_period = 120;
    const auto orbits = find_upos(traj, o);
    REQUIRE(orbits.size() == 1);
    CHECK(std::abs(orbits[0].period_samples - 50) <= 1);
    CHECK(orbits[0].shadow_fraction == doctest::Approx(1.0).epsilon(0.02));
    CHECK(orbits[0].recurrence_gap <= 0.05 * trajectory_rms(traj));
}

TEST_CASE("white noise has no recurrences at a tight tolerance") {
    std::mt19937_64 rng(31);
    std::normal_distribution<double> n;
    Eigen::MatrixXd traj(1500, 3);
    for (Eigen::Index i = 0; i < traj.rows(); ++i)
        for (int c = 0; c < 3; ++c) traj(i, c) = n(rng);
    UpoOptions o;
    o.max_period = 100;
    o.eps = 1e-3;
    CHECK(error_code_of([&] { find_upos(traj, o); }) == ErrorCode::NoOrbitsFound);
}

TEST_CASE("short trajectories are rejected") {
    UpoOptions o;
    o.max_period = 100;
    CHECK(error_code_of([&] { find_upos(limit_cycle(250, 50.0), o); }) == ErrorCode::ArgumentRange);
}

TEST_CASE("Rossler period-one orbit lasts about six time units") {
    const auto traj = rossler_trajectory(100000, 0.05, 5, 1);
    UpoOptions o;
    o.dt = 0.05;
    const auto orbits = find_upos(traj, o);
    REQUIRE(!orbits.empty());
    double shortest = orbits[0].period();
    for (const auto& orb : orbits) {
        shortest = std::min(shortest, orb.period());
        CHECK(orb.recurrence_gap <= 0.05 * trajectory_rms(traj));
        CHECK(orb.shadow_fraction >= 0.0);
        CHECK(orb.shadow_fraction <= 1.0);
    }
    CHECK(shortest >= 5.8);
    CHECK(shortest <= 6.2);
    for (std::size_t i = 1; i < orbits.size(); ++i) {
        const bool ordered = orbits[i - 1].shadow_fraction > orbits[i].shadow_fraction ||
                             (orbits[i - 1].shadow_fraction == orbits[i].shadow_fraction &&
                              orbits[i - 1].period_samples <= orbits[i].period_samples);
        CHECK(ordered);
    }
}

TEST_CASE("circle resampled to four points is a square") {
    PeriodicOrbit orb;
    orb.points = limit_cycle(97, 97.0);
    for (Eigen::Index i = 0; i < orb.points.rows(); ++i) {
        const double s = 2 * std::numbers::pi * static_cast<double>(i) / 97.0;
        orb.points(i, 0) = std::cos(s);
    }
    orb.period_samples = 97;
    const auto d = orbit_distance_matrix(orb, 4);
    REQUIRE(d.rows() == 4);
    const double side = d(0, 1);
    CHECK(d(1, 2) == doctest::Approx(side).epsilon(1e-3));
    CHECK(d(2, 3) == doctest::Approx(side).epsilon(1e-3));
    CHECK(d(3, 0) == doctest::Approx(side).epsilon(1e-3));
    CHECK(d(0, 2) == doctest::Approx(std::sqrt(2.0) * side).epsilon(1e-3));
    CHECK(d(1, 3) == doctest::Approx(std::sqrt(2.0) * side).epsilon(1e-3));
}

TEST_CASE("orbit distance matrix is symmetric and rigid-motion invariant") {
    const auto traj = rossler_trajectory(3000, 0.05, 5, 2);
    PeriodicOrbit orb;
    orb.points = traj.topRows(117);
    orb.period_samples = 117;
    const auto d = orbit_distance_matrix(orb, 80);
    CHECK(d.diagonal().cwiseAbs().maxCoeff() == 0.0);
    CHECK((d - d.transpose()).cwiseAbs().maxCoeff() == 0.0);
    PeriodicOrbit moved = orb;
    const Eigen::Matrix3d r = rotation(0.7, -1.3);
    moved.points = (orb.points * r.transpose()).rowwise() + Eigen::RowVector3d(3.0, -2.0, 5.0);
    CHECK((orbit_distance_matrix(moved, 80) - d).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("Hausdorff distance") {
    Eigen::MatrixXd a(2, 1), b(3, 1);
    a << 0, 1;
    b << 0, 1, 3;
    CHECK(hausdorff(a, b) == doctest::Approx(2.0));
    CHECK(hausdorff(a, a) == 0.0);
}

TEST_CASE("reconstruction equal to the orbit correlates perfectly") {
    const int period = 60;
    const auto cycle = limit_cycle(period, period);
    PeriodicOrbit orb;
    orb.points = cycle;
    orb.period_samples = period;
    const auto traj = limit_cycle(600, period);
    const auto recon = DriverSignal::continuous_modes(traj);
    const auto r = orbit_reconstruction_correlation(recon, 1.0, {orb});
    REQUIRE(r.size() == 1);
    CHECK(r[0] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("noise does not correlate with an orbit") {
    const auto traj = rossler_trajectory(20000, 0.05, 5, 3);
    UpoOptions o;
    o.dt = 0.05;
    o.n_orbits = 1;
    const auto orbits = find_upos(traj, o);
    std::mt19937_64 rng(32);
    std::normal_distribution<double> n;
    Eigen::MatrixXd noise(600, 3);
    for (Eigen::Index i = 0; i < noise.rows(); ++i)
        for (int c = 0; c < 3; ++c) noise(i, c) = n(rng);
    const auto r = orbit_reconstruction_correlation(DriverSignal::continuous_modes(noise), 0.05, orbits);
    CHECK(std::abs(r[0]) < 0.2);
}
