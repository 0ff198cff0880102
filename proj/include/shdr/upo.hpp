#pragma once

#include <vector>

#include <Eigen/Dense>

#include "shdr/timeseries.hpp"

namespace shdr {

struct PeriodicOrbit {
    Eigen::MatrixXd points;     // one cycle, period_samples x d, sampled at dt
    int period_samples = 0;
    double recurrence_gap = 0.0;
    double shadow_fraction = 0.0;
    double dt = 1.0;
    Eigen::Index start = 0;     // trajectory index the cycle was cut from

    double period() const { return period_samples * dt; }
};

struct UpoOptions {
    int max_period = 0;    // samples; 0 = 5 x dominant FFT period
    double eps = 0.0;      // 0 = 0.05 x trajectory rms
    int n_orbits = 3;
    double dt = 1.0;
};

/// Trajectory rms about its mean, sqrt(mean ||x - mean||^2).
double trajectory_rms(const Eigen::MatrixXd& traj);

/// Closest-recurrence orbit extraction. Candidates are segments whose end
/// returns within eps of their start after first leaving a 4 eps ball; they
/// are grouped by Hausdorff distance below eps and each group keeps its
/// tightest segment. Orbits are ranked by shadowing fraction (ties: shorter
/// period). Throws NoOrbitsFound if nothing recurs.
std::vector<PeriodicOrbit> find_upos(const Eigen::MatrixXd& traj, const UpoOptions& options);

/// Fraction of trajectory points lying within eps of the orbit during
/// phase-coherent runs that last at least one period.
double shadow_fraction(const Eigen::MatrixXd& traj, const PeriodicOrbit& orbit, double eps);

/// Symmetric Hausdorff distance between two point sets (rows).
double hausdorff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Closed curve resampled to n points equally spaced in arc length, starting at row 0.
Eigen::MatrixXd resample_closed_curve(const Eigen::MatrixXd& points, int n);

/// Pairwise Euclidean distances of the arc-length resampled orbit.
Eigen::MatrixXd orbit_distance_matrix(const PeriodicOrbit& orbit, int n_points);

/// Pairwise Euclidean distances between rows.
Eigen::MatrixXd euclidean_distance_matrix(const Eigen::MatrixXd& points);

/// Correlates the reconstruction's distance matrix with each orbit's. A
/// contiguous block of min(length, max_points) reconstruction samples is
/// compared against the orbit traversed periodically at the reconstruction's
/// sampling interval, taking the best starting phase. Single-mode
/// reconstructions are delay-lifted first.
std::vector<double> orbit_reconstruction_correlation(const DriverSignal& recon, double recon_dt,
                                                     const std::vector<PeriodicOrbit>& orbits,
                                                     int max_points = 500);

}  // namespace shdr
