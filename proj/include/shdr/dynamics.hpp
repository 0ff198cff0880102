#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace shdr {

/// One classical fourth-order Runge-Kutta step of dx/dt = f(t, x).
template <typename Vec, typename F>
Vec rk4_step(const F& f, double t, const Vec& x, double h) {
    const Vec k1 = f(t, x);
    const Vec k2 = f(t + 0.5 * h, Vec(x + 0.5 * h * k1));
    const Vec k3 = f(t + 0.5 * h, Vec(x + 0.5 * h * k2));
    const Vec k4 = f(t + h, Vec(x + h * k3));
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Integrates from t0 over `steps` steps of size h and returns the end state.
template <typename Vec, typename F>
Vec rk4_integrate(const F& f, double t0, Vec x, double h, long steps) {
    for (long s = 0; s < steps; ++s) x = rk4_step(f, t0 + static_cast<double>(s) * h, x, h);
    return x;
}

struct Rossler {
    double a = 0.2, b = 0.2, c = 5.7;
    Eigen::Vector3d operator()(double, const Eigen::Vector3d& s) const {
        return {-s(1) - s(2), s(0) + a * s(1), b + s(2) * (s(0) - c)};
    }
};

struct Lorenz {
    double sigma = 10.0, rho = 28.0, beta = 8.0 / 3.0;
    Eigen::Vector3d operator()(double, const Eigen::Vector3d& s) const {
        return {sigma * (s(1) - s(0)), s(0) * (rho - s(2)) - s(1), s(0) * s(1) - beta * s(2)};
    }
};

/// Time-periodic double gyre on [0,2] x [0,1].
struct DoubleGyre {
    double A = 0.1, eps = 0.25, omega = 2.0 * std::numbers::pi / 10.0;
    Eigen::Vector2d operator()(double t, const Eigen::Vector2d& p) const {
        const double s = eps * std::sin(omega * t);
        const double a = s;
        const double b = 1.0 - 2.0 * s;
        const double f = a * p(0) * p(0) + b * p(0);
        const double df = 2.0 * a * p(0) + b;
        const double pi = std::numbers::pi;
        return {-pi * A * std::sin(pi * f) * std::cos(pi * p(1)),
                pi * A * std::cos(pi * f) * std::sin(pi * p(1)) * df};
    }
};

/// Largest Lyapunov exponent by two-trajectory renormalization (Benettin).
template <typename Vec, typename F>
double largest_lyapunov(const F& f, Vec x, double h, long transient_steps, long steps, long renorm_every = 10,
                        double d0 = 1e-8) {
    x = rk4_integrate(f, 0.0, x, h, transient_steps);
    Vec y = x;
    y(0) += d0;
    double log_sum = 0.0;
    long blocks = 0;
    double t = 0.0;
    for (long s = 0; s < steps; ++s) {
        x = rk4_step(f, t, x, h);
        y = rk4_step(f, t, y, h);
        t += h;
        if ((s + 1) % renorm_every == 0) {
            const double d = (y - x).norm();
            log_sum += std::log(d / d0);
            y = x + (d0 / d) * (y - x);
            ++blocks;
        }
    }
    return log_sum / (static_cast<double>(blocks * renorm_every) * h);
}

/// Period (in time units) of the strongest nonzero-frequency peak of the
/// periodogram, with parabolic refinement around the peak bin.
double dominant_period(std::span<const double> x, double dt);

/// Power spectrum |X_k|^2 for k = 0..n/2 of the mean-removed series.
std::vector<double> power_spectrum(std::span<const double> x);

}  // namespace shdr
