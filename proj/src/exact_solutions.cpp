#include "gdnlab/exact_solutions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gdnlab {

namespace {

cdouble polar_unit(double phase) { return {std::cos(phase), std::sin(phase)}; }

// Clamp hyperbolic arguments so cosh/exp never overflow; beyond ~700 the
// amplitude has long since underflowed to zero anyway.
constexpr double kArgCap = 700.0;

struct SolitonEval {
    double amplitude;
    double phase; // (c/2) y - mu * int_{-inf}^y phi^{2s}
};

double mu_for(const SolitonParams& p, SolitonGauge gauge) {
    return gauge == SolitonGauge::divergence ? (2.0 * p.sigma + 1.0) / (2.0 * p.sigma + 2.0)
                                             : 1.0 / (2.0 * p.sigma + 2.0);
}

SolitonEval evaluate_soliton(const SolitonParams& p, double y, double mu) {
    const double beta = 4.0 * p.omega - p.c * p.c;
    const double root_w = std::sqrt(p.omega);
    const double root_beta = std::sqrt(beta);
    const double k = p.sigma * root_beta;

    const double denom = 2.0 * root_w * std::cosh(std::min(std::fabs(k * y), kArgCap)) - p.c;
    const double amp = std::pow((p.sigma + 1.0) * beta / denom, 1.0 / (2.0 * p.sigma));

    const double t = std::exp(std::clamp(k * y, -kArgCap, kArgCap));
    const double cumulative = (2.0 * (p.sigma + 1.0) / p.sigma) *
                              (std::atan((2.0 * root_w * t - p.c) / root_beta) -
                               std::atan(-p.c / root_beta));

    return {amp, 0.5 * p.c * y - mu * cumulative};
}

void check_grid_wide_enough(const SolitonParams& p, double shift, const Grid1D& grid) {
    const double peak = soliton_amplitude(p, 0.0);
    const double left = soliton_amplitude(p, grid.x(0) - shift);
    const double right = soliton_amplitude(p, grid.x(grid.n - 1) - shift);
    if (left > 1e-12 * peak || right > 1e-12 * peak)
        throw std::invalid_argument(
            "soliton_field: grid too narrow, amplitude at the box edge exceeds 1e-12 of the peak");
}

} // namespace

SolitonParams::SolitonParams(double sigma_, double omega_, double c_)
    : sigma(sigma_), omega(omega_), c(c_) {
    if (!(sigma > 0.0))
        throw std::invalid_argument("SolitonParams: sigma must be positive");
    if (!(omega > 0.0))
        throw std::invalid_argument("SolitonParams: omega must be positive");
    if (!(c * c < 4.0 * omega))
        throw std::invalid_argument("SolitonParams: requires c^2 < 4*omega");
}

Field free_propagate(const Field& f, double dt) {
    Spectrum s = to_spectrum(f);
    for (std::size_t j = 0; j < s.grid.n; ++j) {
        const double xi = s.grid.xi(j);
        s.coefficients[j] *= polar_unit(-xi * xi * dt);
    }
    s.time += dt;
    return from_spectrum(s);
}

Field gaussian_exact(double a, double t, const Grid1D& grid) {
    if (!(a > 0.0))
        throw std::invalid_argument("gaussian_exact: a must be positive");

    const cdouble denom(1.0, 4.0 * a * t);
    const cdouble prefactor = 1.0 / std::sqrt(denom);
    Field f(grid, t);
    for (std::size_t i = 0; i < grid.n; ++i) {
        const double x = grid.x(i);
        f.samples[i] = prefactor * std::exp(-a * x * x / denom);
    }
    return f;
}

double soliton_amplitude(const SolitonParams& p, double x) {
    return evaluate_soliton(p, x, 0.0).amplitude;
}

double soliton_phase_integral(const SolitonParams& p, double y) {
    const double beta = 4.0 * p.omega - p.c * p.c;
    const double k = p.sigma * std::sqrt(beta);
    const double t = std::exp(std::clamp(k * y, -kArgCap, kArgCap));
    return (2.0 * (p.sigma + 1.0) / p.sigma) *
           (std::atan((2.0 * std::sqrt(p.omega) * t - p.c) / std::sqrt(beta)) -
            std::atan(-p.c / std::sqrt(beta)));
}

Field soliton_field(const SolitonParams& p, const Grid1D& grid, SolitonGauge gauge) {
    check_grid_wide_enough(p, 0.0, grid);
    const double mu = mu_for(p, gauge);

    Field f(grid, 0.0);
    for (std::size_t i = 0; i < grid.n; ++i) {
        const SolitonEval e = evaluate_soliton(p, grid.x(i), mu);
        f.samples[i] = e.amplitude * polar_unit(e.phase);
    }
    return f;
}

Field soliton_orbit(const SolitonParams& p, double t, const Grid1D& grid, SolitonGauge gauge) {
    const double shift = p.c * t;
    check_grid_wide_enough(p, shift, grid);
    const double mu = mu_for(p, gauge);

    Field f(grid, t);
    for (std::size_t i = 0; i < grid.n; ++i) {
        const SolitonEval e = evaluate_soliton(p, grid.x(i) - shift, mu);
        f.samples[i] = e.amplitude * polar_unit(e.phase + p.omega * t);
    }
    return f;
}

} // namespace gdnlab
