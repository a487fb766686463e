#include "gdnlab/invariants.hpp"

#include <cmath>
#include <stdexcept>

namespace gdnlab {

namespace {

double abs2_pow_sigma(const cdouble& z, double sigma) {
    const double m2 = std::norm(z);
    if (m2 == 0.0)
        return 0.0;
    if (sigma == 1.0)
        return m2;
    if (sigma == 1.5)
        return m2 * std::sqrt(m2);
    if (sigma == 2.0)
        return m2 * m2;
    return std::pow(m2, sigma);
}

} // namespace

double mass(const Field& f) {
    double acc = 0.0;
    for (const auto& z : f.samples)
        acc += std::norm(z);
    return acc * f.grid.dx();
}

double energy(const Field& f, double sigma) {
    if (!(sigma > 0.0))
        throw std::invalid_argument("energy: sigma must be positive");

    const Field ux = derivative(f, 1);
    const double a = (2.0 * sigma + 1.0) / (sigma + 1.0);
    const double b = 1.0 / (sigma + 1.0);

    double acc = 0.0;
    for (std::size_t i = 0; i < f.grid.n; ++i) {
        const cdouble u = f.samples[i];
        const cdouble du = ux.samples[i];
        const double g = abs2_pow_sigma(u, sigma);
        acc += std::norm(du) + a * g * std::imag(du * std::conj(u)) + b * g * g * std::norm(u);
    }
    return acc * f.grid.dx();
}

Field rescale(const Field& f, double lambda, double sigma) {
    if (!(sigma > 0.0))
        throw std::invalid_argument("rescale: sigma must be positive");
    if (!(lambda > 0.0))
        throw std::invalid_argument("rescale: lambda must be positive");
    if (lambda < 1.0)
        throw std::invalid_argument(
            "rescale: lambda < 1 would stretch the data below the grid resolution");

    Grid1D target(f.grid.n, f.grid.length / lambda, f.grid.origin / lambda);
    Field out(target, lambda * lambda * f.time);
    const double amp = std::pow(lambda, 1.0 / (2.0 * sigma));
    for (std::size_t i = 0; i < f.grid.n; ++i)
        out.samples[i] = amp * f.samples[i];
    return out;
}

double scaling_critical_index(double sigma) {
    if (!(sigma > 0.0))
        throw std::invalid_argument("scaling_critical_index: sigma must be positive");
    return 0.5 - 0.5 / sigma;
}

ConservedReport conserved_report(const Field& f, double sigma,
                                 double mass0, double energy0) {
    ConservedReport r;
    r.time = f.time;
    r.mass = mass(f);
    r.energy = energy(f, sigma);
    r.relative_mass_drift = mass0 != 0.0 ? (r.mass - mass0) / mass0 : r.mass;
    r.relative_energy_drift = energy0 != 0.0 ? (r.energy - energy0) / energy0 : r.energy;
    return r;
}

} // namespace gdnlab
