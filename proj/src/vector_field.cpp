#include "gdnlab/vector_field.hpp"

#include "gdnlab/norms.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace gdnlab {

namespace {

double abs2_pow(double m2, double expo) {
    return m2 == 0.0 ? 0.0 : std::pow(m2, expo);
}

// |u|^{2s-2} u^2, continued by 0 at u = 0 (magnitude |u|^{2s}).
cdouble chiral_weight(const cdouble& u, double sigma) {
    const double m2 = std::norm(u);
    if (m2 == 0.0)
        return {0.0, 0.0};
    return abs2_pow(m2, sigma - 1.0) * u * u;
}

} // namespace

Field apply_L(const Field& f, double tail_fraction, double tail_tol) {
    if (edge_mass_fraction(f, tail_fraction) > tail_tol)
        throw std::domain_error(
            "apply_L: mass near the box edge; x-multiplication would be truncated");

    const Field ux = derivative(f, 1);
    Field out(f.grid, f.time);
    const cdouble two_it(0.0, 2.0 * f.time);
    for (std::size_t i = 0; i < f.grid.n; ++i)
        out.samples[i] = f.grid.x(i) * f.samples[i] + two_it * ux.samples[i];
    return out;
}

double nonlinear_L_identity_gap(const Field& f, double sigma) {
    if (!(sigma >= 0.5))
        throw std::invalid_argument("nonlinear_L_identity_gap: sigma must be at least 1/2");

    Field cubic(f.grid, f.time);
    for (std::size_t i = 0; i < f.grid.n; ++i) {
        const cdouble u = f.samples[i];
        cubic.samples[i] = abs2_pow(std::norm(u), sigma) * u;
    }

    const Field lhs = apply_L(cubic);
    const Field lu = apply_L(f);

    double acc = 0.0;
    for (std::size_t i = 0; i < f.grid.n; ++i) {
        const cdouble u = f.samples[i];
        const double g = abs2_pow(std::norm(u), sigma);
        const cdouble rhs = (sigma + 1.0) * g * lu.samples[i] -
                            sigma * chiral_weight(u, sigma) * std::conj(lu.samples[i]);
        acc += std::norm(lhs.samples[i] - rhs);
    }
    return std::sqrt(acc * f.grid.dx());
}

double ks_gap(const Field& f) {
    if (!(f.time > 0.0))
        throw std::domain_error("ks_gap: requires t > 0");

    const double sup = lp_norm(f, std::numeric_limits<double>::infinity());
    if (sup == 0.0)
        return 0.0;
    const double l2 = lp_norm(f, 2.0);
    const double lu = lp_norm(apply_L(f), 2.0);
    if (l2 == 0.0 || lu == 0.0)
        return 0.0;
    return f.time * sup * sup / (l2 * lu);
}

double lu_energy_rhs(const Field& f, double sigma) {
    if (!(sigma >= 0.5))
        throw std::invalid_argument("lu_energy_rhs: sigma must be at least 1/2");

    const Field lu = apply_L(f);

    Field g(f.grid, f.time), h(f.grid, f.time);
    for (std::size_t i = 0; i < f.grid.n; ++i) {
        const cdouble u = f.samples[i];
        g.samples[i] = abs2_pow(std::norm(u), sigma);
        h.samples[i] = chiral_weight(u, sigma);
    }
    const Field gx = derivative(g, 1);
    const Field hx = derivative(h, 1);

    double acc = 0.0;
    for (std::size_t i = 0; i < f.grid.n; ++i) {
        const cdouble w = lu.samples[i];
        const cdouble cw = std::conj(w);
        acc += -(sigma + 1.0) * gx.samples[i].real() * std::norm(w) +
               sigma * std::real(hx.samples[i] * cw * cw) +
               2.0 * std::real(g.samples[i].real() * f.samples[i] * cw);
    }
    return acc * f.grid.dx();
}

VectorFieldReport vector_field_report(const Field& f) {
    VectorFieldReport r;
    r.time = f.time;
    const Field lu = apply_L(f);
    r.lu_l2 = lp_norm(lu, 2.0);
    r.lux_l2 = lp_norm(derivative(lu, 1), 2.0);
    r.lu_h1 = std::sqrt(r.lu_l2 * r.lu_l2 + r.lux_l2 * r.lux_l2);
    r.ks_ratio = f.time > 0.0 ? ks_gap(f) : 0.0;
    return r;
}

GrowthFit fit_power_law(const std::vector<double>& times,
                        const std::vector<double>& values) {
    if (times.size() != values.size())
        throw std::invalid_argument("fit_power_law: length mismatch");

    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < 1.0)
            continue;
        if (!(values[i] > 0.0))
            throw std::domain_error("fit_power_law: values must be positive");
        const double bracket = std::sqrt(1.0 + times[i] * times[i]);
        lx.push_back(std::log(bracket));
        ly.push_back(std::log(values[i]));
    }
    if (lx.size() < 10)
        throw std::invalid_argument("fit_power_law: need at least 10 samples with t >= 1");

    const double n = static_cast<double>(lx.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
        syy += ly[i] * ly[i];
    }
    const double denom = n * sxx - sx * sx;
    GrowthFit fit;
    fit.exponent = (n * sxy - sx * sy) / denom;
    fit.constant = std::exp((sy - fit.exponent * sx) / n);
    const double ss_res = syy - sy * sy / n -
                          fit.exponent * (sxy - sx * sy / n);
    const double ss_tot = syy - sy * sy / n;
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

GrowthFit lu_growth_fit(const Trajectory& traj) {
    std::vector<double> times, values;
    for (const Field& snap : traj.snapshots.fields) {
        if (snap.time < 1.0)
            continue;
        times.push_back(snap.time);
        values.push_back(vector_field_report(snap).lu_h1);
    }
    return fit_power_law(times, values);
}

} // namespace gdnlab
