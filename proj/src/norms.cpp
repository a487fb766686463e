#include "gdnlab/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gdnlab {

void TimeSeriesField::push(Field f) {
    if (!times.empty()) {
        if (f.time <= times.back())
            throw std::invalid_argument("TimeSeriesField: times must be strictly increasing");
        if (!(f.grid == fields.front().grid))
            throw std::invalid_argument("TimeSeriesField: snapshots must share one grid");
    }
    times.push_back(f.time);
    fields.push_back(std::move(f));
}

void TimeSeriesField::validate() const {
    if (times.size() != fields.size())
        throw std::invalid_argument("TimeSeriesField: times/fields length mismatch");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (times[i] <= times[i - 1])
            throw std::invalid_argument("TimeSeriesField: times must be strictly increasing");
}

double lp_norm(const Field& f, double p) {
    if (p < 1.0)
        throw std::invalid_argument("lp_norm: p must be at least 1");

    if (std::isinf(p)) {
        double m = 0.0;
        for (const auto& z : f.samples)
            m = std::max(m, std::abs(z));
        return m;
    }

    const double dx = f.grid.dx();
    double acc = 0.0;
    if (p == 2.0) {
        for (const auto& z : f.samples)
            acc += std::norm(z);
    } else if (p == 1.0) {
        for (const auto& z : f.samples)
            acc += std::abs(z);
    } else {
        for (const auto& z : f.samples)
            acc += std::pow(std::abs(z), p);
    }
    return std::pow(acc * dx, 1.0 / p);
}

double sobolev_norm(const Field& f, double s, SobolevKind kind) {
    // Evaluate in Fourier space; Parseval turns the L^2_x norm of the
    // multiplied field into a coefficient sum, saving the inverse transform.
    Spectrum sp = to_spectrum(f);
    double acc = 0.0;
    for (std::size_t j = 0; j < sp.grid.n; ++j) {
        const double c2 = std::norm(sp.coefficients[j]);
        if (c2 == 0.0)
            continue;
        const double xi = sp.grid.xi(j);
        const double m = kind == SobolevKind::homogeneous
                             ? std::pow(std::fabs(xi), s)
                             : std::pow(1.0 + xi * xi, s / 2.0);
        acc += c2 * m * m;
    }
    return std::sqrt(acc / f.grid.length);
}

double lorentz_norm(const Field& f, double p, double q) {
    if (p < 1.0)
        throw std::invalid_argument("lorentz_norm: p must be at least 1");
    if (q < 1.0)
        throw std::invalid_argument("lorentz_norm: q must be at least 1");

    std::vector<double> mags(f.samples.size());
    for (std::size_t i = 0; i < f.samples.size(); ++i)
        mags[i] = std::abs(f.samples[i]);
    std::sort(mags.begin(), mags.end(), std::greater<double>());

    const double dx = f.grid.dx();

    if (std::isinf(q)) {
        // sup over the right edge of each rearrangement cell, where
        // s^{1/p} f*(s) is largest.
        double best = 0.0;
        for (std::size_t i = 0; i < mags.size(); ++i) {
            if (mags[i] == 0.0)
                break;
            const double s = dx * static_cast<double>(i + 1);
            best = std::max(best, std::pow(s, 1.0 / p) * mags[i]);
        }
        return best;
    }

    double acc = 0.0;
    double prev_edge = 0.0; // (i*dx)^{q/p} at the left edge of the current cell
    const double e = q / p;
    for (std::size_t i = 0; i < mags.size(); ++i) {
        if (mags[i] == 0.0)
            break;
        const double right = std::pow(dx * static_cast<double>(i + 1), e);
        acc += std::pow(mags[i], q) * (right - prev_edge);
        prev_edge = right;
    }
    // int s^{q/p - 1} f*^q ds = sum a_i^q * (p/q) * ((i dx)^{q/p} - ((i-1) dx)^{q/p})
    return std::pow(acc * p / q, 1.0 / q);
}

double mixed_norm(const TimeSeriesField& ts, double q, double p) {
    ts.validate();
    if (ts.fields.size() < 2)
        throw std::invalid_argument("mixed_norm: need at least 2 snapshots");

    std::vector<double> spatial(ts.fields.size());
    for (std::size_t i = 0; i < ts.fields.size(); ++i)
        spatial[i] = lp_norm(ts.fields[i], p);

    if (std::isinf(q))
        return *std::max_element(spatial.begin(), spatial.end());
    if (q < 1.0)
        throw std::invalid_argument("mixed_norm: q must be at least 1");

    double acc = 0.0;
    for (std::size_t i = 1; i < spatial.size(); ++i) {
        const double dt = ts.times[i] - ts.times[i - 1];
        acc += 0.5 * dt * (std::pow(spatial[i], q) + std::pow(spatial[i - 1], q));
    }
    return std::pow(acc, 1.0 / q);
}

} // namespace gdnlab
