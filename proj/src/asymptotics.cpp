#include "gdnlab/asymptotics.hpp"

#include "gdnlab/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gdnlab {

namespace {

constexpr double kCoverageThreshold = 1e-6;

void check_sigma(double sigma, const char* who) {
    if (!(sigma >= 1.0))
        throw std::domain_error(std::string(who) + ": no scattering regime below sigma = 1");
}

// Lambda(t) with Lambda' = t^{-sigma}: the clock the asymptotic phase reads.
double phase_scale(double t, double sigma) {
    if (sigma == 1.0)
        return std::log(t);
    return std::pow(t, 1.0 - sigma) / (1.0 - sigma);
}

double winding(double v, double modulus_sq, double t, double sigma) {
    return 0.5 * v * std::pow(modulus_sq, sigma) * phase_scale(t, sigma);
}

// Cubic Lagrange interpolation on the four nodes around v.  The velocity
// grid is strictly increasing but not necessarily uniform.
cdouble interpolate(const std::vector<double>& vel, const std::vector<cdouble>& W, double v) {
    const std::size_t m = vel.size();
    std::size_t j = std::upper_bound(vel.begin(), vel.end(), v) - vel.begin();
    j = (j == 0) ? 0 : j - 1;
    const std::size_t lo = std::min(j >= 1 ? j - 1 : 0, m - 4);
    cdouble acc = 0.0;
    for (std::size_t a = lo; a < lo + 4; ++a) {
        double basis = 1.0;
        for (std::size_t b = lo; b < lo + 4; ++b)
            if (b != a)
                basis *= (v - vel[b]) / (vel[a] - vel[b]);
        acc += basis * W[a];
    }
    return acc;
}

struct ErrorAccumulator {
    double sup = 0.0;
    double sq = 0.0;

    void add(cdouble err) {
        const double a = std::abs(err);
        sup = std::max(sup, a);
        sq += a * a;
    }
};

} // namespace

void ScatteringProfile::validate() const {
    if (velocities.size() != W.size())
        throw std::invalid_argument("ScatteringProfile: velocity/W length mismatch");
    if (!(extracted_at > 1.0))
        throw std::invalid_argument("ScatteringProfile: extraction time must exceed 1");
    check_sigma(sigma, "ScatteringProfile");
    for (std::size_t j = 0; j + 1 < velocities.size(); ++j)
        if (!(velocities[j] < velocities[j + 1]))
            throw std::invalid_argument("ScatteringProfile: velocities must increase");
}

void DecayFit::validate() const {
    if (!(window.first >= 1.0) || !(window.second > window.first))
        throw std::invalid_argument("DecayFit: window must satisfy 1 <= t_min < t_max");
    if (!(amplitude > 0.0))
        throw std::invalid_argument("DecayFit: amplitude must be positive");
    if (!(r_squared >= 0.0 && r_squared <= 1.0))
        throw std::invalid_argument("DecayFit: r_squared must lie in [0, 1]");
}

cdouble ode_solution(cdouble W, double v, double t, double sigma) {
    check_sigma(sigma, "ode_solution");
    if (sigma == 1.0 && !(t > 1.0))
        throw std::domain_error("ode_solution: log-phase branch needs t > 1");
    if (!(t > 0.0))
        throw std::domain_error("ode_solution: t must be positive");
    return W * std::polar(1.0, -winding(v, std::norm(W), t, sigma));
}

ScatteringProfile extract_W(const PacketProfile& p, double sigma) {
    p.validate();
    check_sigma(sigma, "extract_W");
    if (!(p.time > 1.0))
        throw std::domain_error("extract_W: phase inversion needs t > 1");

    ScatteringProfile out;
    out.velocities = p.velocities;
    out.W.resize(p.gamma.size());
    out.sigma = sigma;
    out.extracted_at = p.time;
    for (std::size_t j = 0; j < p.gamma.size(); ++j)
        out.W[j] = p.gamma[j] *
                   std::polar(1.0, winding(p.velocities[j], std::norm(p.gamma[j]), p.time, sigma));
    return out;
}

std::map<std::string, double> scattering_errors(const Field& f, const ScatteringProfile& prof) {
    prof.validate();
    if (!(f.time > 1.0))
        throw std::domain_error("scattering_errors: expansion needs t > 1");
    if (prof.W.size() < 4)
        throw std::invalid_argument("scattering_errors: profile too coarse to interpolate");

    const double t = f.time;
    const double v_lo = prof.velocities.front();
    const double v_hi = prof.velocities.back();
    const double lambda = phase_scale(t, prof.sigma);

    auto reconstruct = [&](double v) {
        const cdouble W = interpolate(prof.velocities, prof.W, v);
        return W * std::polar(1.0, -0.5 * v * std::pow(std::norm(W), prof.sigma) * lambda);
    };

    double peak = 0.0;
    for (const cdouble& s : f.samples)
        peak = std::max(peak, std::abs(s));

    ErrorAccumulator physical;
    const double amp = 1.0 / std::sqrt(t);
    for (std::size_t i = 0; i < f.grid.n; ++i) {
        const double x = f.grid.x(i);
        const double v = x / t;
        if (v < v_lo || v > v_hi) {
            if (std::abs(f.samples[i]) > kCoverageThreshold * peak)
                throw std::invalid_argument(
                    "scattering_errors: profile does not cover the effective support");
            physical.add(f.samples[i]);
            continue;
        }
        const cdouble recon = amp * std::polar(1.0, x * x / (4.0 * t)) * reconstruct(v);
        physical.add(f.samples[i] - recon);
    }

    const Spectrum s = to_spectrum(f);
    double hat_peak = 0.0;
    for (const cdouble& c : s.coefficients)
        hat_peak = std::max(hat_peak, std::abs(c));

    ErrorAccumulator fourier;
    const cdouble stationary = std::sqrt(2.0 * M_PI) * cdouble(1.0, 1.0);
    for (std::size_t k = 0; k < f.grid.n; ++k) {
        const double xi = s.grid.xi(k);
        const double v = 2.0 * xi;
        if (v < v_lo || v > v_hi) {
            if (std::abs(s.coefficients[k]) > kCoverageThreshold * hat_peak)
                throw std::invalid_argument(
                    "scattering_errors: profile does not cover the effective support");
            fourier.add(s.coefficients[k]);
            continue;
        }
        const cdouble recon = stationary * std::polar(1.0, -t * xi * xi) * reconstruct(v);
        fourier.add(s.coefficients[k] - recon);
    }

    const double dxi = 2.0 * M_PI / f.grid.length;
    return {{"sup_x", physical.sup},
            {"l2_x", std::sqrt(physical.sq * f.grid.dx())},
            {"sup_xi", fourier.sup},
            {"l2_xi", std::sqrt(fourier.sq * dxi)}};
}

DecayFit fit_decay(const std::vector<double>& times, const std::vector<double>& values,
                   std::pair<double, double> window) {
    if (times.size() != values.size())
        throw std::invalid_argument("fit_decay: times/values length mismatch");
    if (!(window.first >= 1.0) || !(window.second > window.first))
        throw std::invalid_argument("fit_decay: window must satisfy 1 <= t_min < t_max");

    std::vector<double> lt, lv;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < window.first || times[i] > window.second)
            continue;
        if (!(values[i] > 0.0))
            throw std::domain_error("fit_decay: values must be positive in the window");
        lt.push_back(std::log(times[i]));
        lv.push_back(std::log(values[i]));
    }
    if (lt.size() < 8)
        throw std::invalid_argument("fit_decay: need at least 8 samples in the window");

    const double n = static_cast<double>(lt.size());
    double mt = 0.0, mv = 0.0;
    for (std::size_t i = 0; i < lt.size(); ++i) {
        mt += lt[i];
        mv += lv[i];
    }
    mt /= n;
    mv /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < lt.size(); ++i) {
        sxx += (lt[i] - mt) * (lt[i] - mt);
        sxy += (lt[i] - mt) * (lv[i] - mv);
        syy += (lv[i] - mv) * (lv[i] - mv);
    }

    DecayFit fit;
    fit.exponent = sxy / sxx;
    fit.amplitude = std::exp(mv - fit.exponent * mt);
    fit.window = window;
    // Variance at the roundoff floor of the log samples means the data is
    // constant as far as doubles can tell; call that a perfect fit rather
    // than dividing noise by noise.
    double logsq = 0.0;
    for (double v : lv)
        logsq += v * v;
    if (syy <= 1e-28 * std::max(logsq, 1e-30)) {
        fit.r_squared = 1.0;
    } else {
        const double residual = syy - sxy * sxy / sxx;
        fit.r_squared = std::clamp(1.0 - residual / syy, 0.0, 1.0);
    }
    return fit;
}

double dispersive_constant(const Trajectory& traj) {
    if (!(traj.config.t_end >= 16.0))
        throw std::invalid_argument("dispersive_constant: trajectory too short (t_end < 16)");
    if (traj.snapshots.fields.empty() || std::fabs(traj.snapshots.times.front()) > 1e-12)
        throw std::invalid_argument(
            "dispersive_constant: needs the t = 0 state as the first snapshot");

    const double mass_l1 = lp_norm(traj.snapshots.fields.front(), 1.0);
    if (mass_l1 == 0.0)
        return 0.0;

    const double inf = std::numeric_limits<double>::infinity();
    double best = 0.0;
    for (std::size_t k = 0; k < traj.snapshots.fields.size(); ++k) {
        const double t = traj.snapshots.times[k];
        if (t < 1.0)
            continue;
        best = std::max(best, std::sqrt(t) * lp_norm(traj.snapshots.fields[k], inf) / mass_l1);
    }
    return best;
}

double hs_energy(const ScatteringProfile& prof, double s) {
    prof.validate();
    if (!(s > 0.0 && s < 1.0))
        throw std::invalid_argument("hs_energy: s must lie in (0, 1)");

    const std::size_t m = prof.velocities.size();
    std::vector<double> w(m, 0.0);
    for (std::size_t j = 0; j + 1 < m; ++j) {
        const double h = prof.velocities[j + 1] - prof.velocities[j];
        w[j] += 0.5 * h;
        w[j + 1] += 0.5 * h;
    }

    double energy = 0.0;
    for (std::size_t j = 0; j < m; ++j)
        energy += w[j] * std::norm(prof.W[j]);
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t k = j + 1; k < m; ++k) {
            const double gap = prof.velocities[k] - prof.velocities[j];
            energy += 2.0 * w[j] * w[k] * std::norm(prof.W[k] - prof.W[j]) /
                      std::pow(gap, 1.0 + 2.0 * s);
        }
    return energy;
}

} // namespace gdnlab
