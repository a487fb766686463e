#include "gdnlab/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gdnlab {

namespace {

double abs2_pow_sigma(double m2, double sigma) {
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

// Spectral-space workspace for the stepper: precomputed multipliers and
// scratch buffers so a long run does no per-step allocation.
class Stepper {
public:
    Stepper(const Grid1D& grid, double sigma, double dt, double dealias_fraction)
        : grid_(grid), sigma_(sigma), dt_(dt),
          half_step_(grid.n), full_step_(grid.n), deriv_mask_(grid.n),
          u_(grid.n), w_(grid.n), stage_(grid.n), k1_(grid.n), k2_(grid.n),
          k3_(grid.n), k4_(grid.n) {
        const double cutoff = dealias_fraction * static_cast<double>(grid.n) / 2.0;
        for (std::size_t j = 0; j < grid.n; ++j) {
            const double xi = grid.xi(j);
            half_step_[j] = std::polar(1.0, -xi * xi * dt / 2.0);
            full_step_[j] = half_step_[j] * half_step_[j];
            const bool keep = std::fabs(static_cast<double>(grid.mode(j))) <= cutoff &&
                              grid.mode(j) != -static_cast<long>(grid.n / 2);
            deriv_mask_[j] = keep ? cdouble(0.0, -xi) : cdouble(0.0, 0.0);
        }
    }

    // F N(u) = -i xi * F(|u|^{2s} u), dealiased, from the spectrum in FFT
    // layout (no dx/origin factors; they cancel between the transforms).
    void nonlinear(const std::vector<cdouble>& vhat, std::vector<cdouble>& out) {
        fft_backward(grid_, vhat.data(), u_.data());
        const double inv_n = 1.0 / static_cast<double>(grid_.n);
        for (std::size_t i = 0; i < grid_.n; ++i) {
            const cdouble u = u_[i] * inv_n;
            w_[i] = abs2_pow_sigma(std::norm(u), sigma_) * u;
        }
        fft_forward(grid_, w_.data(), out.data());
        for (std::size_t j = 0; j < grid_.n; ++j)
            out[j] *= deriv_mask_[j];
    }

    void advance(std::vector<cdouble>& vhat) {
        const std::size_t n = grid_.n;

        nonlinear(vhat, k1_);

        for (std::size_t j = 0; j < n; ++j)
            stage_[j] = half_step_[j] * (vhat[j] + 0.5 * dt_ * k1_[j]);
        nonlinear(stage_, k2_);

        for (std::size_t j = 0; j < n; ++j)
            stage_[j] = half_step_[j] * vhat[j] + 0.5 * dt_ * k2_[j];
        nonlinear(stage_, k3_);

        for (std::size_t j = 0; j < n; ++j)
            stage_[j] = full_step_[j] * vhat[j] + dt_ * half_step_[j] * k3_[j];
        nonlinear(stage_, k4_);

        const double w = dt_ / 6.0;
        for (std::size_t j = 0; j < n; ++j)
            vhat[j] = full_step_[j] * vhat[j] +
                      w * (full_step_[j] * k1_[j] +
                           2.0 * half_step_[j] * (k2_[j] + k3_[j]) + k4_[j]);
    }

private:
    Grid1D grid_;
    double sigma_;
    double dt_;
    std::vector<cdouble> half_step_, full_step_, deriv_mask_;
    std::vector<cdouble> u_, w_, stage_, k1_, k2_, k3_, k4_;
};

bool spot_finite(const std::vector<cdouble>& v) {
    // A NaN anywhere spreads to every coefficient after one transform, so a
    // handful of probes is enough between full scans.
    const std::size_t n = v.size();
    for (std::size_t j : {std::size_t(0), n / 3, n / 2, n - 1}) {
        if (!std::isfinite(v[j].real()) || !std::isfinite(v[j].imag()))
            return false;
    }
    return true;
}

} // namespace

void SimConfig::validate() const {
    if (!(sigma > 0.0))
        throw std::invalid_argument("SimConfig.sigma: must be positive");
    if (grid.n < 8)
        throw std::invalid_argument("SimConfig.grid: not initialized");
    if (!(dt > 0.0))
        throw std::invalid_argument("SimConfig.dt: must be positive");
    const double ceiling = grid.dx() * grid.dx();
    if (dt > ceiling)
        throw std::invalid_argument("SimConfig.dt: exceeds the dx^2 accuracy ceiling");
    if (t_end < 0.0)
        throw std::invalid_argument("SimConfig.t_end: must be nonnegative");
    if (!(dealias_fraction > 0.0) || dealias_fraction > 1.0)
        throw std::invalid_argument("SimConfig.dealias_fraction: must lie in (0, 1]");
    if (!(tail_guard_fraction > 0.0) || !(tail_guard_fraction < 1.0))
        throw std::invalid_argument("SimConfig.tail_guard_fraction: must lie in (0, 1)");
    if (!(tail_mass_tol > 0.0))
        throw std::invalid_argument("SimConfig.tail_mass_tol: must be positive");
    for (double t : snapshot_times)
        if (t < 0.0 || t > t_end + 1e-12)
            throw std::invalid_argument("SimConfig.snapshot_times: outside [0, t_end]");
}

Field nonlinear_term(const Field& f, double sigma, double dealias_fraction) {
    if (!(sigma > 0.0))
        throw std::invalid_argument("nonlinear_term: sigma must be positive");

    Field w(f.grid, f.time);
    for (std::size_t i = 0; i < f.grid.n; ++i) {
        const cdouble u = f.samples[i];
        w.samples[i] = abs2_pow_sigma(std::norm(u), sigma) * u;
    }

    Spectrum s = dealias(to_spectrum(w), dealias_fraction);
    for (std::size_t j = 0; j < s.grid.n; ++j) {
        if (s.grid.mode(j) == -static_cast<long>(s.grid.n / 2)) {
            s.coefficients[j] = 0.0;
            continue;
        }
        s.coefficients[j] *= cdouble(0.0, -s.grid.xi(j));
    }
    return from_spectrum(s);
}

Field step(const Field& f, const SimConfig& cfg) {
    cfg.validate();
    if (!all_finite(f.samples))
        throw std::runtime_error("step: non-finite state at t = " + std::to_string(f.time));

    std::vector<cdouble> vhat(f.grid.n);
    fft_forward(f.grid, f.samples.data(), vhat.data());

    Stepper stepper(f.grid, cfg.sigma, cfg.dt, cfg.dealias_fraction);
    stepper.advance(vhat);

    Field out(f.grid, f.time + cfg.dt);
    const double inv_n = 1.0 / static_cast<double>(f.grid.n);
    fft_backward(f.grid, vhat.data(), out.samples.data());
    for (auto& z : out.samples)
        z *= inv_n;
    if (!all_finite(out.samples))
        throw std::runtime_error("step: blow-up at t = " + std::to_string(out.time));
    return out;
}

Trajectory run(const Field& u0, const SimConfig& cfg) {
    cfg.validate();
    if (!(u0.grid == cfg.grid))
        throw std::invalid_argument("run: initial data is not on the configured grid");

    Trajectory traj;
    traj.config = cfg;

    const double mass0 = mass(u0);
    const double energy0 = energy(u0, cfg.sigma);

    // Snapshot times snapped to whole steps.
    const std::size_t total_steps = static_cast<std::size_t>(std::llround(cfg.t_end / cfg.dt));
    std::vector<std::size_t> snap_steps;
    for (double t : cfg.snapshot_times)
        snap_steps.push_back(std::min(
            total_steps, static_cast<std::size_t>(std::llround(t / cfg.dt))));
    std::sort(snap_steps.begin(), snap_steps.end());
    snap_steps.erase(std::unique(snap_steps.begin(), snap_steps.end()), snap_steps.end());

    std::vector<cdouble> vhat(u0.grid.n);
    fft_forward(u0.grid, u0.samples.data(), vhat.data());
    Stepper stepper(u0.grid, cfg.sigma, cfg.dt, cfg.dealias_fraction);

    const double inv_n = 1.0 / static_cast<double>(u0.grid.n);
    auto emit = [&](std::size_t step_index) -> bool {
        Field snap(u0.grid, cfg.dt * static_cast<double>(step_index));
        if (step_index == 0) {
            snap.samples = u0.samples; // before any stepping: no FFT round trip
        } else {
            fft_backward(u0.grid, vhat.data(), snap.samples.data());
            for (auto& z : snap.samples)
                z *= inv_n;
        }

        if (!all_finite(snap.samples)) {
            traj.aborted = AbortRecord{snap.time, "blow-up"};
            return false;
        }
        const double tail = edge_mass_fraction(snap, cfg.tail_guard_fraction);
        if (tail > cfg.tail_mass_tol) {
            traj.aborted = AbortRecord{snap.time, "tail-mass"};
            return false;
        }
        traj.reports.push_back(conserved_report(snap, cfg.sigma, mass0, energy0));
        traj.snapshots.push(std::move(snap));
        return true;
    };

    std::size_t next_snap = 0;
    auto want_snapshot = [&](std::size_t step_index) {
        if (next_snap < snap_steps.size() && snap_steps[next_snap] == step_index) {
            ++next_snap;
            return true;
        }
        return false;
    };

    if (want_snapshot(0) && !emit(0))
        return traj;

    for (std::size_t istep = 1; istep <= total_steps; ++istep) {
        stepper.advance(vhat);
        if (!spot_finite(vhat)) {
            traj.aborted = AbortRecord{cfg.dt * static_cast<double>(istep), "blow-up"};
            return traj;
        }
        if (want_snapshot(istep) && !emit(istep))
            return traj;
    }
    return traj;
}

double pde_residual(const Field& before, const Field& after, double sigma) {
    if (!(before.grid == after.grid))
        throw std::invalid_argument("pde_residual: snapshots on different grids");
    const double dt = after.time - before.time;
    if (dt == 0.0)
        throw std::invalid_argument("pde_residual: snapshots at identical times");

    Field mid(before.grid, 0.5 * (before.time + after.time));
    for (std::size_t i = 0; i < mid.grid.n; ++i)
        mid.samples[i] = 0.5 * (before.samples[i] + after.samples[i]);

    const Field mid_xx = derivative(mid, 2);
    const Field nl = nonlinear_term(mid, sigma, 1.0); // -d_x(|u|^{2s}u)

    double acc = 0.0;
    const cdouble iunit(0.0, 1.0);
    for (std::size_t i = 0; i < mid.grid.n; ++i) {
        // i u_t + u_xx + i d_x(|u|^{2s} u) = i u_t + u_xx - i N(u)
        const cdouble ut = (after.samples[i] - before.samples[i]) / dt;
        acc += std::norm(iunit * ut + mid_xx.samples[i] - iunit * nl.samples[i]);
    }
    return std::sqrt(acc * mid.grid.dx());
}

double edge_mass_fraction(const Field& f, double fraction) {
    const std::size_t zone = static_cast<std::size_t>(
        std::floor(fraction * 0.5 * static_cast<double>(f.grid.n)));
    double edge = 0.0, total = 0.0;
    for (std::size_t i = 0; i < f.grid.n; ++i) {
        const double m = std::norm(f.samples[i]);
        total += m;
        if (i < zone || i >= f.grid.n - zone)
            edge += m;
    }
    return total > 0.0 ? edge / total : 0.0;
}

} // namespace gdnlab
