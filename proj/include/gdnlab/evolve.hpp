#pragma once

#include "gdnlab/grid.hpp"
#include "gdnlab/invariants.hpp"
#include "gdnlab/norms.hpp"

#include <optional>
#include <string>

namespace gdnlab {

// Run parameters for i u_t + u_xx + i (|u|^{2s} u)_x = 0 on the periodic box.
//
// The linear factor e^{-i xi^2 t} is handled exactly, so the dt ceiling
// safety * dx^2 (safety = 1) guards only the accuracy of the nonlinear
// stages.  The tail guard aborts a run once the outer tail_guard_fraction of
// the box carries more than tail_mass_tol of the total mass, certifying that
// wrap-around never contaminates an accepted trajectory.
struct SimConfig {
    double sigma = 1.0;
    Grid1D grid;
    double dt = 1e-3;
    double t_end = 1.0;
    double dealias_fraction = 2.0 / 3.0;
    std::vector<double> snapshot_times;
    double tail_guard_fraction = 0.1;
    double tail_mass_tol = 1e-8;

    void validate() const;
};

struct AbortRecord {
    double time = 0.0;
    std::string reason;
};

struct Trajectory {
    SimConfig config;
    TimeSeriesField snapshots;
    std::vector<ConservedReport> reports;
    std::optional<AbortRecord> aborted;
};

// N(u) = -d_x(|u|^{2s} u): the nonlinear contribution to u_t = i u_xx + N(u).
// Power in physical space, derivative spectrally, product dealiased.
Field nonlinear_term(const Field& f, double sigma, double dealias_fraction);

// One step of classical RK4 in the interaction picture
// v = e^{i xi^2 t} u_hat.  With E = e^{-i xi^2 dt/2}, E2 = E^2 and
// N(v) = F N(u) masked:
//   k1 = N(v)
//   k2 = N(E (v + dt/2 k1))
//   k3 = N(E v + dt/2 k2)
//   k4 = N(E2 v + dt E k3)
//   v' = E2 v + dt/6 (E2 k1 + 2 E (k2 + k3) + k4)
// Throws on non-finite intermediates, reporting the model time.
Field step(const Field& f, const SimConfig& cfg);

// Repeated stepping with conserved-quantity reports at each snapshot.  The
// tail guard and blow-up detection abort into Trajectory::aborted rather
// than throwing; snapshots collected so far are kept.
Trajectory run(const Field& u0, const SimConfig& cfg);

// || i (after-before)/dt + d_x^2 mid + i d_x(|mid|^{2s} mid) ||_{L^2} with
// mid the average of the two snapshots.
double pde_residual(const Field& before, const Field& after, double sigma);

// Mass fraction in the outer `fraction` of the box (both edges combined).
double edge_mass_fraction(const Field& f, double fraction);

} // namespace gdnlab
