#pragma once

#include "gdnlab/evolve.hpp"
#include "gdnlab/grid.hpp"
#include "gdnlab/wave_packets.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace gdnlab {

// The late-time identity of a small solution: gamma(t, v) locks onto
// W(v) e^{-i (v/2) |W(v)|^{2 sigma} Lambda(t)} with Lambda = log t at
// sigma = 1 and Lambda = t^{1-sigma}/(1-sigma) above it.
struct ScatteringProfile {
    std::vector<double> velocities;
    std::vector<cdouble> W;
    double sigma = 1.0;
    double extracted_at = 0.0;

    void validate() const;
};

// Result of a log-log least-squares fit of value against time.
struct DecayFit {
    double exponent = 0.0;
    double amplitude = 0.0;
    double r_squared = 0.0;
    std::pair<double, double> window{0.0, 0.0};

    void validate() const;
};

// Solution of i gamma_t = (v/2) t^{-sigma} |gamma|^{2 sigma} gamma with
// scattering datum W: the modulus is frozen and only the phase winds.
// sigma below 1 has no such late-time lock-on and is rejected.
cdouble ode_solution(cdouble W, double v, double t, double sigma);

// Undo the phase winding of a measured profile: W = gamma e^{+i(...)}.
// Exact inverse of ode_solution; |W| = |gamma| pointwise.
ScatteringProfile extract_W(const PacketProfile& p, double sigma);

// How far a state sits from its reconstruction out of W, in both
// representations:
//   err_x  = u - t^{-1/2} e^{i x^2/4t} (W e^{-i phase})(x/t)
//   err_xi = u_hat - sqrt(2 pi)(1+i) e^{-i t xi^2} (W e^{-i phase})(2 xi)
// Keys: sup_x, l2_x, sup_xi, l2_xi.  W is interpolated cubically at the
// query velocities; if the profile's velocity range misses a point where
// the state is above 1e-6 of its peak, the comparison is refused.
std::map<std::string, double> scattering_errors(const Field& f, const ScatteringProfile& prof);

// Least squares of log(value) against log(time) over the samples with
// window.first <= t <= window.second.  Needs 8 points and positive values.
DecayFit fit_decay(const std::vector<double>& times, const std::vector<double>& values,
                   std::pair<double, double> window);

// sup over snapshots with t >= 1 of t^{1/2} ||u||_inf / ||u_0||_1.  The
// trajectory must carry its t = 0 state as the first snapshot and run to
// t_end >= 16 so the supremum samples the decay regime.
double dispersive_constant(const Trajectory& traj);

// Discrete H^s energy of the sampled W: trapezoid L^2 mass plus the
// Gagliardo double sum of |W(a)-W(b)|^2 / |a-b|^{1+2s}.  Reporting aid
// for the regularity of extracted profiles; s must lie in (0, 1).
double hs_energy(const ScatteringProfile& prof, double s);

} // namespace gdnlab
