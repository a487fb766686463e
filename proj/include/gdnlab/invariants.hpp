#pragma once

#include "gdnlab/grid.hpp"

namespace gdnlab {

// Conserved-quantity readings at one snapshot, with drifts relative to t=0.
struct ConservedReport {
    double time = 0.0;
    double mass = 0.0;
    double energy = 0.0;
    double relative_mass_drift = 0.0;
    double relative_energy_drift = 0.0;
};

// int |u|^2 dx.
double mass(const Field& f);

// int |u_x|^2 + (2s+1)/(s+1) |u|^{2s} Im(u_x conj(u)) + 1/(s+1) |u|^{4s+2} dx.
//
// At s=1 this is the conserved energy of i u_t + u_xx + i (|u|^{2s} u)_x = 0.
// For s != 1 the divergence-form equation admits no invariant built from
// these densities (writing u = R e^{i theta}, the cancellation conditions
// force both gamma = 3/(s+1) and gamma = (2s+1)/(s+1) on the chiral
// coefficient), so the value is reported as a diagnostic there.
double energy(const Field& f, double sigma);

// u_lambda(x) = lambda^{1/(2s)} u(lambda x) on the grid of length L/lambda,
// time stamp lambda^2 t.  The grid point lambda * x'_i coincides with x_i, so
// the map is sample-for-sample; shrinking lambda below 1 would stretch the
// data onto a coarser effective resolution and is rejected.
Field rescale(const Field& f, double lambda, double sigma);

// Sobolev index invariant under the rescaling: 1/2 - 1/(2s).
double scaling_critical_index(double sigma);

ConservedReport conserved_report(const Field& f, double sigma,
                                 double mass0, double energy0);

} // namespace gdnlab
