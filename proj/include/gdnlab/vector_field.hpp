#pragma once

#include "gdnlab/evolve.hpp"
#include "gdnlab/grid.hpp"

namespace gdnlab {

// Diagnostics built around the Galilean generator L = x + 2it d_x, which
// commutes with the free flow and converts localization of the data into
// pointwise decay of the solution.
struct VectorFieldReport {
    double time = 0.0;
    double lu_l2 = 0.0;
    double lux_l2 = 0.0;
    double lu_h1 = 0.0;
    double ks_ratio = 0.0;
};

struct GrowthFit {
    double exponent = 0.0;  // alpha in value ~ constant * <t>^alpha
    double constant = 0.0;
    double r_squared = 0.0;
};

// x u + 2it u_x with x the box coordinate.  Multiplication by x is only
// meaningful while the solution stays away from the box edge, so the edge
// zone is checked against a mass threshold first.
Field apply_L(const Field& f, double tail_fraction = 0.1, double tail_tol = 1e-6);

// L^2 gap of the pointwise identity
// L(|u|^{2s} u) = (s+1)|u|^{2s} Lu - s |u|^{2s-2} u^2 conj(Lu).
double nonlinear_L_identity_gap(const Field& f, double sigma);

// t ||u||_inf^2 / (||u||_2 ||Lu||_2); equals 1 for the extremizers of the
// Klainerman-Sobolev inequality, 0 for the zero field.
double ks_gap(const Field& f);

// d/dt ||Lu||_2^2 along the flow:
//   -(s+1) int d_x(|u|^{2s}) |Lu|^2
//   + s Re int d_x(|u|^{2s-2} u^2) conj(Lu)^2
//   + 2 Re int |u|^{2s} u conj(Lu).
double lu_energy_rhs(const Field& f, double sigma);

VectorFieldReport vector_field_report(const Field& f);

// Least squares of log(value) against log<t> over (t, value) samples with
// t >= 1; requires at least 10 such samples.
GrowthFit fit_power_law(const std::vector<double>& times,
                        const std::vector<double>& values);

// fit_power_law applied to ||Lu(t)||_{H^1} along a trajectory.
GrowthFit lu_growth_fit(const Trajectory& traj);

} // namespace gdnlab
