#pragma once

#include "gdnlab/grid.hpp"

namespace gdnlab {

// Parameters of the explicit solitary-wave family.  Defined for c^2 < 4*omega.
struct SolitonParams {
    double sigma = 1.0;
    double omega = 1.0;
    double c = 0.0;

    SolitonParams() = default;
    SolitonParams(double sigma_, double omega_, double c_);
};

// The equation i u_t + u_xx + i (|u|^{2s} u)_x = 0 and the advection form
// i u_t + u_xx + i |u|^{2s} u_x = 0 differ by a gauge; the same amplitude
// solves both, but the phase-integral coefficient mu in
//   phi(x) * exp{ i (c/2) x - i mu int_{-inf}^x phi^{2s} }
// is (2s+1)/(2s+2) for the divergence form integrated here and 1/(2s+2) for
// the advection form.  The quoted virial identity |phi_x|^2 = omega |phi|^2
// belongs to the advection-gauge profile.
enum class SolitonGauge { divergence, advection };

// Exact free evolution: multiply coefficients by e^{-i xi^2 dt}.
Field free_propagate(const Field& f, double dt);

// Samples of (1+4iat)^{-1/2} e^{-a x^2 / (1+4iat)}, the free evolution of
// e^{-a x^2}; sup magnitude is (1+16 a^2 t^2)^{-1/4}.
Field gaussian_exact(double a, double t, const Grid1D& grid);

// Amplitude phi_{omega,c}(x) = {(s+1)(4w-c^2) / (2 sqrt(w) cosh(s sqrt(4w-c^2) x) - c)}^{1/(2s)}.
double soliton_amplitude(const SolitonParams& p, double x);

// Cumulative phase integral int_{-inf}^{y} phi^{2s}(x) dx in closed form:
// substituting t = e^{s sqrt(beta) x} turns the integrand into a rational
// function with antiderivative
//   (2(s+1)/s) * atan((2 sqrt(w) t - c)/sqrt(beta)),  beta = 4w - c^2.
double soliton_phase_integral(const SolitonParams& p, double y);

// phi * exp{i((c/2)x - mu * phase integral)} on the grid at time 0.
Field soliton_field(const SolitonParams& p, const Grid1D& grid,
                    SolitonGauge gauge = SolitonGauge::divergence);

// e^{i omega t} soliton_field evaluated at x - c t.
Field soliton_orbit(const SolitonParams& p, double t, const Grid1D& grid,
                    SolitonGauge gauge = SolitonGauge::divergence);

} // namespace gdnlab
