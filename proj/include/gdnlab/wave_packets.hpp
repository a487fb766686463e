#pragma once

#include "gdnlab/evolve.hpp"
#include "gdnlab/grid.hpp"

#include <map>
#include <string>
#include <vector>

namespace gdnlab {

enum class BumpKind { standard };

// The window used to cut a solution into rays: chi(y) = chi_norm *
// exp(-1/(1-y^2)) on |y| < 1, zero outside.  chi_norm defaults to the
// constant making int chi dy = 1 (computed once by adaptive quadrature).
struct PacketConfig {
    BumpKind chi_kind = BumpKind::standard;
    double chi_norm;
    double quadrature_tol = 1e-8;

    PacketConfig();
    void validate() const;
};

double chi(const PacketConfig& cfg, double y);

// Fourier-side profile of the packet:
//   chi1(z) = e^{i z^2} int e^{i y^2/4} chi(y) e^{-i z y} dy,
// evaluated by 400-node Gauss-Legendre quadrature over the support.  chi1
// decays faster than any power; |chi1| is below 2e-6 past |z| = 120 and the
// evaluation returns 0 there.
cdouble chi1(const PacketConfig& cfg, double z);

enum class ProfileSource { physical, fourier };

// gamma(t, v) sampled over a velocity grid at one instant.
struct PacketProfile {
    double time = 0.0;
    std::vector<double> velocities;
    std::vector<cdouble> gamma;
    ProfileSource source = ProfileSource::physical;

    void validate() const;
};

// Phi_v(x) = e^{i x^2/(4t)} chi((x - v t)/sqrt(t)): a unit-L^1-mass packet of
// width sqrt(t) travelling along the ray x = v t.  The support must sit
// inside the box interior.
Field wave_packet(double v, double t, const Grid1D& grid, const PacketConfig& cfg);

// (i d_t + d_x^2) Phi_v = (e^{i phi}/(2t)) [i chi + i y chi' + 2 chi''](y)
// with y = (x - vt)/sqrt(t): the packet fails to solve the free equation by
// an O(1/t) relative margin, which is what makes it a usable test function.
Field packet_residual(double v, double t, const Grid1D& grid, const PacketConfig& cfg);

// gamma(t, v) = int u conj(Phi_v) dx.  The state is upsampled 4x by spectral
// zero padding before the quadrature; the bump's transform decays too slowly
// for the bare grid sum at production spacings.
cdouble gamma_physical(const Field& f, double v, const PacketConfig& cfg);

// The same pairing on the Fourier side:
//   gamma = (sqrt(t)/2pi) int u_hat(xi) e^{i t xi^2} conj(chi1(sqrt(t)(xi - v/2))) dxi.
cdouble gamma_fourier(const Spectrum& s, double v, const PacketConfig& cfg);

// gamma_physical over a velocity grid (strictly increasing).
PacketProfile profile(const Field& f, const std::vector<double>& velocities,
                      const PacketConfig& cfg);

// count velocities on the lattice v_j = 2 xi commensurate with the grid's
// Fourier lattice, centered on 0 and covering [-v_max, v_max].
std::vector<double> velocity_lattice(const Grid1D& grid, std::size_t count, double v_max);

// gamma_fourier over a lattice of velocities.  On-lattice velocities make
// sqrt(t)(xi_k - v_j/2) take repeated values, so chi1 is evaluated once per
// offset instead of once per (mode, velocity) pair.
PacketProfile fourier_profile(const Spectrum& s, const std::vector<double>& velocities,
                              const PacketConfig& cfg);

// How closely u follows its packet reconstruction, as the five scale-free
// ratios (keys r1..r5):
//   r1 = t^{3/4}  sup_v |u(t,vt) - t^{-1/2} e^{i v^2 t/4} gamma| / ||Lu||_2
//   r2 = t      ||  same difference  ||_{L^2_v}              / ||Lu||_2
//   r3 = t^{3/4}  sup_v |u_x(t,vt) - (i v/2) t^{-1/2} e^{i v^2 t/4} gamma|
//                                                / (||Lu||_2 + ||Lu_x||_2)
//   r4 = t^{1/4}  sup_xi |u_hat(xi) - 2 sqrt(pi) e^{i pi/4} e^{-i t xi^2} gamma(t,2xi)|
//                                                / ||Lu||_2
//   r5 = t^{1/2} ||  same difference  ||_{L^2_xi}            / ||Lu||_2
// u(t, vt) and u_x(t, vt) are evaluated by band-limited interpolation.
std::map<std::string, double> difference_report(const Field& f, const PacketProfile& p);

// R(t, v) = (v/2) t^{-sigma} |gamma|^{2 sigma} gamma - i gamma_t, the defect
// of the measured gamma against the asymptotic ODE, with gamma_t from the
// snapshots bracketing t.
cdouble remainder_R(const Trajectory& traj, double t, double v, const PacketConfig& cfg);

// Assembly used by remainder_R: gamma at three increasing times, gamma_t by
// the non-uniform centered difference at the middle one.
cdouble remainder_from_gamma(cdouble g_prev, cdouble g_mid, cdouble g_next,
                             double t_prev, double t_mid, double t_next,
                             double v, double sigma);

} // namespace gdnlab
