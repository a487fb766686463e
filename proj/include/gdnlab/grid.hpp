#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace gdnlab {

using cdouble = std::complex<double>;

// Uniform periodic grid covering [origin, origin + length).
//
// Samples live at x_i = origin + i*dx, dx = length/n.  Fourier coefficients
// are stored in FFT order: slot j holds mode k = j for j < n/2 and
// k = j - n for j >= n/2, i.e. frequencies xi_k = 2*pi*k/length with
// k = -n/2 ... n/2-1.
struct Grid1D {
    std::size_t n = 0;
    double length = 0.0;
    double origin = 0.0;

    Grid1D() = default;
    Grid1D(std::size_t n_, double length_);
    Grid1D(std::size_t n_, double length_, double origin_);

    double dx() const { return length / static_cast<double>(n); }
    double x(std::size_t i) const { return origin + dx() * static_cast<double>(i); }

    long mode(std::size_t j) const {
        return j < n / 2 ? static_cast<long>(j)
                         : static_cast<long>(j) - static_cast<long>(n);
    }
    double xi(std::size_t j) const;

    bool operator==(const Grid1D&) const = default;
};

// Complex samples of a function at one instant of model time.
struct Field {
    Grid1D grid;
    double time = 0.0;
    std::vector<cdouble> samples;

    Field() = default;
    Field(const Grid1D& g, double t);
    Field(const Grid1D& g, double t, std::vector<cdouble> values);
};

// Discrete Fourier coefficients of a Field, same storage length.
//
// Convention: coefficients approximate F f(xi) = int f(x) e^{-i x xi} dx,
// inverse carries the 1/(2*pi).  Discretely
//   c_k = dx * e^{-i xi_k origin} * sum_j f_j e^{-2 pi i jk/n},
// which makes Parseval read  sum |f_j|^2 dx = (1/L) sum |c_k|^2.
struct Spectrum {
    Grid1D grid;
    double time = 0.0;
    std::vector<cdouble> coefficients;

    Spectrum() = default;
    Spectrum(const Grid1D& g, double t);
    Spectrum(const Grid1D& g, double t, std::vector<cdouble> values);
};

bool all_finite(const std::vector<cdouble>& values);

Spectrum to_spectrum(const Field& f);
Field from_spectrum(const Spectrum& s);

// Spectral derivative: multiply by (i xi)^order.  The unmatched Nyquist mode
// -n/2 is zeroed so derivatives of real data stay conjugate-symmetric.
Field derivative(const Field& f, int order);

enum class SobolevKind { homogeneous, inhomogeneous };

// Multiplier |xi|^s (homogeneous) or (1 + xi^2)^{s/2} (inhomogeneous).
Field fractional_derivative(const Field& f, double s, SobolevKind kind);
Spectrum fractional_multiplier(const Spectrum& s, double order, SobolevKind kind);

// Zero every coefficient with |mode| > keep_fraction * n/2.
Spectrum dealias(const Spectrum& s, double keep_fraction);

// Raw transforms used by the time stepper, which keeps data in FFT layout
// and applies the dx / origin factors itself.  Thread-safe.
void fft_forward(const Grid1D& g, const cdouble* in, cdouble* out);
void fft_backward(const Grid1D& g, const cdouble* in, cdouble* out);

} // namespace gdnlab
