#include "gdnlab/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace gdnlab {

namespace {

void validate_grid(std::size_t n, double length) {
    if (n < 8 || n % 2 != 0)
        throw std::invalid_argument("Grid1D: n must be even and at least 8");
    if (!(length > 0.0) || !std::isfinite(length))
        throw std::invalid_argument("Grid1D: length must be positive and finite");
}

// FFTW planner access is not thread-safe; plan once per size under a lock and
// execute re-entrantly via fftw_execute_dft.  Plans are FFTW_ESTIMATE so the
// chosen algorithm (and thus rounding) is identical run to run, and
// FFTW_UNALIGNED so they accept whatever buffers the caller owns.
class PlanCache {
public:
    static PlanCache& instance() {
        static PlanCache cache;
        return cache;
    }

    void forward(std::size_t n, const cdouble* in, cdouble* out) {
        execute(plans(n).fwd, in, out);
    }
    void backward(std::size_t n, const cdouble* in, cdouble* out) {
        execute(plans(n).bwd, in, out);
    }

private:
    struct Pair {
        fftw_plan fwd = nullptr;
        fftw_plan bwd = nullptr;
    };

    Pair& plans(std::size_t n) {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = cache_.find(n);
        if (it != cache_.end())
            return it->second;

        std::vector<cdouble> a(n), b(n);
        auto* pa = reinterpret_cast<fftw_complex*>(a.data());
        auto* pb = reinterpret_cast<fftw_complex*>(b.data());
        Pair p;
        p.fwd = fftw_plan_dft_1d(static_cast<int>(n), pa, pb, FFTW_FORWARD,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
        p.bwd = fftw_plan_dft_1d(static_cast<int>(n), pa, pb, FFTW_BACKWARD,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!p.fwd || !p.bwd)
            throw std::runtime_error("fftw_plan_dft_1d failed");
        return cache_.emplace(n, p).first->second;
    }

    static void execute(fftw_plan plan, const cdouble* in, cdouble* out) {
        fftw_execute_dft(plan,
                         reinterpret_cast<fftw_complex*>(const_cast<cdouble*>(in)),
                         reinterpret_cast<fftw_complex*>(out));
    }

    std::mutex mutex_;
    std::map<std::size_t, Pair> cache_;
};

} // namespace

Grid1D::Grid1D(std::size_t n_, double length_) : Grid1D(n_, length_, -length_ / 2.0) {}

Grid1D::Grid1D(std::size_t n_, double length_, double origin_)
    : n(n_), length(length_), origin(origin_) {
    validate_grid(n_, length_);
}

double Grid1D::xi(std::size_t j) const {
    return 2.0 * M_PI * static_cast<double>(mode(j)) / length;
}

Field::Field(const Grid1D& g, double t) : grid(g), time(t), samples(g.n) {}

Field::Field(const Grid1D& g, double t, std::vector<cdouble> values)
    : grid(g), time(t), samples(std::move(values)) {
    if (samples.size() != grid.n)
        throw std::invalid_argument("Field: sample count does not match grid");
}

Spectrum::Spectrum(const Grid1D& g, double t) : grid(g), time(t), coefficients(g.n) {}

Spectrum::Spectrum(const Grid1D& g, double t, std::vector<cdouble> values)
    : grid(g), time(t), coefficients(std::move(values)) {
    if (coefficients.size() != grid.n)
        throw std::invalid_argument("Spectrum: coefficient count does not match grid");
}

bool all_finite(const std::vector<cdouble>& values) {
    for (const auto& z : values)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            return false;
    return true;
}

void fft_forward(const Grid1D& g, const cdouble* in, cdouble* out) {
    PlanCache::instance().forward(g.n, in, out);
}

void fft_backward(const Grid1D& g, const cdouble* in, cdouble* out) {
    PlanCache::instance().backward(g.n, in, out);
}

Spectrum to_spectrum(const Field& f) {
    if (f.samples.size() != f.grid.n)
        throw std::invalid_argument("to_spectrum: sample count does not match grid");
    if (!all_finite(f.samples))
        throw std::invalid_argument("to_spectrum: non-finite samples");

    Spectrum s(f.grid, f.time);
    fft_forward(f.grid, f.samples.data(), s.coefficients.data());

    const double dx = f.grid.dx();
    for (std::size_t j = 0; j < f.grid.n; ++j) {
        const double phase = -f.grid.xi(j) * f.grid.origin;
        s.coefficients[j] *= dx * cdouble(std::cos(phase), std::sin(phase));
    }
    return s;
}

Field from_spectrum(const Spectrum& s) {
    if (s.coefficients.size() != s.grid.n)
        throw std::invalid_argument("from_spectrum: coefficient count does not match grid");
    if (!all_finite(s.coefficients))
        throw std::invalid_argument("from_spectrum: non-finite coefficients");

    std::vector<cdouble> scaled(s.grid.n);
    const double inv_length = 1.0 / s.grid.length;
    for (std::size_t j = 0; j < s.grid.n; ++j) {
        const double phase = s.grid.xi(j) * s.grid.origin;
        scaled[j] = s.coefficients[j] * inv_length * cdouble(std::cos(phase), std::sin(phase));
    }

    Field f(s.grid, s.time);
    fft_backward(s.grid, scaled.data(), f.samples.data());
    return f;
}

Field derivative(const Field& f, int order) {
    if (order < 1)
        throw std::invalid_argument("derivative: order must be at least 1");

    Spectrum s = to_spectrum(f);
    for (std::size_t j = 0; j < s.grid.n; ++j) {
        if (s.grid.mode(j) == -static_cast<long>(s.grid.n / 2)) {
            s.coefficients[j] = 0.0;
            continue;
        }
        cdouble m(0.0, s.grid.xi(j));
        cdouble p = 1.0;
        for (int k = 0; k < order; ++k)
            p *= m;
        s.coefficients[j] *= p;
    }
    return from_spectrum(s);
}

Spectrum fractional_multiplier(const Spectrum& s, double order, SobolevKind kind) {
    if (order < 0.0)
        throw std::invalid_argument("fractional_multiplier: order must be nonnegative");

    Spectrum out = s;
    for (std::size_t j = 0; j < s.grid.n; ++j) {
        const double xi = s.grid.xi(j);
        const double m = kind == SobolevKind::homogeneous
                             ? std::pow(std::fabs(xi), order)
                             : std::pow(1.0 + xi * xi, order / 2.0);
        out.coefficients[j] *= m;
    }
    return out;
}

Field fractional_derivative(const Field& f, double s, SobolevKind kind) {
    return from_spectrum(fractional_multiplier(to_spectrum(f), s, kind));
}

Spectrum dealias(const Spectrum& s, double keep_fraction) {
    if (!(keep_fraction > 0.0) || keep_fraction > 1.0)
        throw std::invalid_argument("dealias: keep_fraction must lie in (0, 1]");

    const double cutoff = keep_fraction * static_cast<double>(s.grid.n) / 2.0;
    Spectrum out = s;
    for (std::size_t j = 0; j < s.grid.n; ++j)
        if (std::fabs(static_cast<double>(s.grid.mode(j))) > cutoff)
            out.coefficients[j] = 0.0;
    return out;
}

} // namespace gdnlab
