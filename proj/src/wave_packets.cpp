#include "gdnlab/wave_packets.hpp"

#include "gdnlab/norms.hpp"
#include "gdnlab/vector_field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gdnlab {

namespace {

constexpr double kChi1Cutoff = 120.0;

double bump_raw(double y) {
    const double u = 1.0 - y * y;
    if (u < 1e-12)
        return 0.0;
    return std::exp(-1.0 / u);
}

// chi'/chi = -2y/u^2 and chi''/chi = 4y^2/u^4 - 2(1+3y^2)/u^3 with u = 1-y^2.
double bump_raw_d1(double y) {
    const double u = 1.0 - y * y;
    if (u < 1e-12)
        return 0.0;
    return bump_raw(y) * (-2.0 * y / (u * u));
}

double bump_raw_d2(double y) {
    const double u = 1.0 - y * y;
    if (u < 1e-12)
        return 0.0;
    const double u2 = u * u;
    return bump_raw(y) * (4.0 * y * y / (u2 * u2) - 2.0 * (1.0 + 3.0 * y * y) / (u2 * u));
}

double simpson(double a, double b, double fa, double fm, double fb, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = bump_raw(lm), frm = bump_raw(rm);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::fabs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson(a, m, fa, flm, fm, tol / 2.0, depth - 1) +
           simpson(m, b, fm, frm, fb, tol / 2.0, depth - 1);
}

double bump_integral() {
    static const double value =
        simpson(-1.0, 1.0, 0.0, bump_raw(0.0), 0.0, 1e-13, 48);
    return value;
}

// Gauss-Legendre nodes over the bump support, with the chirped-bump factor
// w_j e^{i y_j^2/4} chi(y_j)/chi_norm baked in so chi1 reduces to one
// exponential sum per evaluation.
struct BumpRule {
    std::vector<double> node;
    std::vector<cdouble> chirped;
};

const BumpRule& bump_rule() {
    static const BumpRule rule = [] {
        constexpr std::size_t n = 400;
        BumpRule r;
        r.node.resize(n);
        std::vector<double> weight(n);
        for (std::size_t i = 0; i < n / 2; ++i) {
            double x = std::cos(M_PI * (static_cast<double>(i) + 0.75) /
                                (static_cast<double>(n) + 0.5));
            double dp = 0.0;
            for (int iter = 0; iter < 64; ++iter) {
                double p0 = 1.0, p1 = x;
                for (std::size_t k = 2; k <= n; ++k) {
                    const double p2 =
                        ((2.0 * static_cast<double>(k) - 1.0) * x * p1 -
                         (static_cast<double>(k) - 1.0) * p0) /
                        static_cast<double>(k);
                    p0 = p1;
                    p1 = p2;
                }
                dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
                const double step = p1 / dp;
                x -= step;
                if (std::fabs(step) < 1e-15)
                    break;
            }
            const double w = 2.0 / ((1.0 - x * x) * dp * dp);
            r.node[n - 1 - i] = x;
            r.node[i] = -x;
            weight[n - 1 - i] = w;
            weight[i] = w;
        }
        r.chirped.resize(n);
        for (std::size_t j = 0; j < n; ++j)
            r.chirped[j] =
                std::polar(weight[j] * bump_raw(r.node[j]), r.node[j] * r.node[j] / 4.0);
        return r;
    }();
    return rule;
}

void check_packet_in_box(double v, double t, const Grid1D& g, const char* who) {
    if (!(t > 0.0))
        throw std::domain_error(std::string(who) + ": packet scale sqrt(t) needs t > 0");
    const double half_width = std::sqrt(t);
    if (!(v * t - half_width > g.origin && v * t + half_width < g.origin + g.length))
        throw std::out_of_range(std::string(who) + ": packet support leaves the box");
}

// Zero-padded spectral upsampling; exact for band-limited data.
Field upsample4(const Field& f) {
    const Grid1D& g = f.grid;
    Spectrum coarse = to_spectrum(f);
    Grid1D fine_grid(4 * g.n, g.length, g.origin);
    Spectrum fine(fine_grid, f.time);
    for (std::size_t j = 0; j < g.n; ++j) {
        const long k = g.mode(j);
        const std::size_t slot =
            k >= 0 ? static_cast<std::size_t>(k)
                   : fine_grid.n - static_cast<std::size_t>(-k);
        fine.coefficients[slot] = coarse.coefficients[j];
    }
    return from_spectrum(fine);
}

cdouble windowed_pairing(const Field& fine, double v, const PacketConfig& cfg) {
    const Grid1D& g = fine.grid;
    const double t = fine.time;
    const double scale = std::sqrt(t);
    const double dx = g.dx();
    const double lo = v * t - scale, hi = v * t + scale;
    const auto first = static_cast<std::size_t>(
        std::max(0.0, std::ceil((lo - g.origin) / dx)));
    const auto last = static_cast<std::size_t>(
        std::min(static_cast<double>(g.n) - 1.0, std::floor((hi - g.origin) / dx)));

    cdouble acc = 0.0;
    for (std::size_t i = first; i <= last; ++i) {
        const double x = g.x(i);
        const double amp = cfg.chi_norm * bump_raw((x - v * t) / scale);
        if (amp == 0.0)
            continue;
        acc += fine.samples[i] * std::polar(amp, -x * x / (4.0 * t));
    }
    return acc * dx;
}

void check_velocities(const std::vector<double>& velocities, const char* who) {
    if (velocities.empty())
        throw std::invalid_argument(std::string(who) + ": empty velocity grid");
    for (std::size_t j = 0; j + 1 < velocities.size(); ++j)
        if (!(velocities[j] < velocities[j + 1]))
            throw std::invalid_argument(std::string(who) +
                                        ": velocities must be strictly increasing");
}

// Trapezoid weights on a (possibly non-uniform) increasing grid.
std::vector<double> trapezoid_weights(const std::vector<double>& v) {
    const std::size_t m = v.size();
    std::vector<double> w(m, 0.0);
    if (m < 2)
        return w;
    w[0] = 0.5 * (v[1] - v[0]);
    w[m - 1] = 0.5 * (v[m - 1] - v[m - 2]);
    for (std::size_t j = 1; j + 1 < m; ++j)
        w[j] = 0.5 * (v[j + 1] - v[j - 1]);
    return w;
}

} // namespace

PacketConfig::PacketConfig() : chi_norm(1.0 / bump_integral()) {}

void PacketConfig::validate() const {
    if (!(chi_norm > 0.0) || !(quadrature_tol > 0.0))
        throw std::invalid_argument("PacketConfig: chi_norm and quadrature_tol must be positive");
    if (std::fabs(chi_norm * bump_integral() - 1.0) > quadrature_tol)
        throw std::invalid_argument("PacketConfig: chi does not integrate to 1");
}

double chi(const PacketConfig& cfg, double y) { return cfg.chi_norm * bump_raw(y); }

cdouble chi1(const PacketConfig& cfg, double z) {
    if (!(std::fabs(z) <= kChi1Cutoff))
        return {0.0, 0.0};
    const BumpRule& rule = bump_rule();
    cdouble acc = 0.0;
    for (std::size_t j = 0; j < rule.node.size(); ++j)
        acc += rule.chirped[j] * std::polar(1.0, -z * rule.node[j]);
    return cfg.chi_norm * std::polar(1.0, z * z) * acc;
}

void PacketProfile::validate() const {
    if (velocities.size() != gamma.size())
        throw std::invalid_argument("PacketProfile: velocity/gamma length mismatch");
    if (!(time > 0.0))
        throw std::invalid_argument("PacketProfile: packet scale sqrt(t) needs t > 0");
    check_velocities(velocities, "PacketProfile");
}

Field wave_packet(double v, double t, const Grid1D& grid, const PacketConfig& cfg) {
    check_packet_in_box(v, t, grid, "wave_packet");
    const double scale = std::sqrt(t);
    Field out(grid, t);
    for (std::size_t i = 0; i < grid.n; ++i) {
        const double x = grid.x(i);
        const double amp = chi(cfg, (x - v * t) / scale);
        out.samples[i] = amp == 0.0 ? cdouble(0.0) : std::polar(amp, x * x / (4.0 * t));
    }
    return out;
}

Field packet_residual(double v, double t, const Grid1D& grid, const PacketConfig& cfg) {
    check_packet_in_box(v, t, grid, "packet_residual");
    const double scale = std::sqrt(t);
    Field out(grid, t);
    for (std::size_t i = 0; i < grid.n; ++i) {
        const double x = grid.x(i);
        const double y = (x - v * t) / scale;
        const double c0 = cfg.chi_norm * bump_raw(y);
        if (c0 == 0.0) {
            out.samples[i] = 0.0;
            continue;
        }
        const double c1 = cfg.chi_norm * bump_raw_d1(y);
        const double c2 = cfg.chi_norm * bump_raw_d2(y);
        const cdouble bracket(2.0 * c2, c0 + y * c1);
        out.samples[i] = std::polar(1.0, x * x / (4.0 * t)) * bracket / (2.0 * t);
    }
    return out;
}

cdouble gamma_physical(const Field& f, double v, const PacketConfig& cfg) {
    check_packet_in_box(v, f.time, f.grid, "gamma_physical");
    return windowed_pairing(upsample4(f), v, cfg);
}

cdouble gamma_fourier(const Spectrum& s, double v, const PacketConfig& cfg) {
    check_packet_in_box(v, s.time, s.grid, "gamma_fourier");
    const double t = s.time;
    const double rt = std::sqrt(t);
    cdouble acc = 0.0;
    for (std::size_t j = 0; j < s.grid.n; ++j) {
        const double xi = s.grid.xi(j);
        const double z = rt * (xi - 0.5 * v);
        if (std::fabs(z) > kChi1Cutoff)
            continue;
        acc += s.coefficients[j] * std::polar(1.0, t * xi * xi) * std::conj(chi1(cfg, z));
    }
    return acc * (rt / s.grid.length);
}

PacketProfile profile(const Field& f, const std::vector<double>& velocities,
                      const PacketConfig& cfg) {
    check_velocities(velocities, "profile");
    for (double v : velocities)
        check_packet_in_box(v, f.time, f.grid, "profile");

    Field fine = upsample4(f);
    PacketProfile out;
    out.time = f.time;
    out.velocities = velocities;
    out.source = ProfileSource::physical;
    out.gamma.reserve(velocities.size());
    for (double v : velocities)
        out.gamma.push_back(windowed_pairing(fine, v, cfg));
    return out;
}

std::vector<double> velocity_lattice(const Grid1D& grid, std::size_t count, double v_max) {
    if (count < 3 || count % 2 == 0)
        throw std::invalid_argument("velocity_lattice: count must be odd and at least 3");
    if (!(v_max > 0.0))
        throw std::invalid_argument("velocity_lattice: v_max must be positive");

    const double dv = 4.0 * M_PI / grid.length;  // 2 * dxi
    const auto half = static_cast<double>(count / 2);
    const long stride = std::max(1L, std::lround(v_max / (dv * half)));
    std::vector<double> v(count);
    for (std::size_t j = 0; j < count; ++j)
        v[j] = dv * static_cast<double>(stride) *
               (static_cast<double>(j) - half);
    return v;
}

PacketProfile fourier_profile(const Spectrum& s, const std::vector<double>& velocities,
                              const PacketConfig& cfg) {
    check_velocities(velocities, "fourier_profile");
    for (double v : velocities)
        check_packet_in_box(v, s.time, s.grid, "fourier_profile");

    const double t = s.time;
    const double rt = std::sqrt(t);
    const double dxi = 2.0 * M_PI / s.grid.length;
    const std::size_t n = s.grid.n;

    PacketProfile out;
    out.time = t;
    out.velocities = velocities;
    out.source = ProfileSource::fourier;
    out.gamma.resize(velocities.size());

    // Half-velocities on the Fourier lattice share chi1 arguments across
    // modes: z = rt * dxi * (k - m_j).  Off-lattice input falls back to the
    // per-velocity sum.
    std::vector<long> lattice_index(velocities.size());
    bool on_lattice = true;
    for (std::size_t j = 0; j < velocities.size(); ++j) {
        const double m = velocities[j] / (2.0 * dxi);
        lattice_index[j] = std::lround(m);
        if (std::fabs(m - static_cast<double>(lattice_index[j])) > 1e-9)
            on_lattice = false;
    }
    if (!on_lattice) {
        for (std::size_t j = 0; j < velocities.size(); ++j)
            out.gamma[j] = gamma_fourier(s, velocities[j], cfg);
        return out;
    }

    std::vector<cdouble> phased(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double xi = s.grid.xi(j);
        phased[j] = s.coefficients[j] * std::polar(1.0, t * xi * xi);
    }

    const long k_lo = -static_cast<long>(n / 2);
    const long k_hi = static_cast<long>(n / 2) - 1;
    const long m_lo = lattice_index.front();
    const long m_hi = lattice_index.back();
    const auto d_cut = static_cast<long>(std::floor(kChi1Cutoff / (rt * dxi)));
    const long d_lo = std::max(k_lo - m_hi, -d_cut);
    const long d_hi = std::min(k_hi - m_lo, d_cut);
    if (d_lo > d_hi)
        return out;  // packet band beyond the resolved spectrum: all gammas 0

    std::vector<cdouble> chi1_conj(static_cast<std::size_t>(d_hi - d_lo + 1));
    for (long d = d_lo; d <= d_hi; ++d)
        chi1_conj[static_cast<std::size_t>(d - d_lo)] =
            std::conj(chi1(cfg, rt * dxi * static_cast<double>(d)));

    for (std::size_t j = 0; j < velocities.size(); ++j) {
        const long m = lattice_index[j];
        const long first = std::max(k_lo, m + d_lo);
        const long last = std::min(k_hi, m + d_hi);
        cdouble acc = 0.0;
        for (long k = first; k <= last; ++k) {
            const std::size_t slot =
                k >= 0 ? static_cast<std::size_t>(k) : n - static_cast<std::size_t>(-k);
            acc += phased[slot] * chi1_conj[static_cast<std::size_t>(k - m - d_lo)];
        }
        out.gamma[j] = acc * (rt / s.grid.length);
    }
    return out;
}

std::map<std::string, double> difference_report(const Field& f, const PacketProfile& p) {
    p.validate();
    const double t = f.time;
    if (std::fabs(p.time - t) > 1e-9 * std::max(1.0, std::fabs(t)))
        throw std::invalid_argument("difference_report: field and profile are at different times");

    const std::size_t m = p.velocities.size();
    const std::size_t n = f.grid.n;
    const Spectrum s = to_spectrum(f);
    const long nyquist = -static_cast<long>(n / 2);

    // Band-limited u and u_x along the rays x = v t.
    std::vector<cdouble> u_ray(m), ux_ray(m), uhat(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double x = p.velocities[j] * t;
        cdouble u_acc = 0.0, ux_acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double xi = s.grid.xi(k);
            const cdouble term = s.coefficients[k] * std::polar(1.0, xi * x);
            u_acc += term;
            if (s.grid.mode(k) != nyquist)
                ux_acc += term * cdouble(0.0, xi);
        }
        u_ray[j] = u_acc / f.grid.length;
        ux_ray[j] = ux_acc / f.grid.length;

        const double xi_j = 0.5 * p.velocities[j];
        cdouble hat_acc = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            hat_acc += f.samples[i] * std::polar(1.0, -xi_j * f.grid.x(i));
        uhat[j] = hat_acc * f.grid.dx();
    }

    const double lu = lp_norm(apply_L(f), 2.0);
    const double lux = lp_norm(apply_L(derivative(f, 1)), 2.0);

    std::map<std::string, double> out{
        {"r1", 0.0}, {"r2", 0.0}, {"r3", 0.0}, {"r4", 0.0}, {"r5", 0.0}};
    if (lu == 0.0)
        return out;

    const double rt_inv = 1.0 / std::sqrt(t);
    const cdouble fourier_const = std::sqrt(2.0 * M_PI) * cdouble(1.0, 1.0);
    const std::vector<double> wv = trapezoid_weights(p.velocities);

    double sup1 = 0.0, sup3 = 0.0, sup4 = 0.0, sq1 = 0.0, sq4 = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        const double v = p.velocities[j];
        const cdouble pack = rt_inv * std::polar(1.0, v * v * t / 4.0) * p.gamma[j];
        const double d1 = std::abs(u_ray[j] - pack);
        const double d3 = std::abs(ux_ray[j] - cdouble(0.0, 0.5 * v) * pack);
        const double xi_j = 0.5 * v;
        const double d4 = std::abs(
            uhat[j] - fourier_const * std::polar(1.0, -t * xi_j * xi_j) * p.gamma[j]);
        sup1 = std::max(sup1, d1);
        sup3 = std::max(sup3, d3);
        sup4 = std::max(sup4, d4);
        sq1 += wv[j] * d1 * d1;
        sq4 += 0.5 * wv[j] * d4 * d4;  // d xi = dv/2
    }

    out["r1"] = std::pow(t, 0.75) * sup1 / lu;
    out["r2"] = t * std::sqrt(sq1) / lu;
    out["r3"] = std::pow(t, 0.75) * sup3 / (lu + lux);
    out["r4"] = std::pow(t, 0.25) * sup4 / lu;
    out["r5"] = std::sqrt(t) * std::sqrt(sq4) / lu;
    return out;
}

cdouble remainder_from_gamma(cdouble g_prev, cdouble g_mid, cdouble g_next,
                             double t_prev, double t_mid, double t_next,
                             double v, double sigma) {
    if (!(t_prev < t_mid && t_mid < t_next))
        throw std::invalid_argument("remainder_from_gamma: times must be increasing");
    if (!(t_prev > 0.0))
        throw std::domain_error("remainder_from_gamma: times must be positive");

    const double hm = t_mid - t_prev, hp = t_next - t_mid;
    const cdouble gamma_t = g_prev * (-hp / (hm * (hm + hp))) +
                            g_mid * ((hp - hm) / (hm * hp)) +
                            g_next * (hm / (hp * (hm + hp)));
    const double power = std::pow(std::norm(g_mid), sigma);
    return 0.5 * v * std::pow(t_mid, -sigma) * power * g_mid - cdouble(0.0, 1.0) * gamma_t;
}

cdouble remainder_R(const Trajectory& traj, double t, double v, const PacketConfig& cfg) {
    const auto& times = traj.snapshots.times;
    std::size_t k = times.size();
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (std::fabs(times[i] - t) <= 1e-9 * std::max(1.0, std::fabs(t))) {
            k = i;
            break;
        }
    }
    if (k == times.size())
        throw std::invalid_argument("remainder_R: t is not a stored snapshot time");
    if (k == 0 || k + 1 == times.size())
        throw std::out_of_range("remainder_R: need snapshots on both sides of t");

    const cdouble g_prev = gamma_physical(traj.snapshots.fields[k - 1], v, cfg);
    const cdouble g_mid = gamma_physical(traj.snapshots.fields[k], v, cfg);
    const cdouble g_next = gamma_physical(traj.snapshots.fields[k + 1], v, cfg);
    return remainder_from_gamma(g_prev, g_mid, g_next, times[k - 1], times[k], times[k + 1],
                                v, traj.config.sigma);
}

} // namespace gdnlab
