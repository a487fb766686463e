#include <doctest.h>

#include "gdnlab/grid.hpp"

#include <cmath>
#include <random>

using namespace gdnlab;

namespace {

Field random_field(const Grid1D& g, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    Field f(g, 0.0);
    for (auto& z : f.samples)
        z = cdouble(dist(rng), dist(rng));
    return f;
}

double sup_diff(const Field& a, const Field& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.samples.size(); ++i)
        m = std::max(m, std::abs(a.samples[i] - b.samples[i]));
    return m;
}

} // namespace

TEST_CASE("grid construction validates shape") {
    CHECK_THROWS(Grid1D(7, 1.0));
    CHECK_THROWS(Grid1D(6, 1.0));
    CHECK_THROWS(Grid1D(16, -1.0));
    Grid1D g(16, 2.0 * M_PI);
    CHECK(g.dx() == doctest::Approx(2.0 * M_PI / 16));
    CHECK(g.origin == doctest::Approx(-M_PI));
    CHECK(g.mode(0) == 0);
    CHECK(g.mode(8) == -8);
    CHECK(g.mode(15) == -1);
}

TEST_CASE("constant field transforms to a single zero-mode coefficient") {
    Grid1D g(16, 2.0 * M_PI);
    Field f(g, 0.0, std::vector<cdouble>(16, 1.0));
    Spectrum s = to_spectrum(f);
    CHECK(std::abs(s.coefficients[0] - cdouble(2.0 * M_PI, 0.0)) < 1e-13);
    for (std::size_t j = 1; j < 16; ++j)
        CHECK(std::abs(s.coefficients[j]) < 1e-13);
}

TEST_CASE("pure mode e^{ix} lands in the k=1 slot") {
    Grid1D g(32, 2.0 * M_PI);
    Field f(g, 0.0);
    for (std::size_t i = 0; i < g.n; ++i)
        f.samples[i] = std::exp(cdouble(0.0, g.x(i)));
    Spectrum s = to_spectrum(f);
    CHECK(std::abs(s.coefficients[1] - cdouble(2.0 * M_PI, 0.0)) < 1e-12);
    for (std::size_t j = 0; j < g.n; ++j)
        if (j != 1)
            CHECK(std::abs(s.coefficients[j]) < 1e-12);
}

TEST_CASE("round trip reproduces samples") {
    Grid1D g(512, 37.0, -11.0);
    Field f = random_field(g, 1234);
    Field back = from_spectrum(to_spectrum(f));
    double scale = 0.0;
    for (const auto& z : f.samples)
        scale = std::max(scale, std::abs(z));
    CHECK(sup_diff(f, back) < 1e-13 * scale * static_cast<double>(g.n));
    CHECK(back.time == f.time);
}

TEST_CASE("zero spectrum inverts to the zero field") {
    Grid1D g(16, 5.0);
    Field f = from_spectrum(Spectrum(g, 0.0));
    for (const auto& z : f.samples)
        CHECK(std::abs(z) == 0.0);
}

TEST_CASE("k=0 coefficient 2*pi on L=2*pi inverts to the constant 1") {
    Grid1D g(16, 2.0 * M_PI);
    Spectrum s(g, 0.0);
    s.coefficients[0] = 2.0 * M_PI;
    Field f = from_spectrum(s);
    for (const auto& z : f.samples)
        CHECK(std::abs(z - cdouble(1.0, 0.0)) < 1e-14);
}

TEST_CASE("Parseval identity under the dx / (1/L) convention") {
    for (std::size_t n : {std::size_t(64), std::size_t(4096), std::size_t(65536)}) {
        Grid1D g(n, 17.5, -3.0);
        Field f = random_field(g, 99 + n);
        Spectrum s = to_spectrum(f);
        double phys = 0.0, spec = 0.0;
        for (const auto& z : f.samples)
            phys += std::norm(z);
        phys *= g.dx();
        for (const auto& c : s.coefficients)
            spec += std::norm(c);
        spec /= g.length;
        CHECK(phys == doctest::Approx(spec).epsilon(1e-12));
    }
}

TEST_CASE("derivative of sin is cos") {
    Grid1D g(128, 2.0 * M_PI);
    Field f(g, 0.0);
    for (std::size_t i = 0; i < g.n; ++i)
        f.samples[i] = std::sin(g.x(i));
    Field d = derivative(f, 1);
    double err = 0.0;
    for (std::size_t i = 0; i < g.n; ++i)
        err = std::max(err, std::abs(d.samples[i] - cdouble(std::cos(g.x(i)), 0.0)));
    CHECK(err < 1e-12);
}

TEST_CASE("derivative of a constant vanishes") {
    Grid1D g(64, 3.0);
    Field f(g, 0.0, std::vector<cdouble>(64, cdouble(2.5, -1.0)));
    Field d = derivative(f, 1);
    for (const auto& z : d.samples)
        CHECK(std::abs(z) < 1e-13);
}

TEST_CASE("second derivative of e^{2ix} is -4 e^{2ix}") {
    Grid1D g(64, 2.0 * M_PI);
    Field f(g, 0.0);
    for (std::size_t i = 0; i < g.n; ++i)
        f.samples[i] = std::exp(cdouble(0.0, 2.0 * g.x(i)));
    Field d = derivative(f, 2);
    double err = 0.0;
    for (std::size_t i = 0; i < g.n; ++i)
        err = std::max(err, std::abs(d.samples[i] + 4.0 * f.samples[i]));
    CHECK(err < 1e-11);
}

TEST_CASE("iterated first derivatives equal the second derivative coefficient-wise") {
    Grid1D g(128, 11.0);
    Field f = random_field(g, 7);
    Spectrum twice = to_spectrum(derivative(derivative(f, 1), 1));
    Spectrum second = to_spectrum(derivative(f, 2));
    for (std::size_t j = 0; j < g.n; ++j)
        CHECK(std::abs(twice.coefficients[j] - second.coefficients[j]) < 1e-9);
}

TEST_CASE("fractional derivative basics") {
    Grid1D g(64, 2.0 * M_PI);

    SUBCASE("homogeneous s>0 kills the constant") {
        Field f(g, 0.0, std::vector<cdouble>(64, 3.0));
        Field d = fractional_derivative(f, 0.5, SobolevKind::homogeneous);
        for (const auto& z : d.samples)
            CHECK(std::abs(z) < 1e-13);
    }
    SUBCASE("inhomogeneous s=0 is the identity") {
        Field f = random_field(g, 11);
        Field d = fractional_derivative(f, 0.0, SobolevKind::inhomogeneous);
        CHECK(sup_diff(f, d) < 1e-13);
    }
    SUBCASE("|1|^{1/2} = 1 on the unit mode") {
        Field f(g, 0.0);
        for (std::size_t i = 0; i < g.n; ++i)
            f.samples[i] = std::exp(cdouble(0.0, g.x(i)));
        Field d = fractional_derivative(f, 0.5, SobolevKind::homogeneous);
        CHECK(sup_diff(f, d) < 1e-12);
    }
    SUBCASE("negative order is rejected") {
        Field f = random_field(g, 12);
        CHECK_THROWS(fractional_derivative(f, -0.5, SobolevKind::homogeneous));
    }
    SUBCASE("order one homogeneous matches the derivative magnitude coefficient-wise") {
        Field f = random_field(g, 13);
        Spectrum a = to_spectrum(fractional_derivative(f, 1.0, SobolevKind::homogeneous));
        Spectrum b = to_spectrum(derivative(f, 1));
        for (std::size_t j = 0; j < g.n; ++j) {
            if (j == g.n / 2)
                continue; // derivative() zeroes the unpaired mode; |xi| keeps it
            CHECK(std::abs(a.coefficients[j]) ==
                  doctest::Approx(std::abs(b.coefficients[j])).epsilon(1e-10));
        }
    }
}

TEST_CASE("dealias zeroing rules") {
    Grid1D g(32, 2.0 * M_PI);
    Field f = random_field(g, 21);
    Spectrum s = to_spectrum(f);

    SUBCASE("keep_fraction 1 is the identity") {
        Spectrum out = dealias(s, 1.0);
        for (std::size_t j = 0; j < g.n; ++j)
            CHECK(out.coefficients[j] == s.coefficients[j]);
    }
    SUBCASE("mode near the edge is removed at half fraction") {
        Spectrum one(g, 0.0);
        one.coefficients[g.n / 2 - 1] = 1.0; // k = 15
        Spectrum out = dealias(one, 0.5);
        for (const auto& c : out.coefficients)
            CHECK(std::abs(c) == 0.0);
    }
    SUBCASE("coefficient energy never grows") {
        for (double frac : {0.3, 2.0 / 3.0, 0.9, 1.0}) {
            Spectrum out = dealias(s, frac);
            double before = 0.0, after = 0.0;
            for (std::size_t j = 0; j < g.n; ++j) {
                before += std::norm(s.coefficients[j]);
                after += std::norm(out.coefficients[j]);
            }
            CHECK(after <= before + 1e-15);
        }
    }
    SUBCASE("fraction outside (0,1] is rejected") {
        CHECK_THROWS(dealias(s, 0.0));
        CHECK_THROWS(dealias(s, 1.5));
    }
}

TEST_CASE("non-finite samples are rejected") {
    Grid1D g(16, 1.0);
    Field f(g, 0.0);
    f.samples[3] = cdouble(std::nan(""), 0.0);
    CHECK_THROWS(to_spectrum(f));
}
