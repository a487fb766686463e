#include <doctest.h>

#include "gdnlab/norms.hpp"

#include <cmath>
#include <limits>
#include <random>

using namespace gdnlab;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Field step_field(const Grid1D& g, unsigned seed, int levels = 12) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> mag(0.0, 3.0);
    std::uniform_int_distribution<int> pick(0, levels - 1);
    std::vector<double> table(levels);
    for (auto& v : table)
        v = mag(rng);
    Field f(g, 0.0);
    for (auto& z : f.samples)
        z = table[pick(rng)];
    return f;
}

} // namespace

TEST_CASE("lp basics") {
    Grid1D g(64, 2.0 * M_PI);
    Field ones(g, 0.0, std::vector<cdouble>(64, 1.0));
    CHECK(lp_norm(ones, 2.0) == doctest::Approx(std::sqrt(2.0 * M_PI)).epsilon(1e-13));

    Field f = ones;
    f.samples[10] = cdouble(0.0, -7.5);
    CHECK(lp_norm(f, kInf) == doctest::Approx(7.5));

    CHECK_THROWS(lp_norm(f, 0.5));
}

TEST_CASE("Gaussian L1 mass matches sqrt(pi)") {
    Grid1D g(2048, 80.0);
    Field f(g, 0.0);
    for (std::size_t i = 0; i < g.n; ++i)
        f.samples[i] = std::exp(-g.x(i) * g.x(i));
    CHECK(lp_norm(f, 1.0) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-8));
}

TEST_CASE("sobolev norms") {
    Grid1D g(64, 2.0 * M_PI);

    SUBCASE("s=0 equals the L2 norm") {
        std::mt19937_64 rng(5);
        std::normal_distribution<double> dist;
        Field f(g, 0.0);
        for (auto& z : f.samples)
            z = cdouble(dist(rng), dist(rng));
        CHECK(sobolev_norm(f, 0.0, SobolevKind::inhomogeneous) ==
              doctest::Approx(lp_norm(f, 2.0)).epsilon(1e-12));
        CHECK(sobolev_norm(f, 0.0, SobolevKind::homogeneous) ==
              doctest::Approx(lp_norm(f, 2.0)).epsilon(1e-12));
    }
    SUBCASE("single mode picks up the multiplier sqrt(1+xi^2)") {
        Field f(g, 0.0);
        for (std::size_t i = 0; i < g.n; ++i)
            f.samples[i] = std::exp(cdouble(0.0, g.x(i)));
        CHECK(sobolev_norm(f, 1.0, SobolevKind::inhomogeneous) ==
              doctest::Approx(std::sqrt(2.0) * std::sqrt(2.0 * M_PI)).epsilon(1e-12));
    }
}

TEST_CASE("lorentz norm closed forms") {
    Grid1D g(256, 16.0);

    SUBCASE("indicator of measure m") {
        Field f(g, 0.0);
        const std::size_t cells = 48;
        for (std::size_t i = 0; i < cells; ++i)
            f.samples[i] = 1.0;
        const double m = static_cast<double>(cells) * g.dx();
        for (double p : {1.0, 2.0, 3.5}) {
            for (double q : {1.0, 2.0, 7.0}) {
                const double expected = std::pow(p / q, 1.0 / q) * std::pow(m, 1.0 / p);
                CHECK(lorentz_norm(f, p, q) == doctest::Approx(expected).epsilon(1e-13));
            }
            CHECK(lorentz_norm(f, p, kInf) == doctest::Approx(std::pow(m, 1.0 / p)).epsilon(1e-13));
        }
    }
    SUBCASE("q = p recovers the Lebesgue norm on step data") {
        for (unsigned seed : {1u, 2u, 3u}) {
            Field f = step_field(g, seed);
            for (double p : {1.0, 2.0, 4.0})
                CHECK(lorentz_norm(f, p, p) == doctest::Approx(lp_norm(f, p)).epsilon(1e-12));
        }
    }
    SUBCASE("zero field") {
        Field f(g, 0.0);
        CHECK(lorentz_norm(f, 2.0, 1.0) == 0.0);
        CHECK(lorentz_norm(f, 2.0, kInf) == 0.0);
    }
    SUBCASE("homogeneity is exact") {
        Field f = step_field(g, 9);
        Field scaled = f;
        for (auto& z : scaled.samples)
            z *= 3.25;
        CHECK(lorentz_norm(scaled, 2.5, 1.5) ==
              doctest::Approx(3.25 * lorentz_norm(f, 2.5, 1.5)).epsilon(1e-14));
    }
    SUBCASE("p below 1 is rejected") {
        Field f = step_field(g, 10);
        CHECK_THROWS(lorentz_norm(f, 0.9, 2.0));
    }
}

TEST_CASE("lorentz monotone embedding on indicators") {
    Grid1D g(256, 16.0);
    Field f(g, 0.0);
    for (std::size_t i = 100; i < 180; ++i)
        f.samples[i] = 2.0;
    // Both sides are closed-form on an indicator: (p/q)^{1/q} a m^{1/p}.
    for (double p : {1.5, 2.0, 4.0}) {
        const double q1 = 1.0, q2 = 3.0;
        const double lhs = lorentz_norm(f, p, q2);
        const double ratio = std::pow(p / q2, 1.0 / q2) / std::pow(p / q1, 1.0 / q1);
        CHECK(lhs <= ratio * lorentz_norm(f, p, q1) * (1.0 + 1e-12));
        CHECK(lhs == doctest::Approx(ratio * lorentz_norm(f, p, q1)).epsilon(1e-12));
    }
}

TEST_CASE("Holder inequality in Lorentz quasi-norms over random step pairs") {
    Grid1D g(128, 8.0);
    // 1/p = 1/p1 + 1/p2 and 1/q = 1/q1 + 1/q2; constant 2^{1/p} from the
    // rearrangement doubling (fg)*(s) <= f*(s/2) g*(s/2).
    struct Triple {
        double p1, q1, p2, q2;
    };
    const Triple triples[] = {{2.0, 2.0, 2.0, 2.0}, {3.0, 2.0, 6.0, 4.0}, {4.0, 3.0, 4.0, 6.0}};

    double max_ratio = 0.0;
    for (unsigned seed = 0; seed < 1000; ++seed) {
        Field f = step_field(g, 2 * seed + 1, 6);
        Field h = step_field(g, 2 * seed + 2, 6);
        Field prod(g, 0.0);
        for (std::size_t i = 0; i < g.n; ++i)
            prod.samples[i] = f.samples[i] * h.samples[i];

        const Triple& tr = triples[seed % 3];
        const double p = 1.0 / (1.0 / tr.p1 + 1.0 / tr.p2);
        const double q = 1.0 / (1.0 / tr.q1 + 1.0 / tr.q2);
        const double lhs = lorentz_norm(prod, p, q);
        const double rhs = lorentz_norm(f, tr.p1, tr.q1) * lorentz_norm(h, tr.p2, tr.q2);
        if (rhs == 0.0) {
            CHECK(lhs == 0.0);
            continue;
        }
        const double K = std::pow(2.0, 1.0 / p);
        CHECK(lhs <= K * rhs * (1.0 + 1e-12));
        max_ratio = std::max(max_ratio, lhs / rhs);
    }
    MESSAGE("largest observed Holder ratio: ", max_ratio);
    CHECK(max_ratio <= 2.0);
}

TEST_CASE("mixed space-time norms") {
    Grid1D g(64, 4.0);
    Field base(g, 0.0, std::vector<cdouble>(64, 2.0));

    SUBCASE("time-constant data over a unit interval returns the spatial norm") {
        TimeSeriesField ts;
        for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
            Field f = base;
            f.time = t;
            ts.push(std::move(f));
        }
        for (double q : {1.0, 2.0, 5.0})
            CHECK(mixed_norm(ts, q, 2.0) == doctest::Approx(lp_norm(base, 2.0)).epsilon(1e-13));
    }
    SUBCASE("q = infinity takes the max of the snapshot norms") {
        TimeSeriesField ts;
        Field a = base;
        Field b = base;
        b.time = 1.0;
        for (auto& z : b.samples)
            z *= 3.0;
        ts.push(std::move(a));
        ts.push(std::move(b));
        CHECK(mixed_norm(ts, kInf, 2.0) == doctest::Approx(3.0 * lp_norm(base, 2.0)));
    }
    SUBCASE("separable decay e^{-t} g(x) integrates to the closed form") {
        TimeSeriesField ts;
        const int steps = 4000;
        for (int k = 0; k <= steps; ++k) {
            const double t = 10.0 * k / steps;
            Field f = base;
            f.time = t;
            for (auto& z : f.samples)
                z *= std::exp(-t);
            ts.push(std::move(f));
        }
        const double expected = lp_norm(base, 3.0) * std::sqrt((1.0 - std::exp(-20.0)) / 2.0);
        CHECK(mixed_norm(ts, 2.0, 3.0) == doctest::Approx(expected).epsilon(1e-4));
    }
    SUBCASE("fewer than two snapshots is rejected") {
        TimeSeriesField ts;
        ts.push(base);
        CHECK_THROWS(mixed_norm(ts, 2.0, 2.0));
    }
}
