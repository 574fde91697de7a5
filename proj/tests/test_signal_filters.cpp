#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "gridest/signal_filters.hpp"

using namespace gridest;

TEST_CASE("low-pass has unit DC gain") {
    LowPassFilter lp(1000.0);
    const double dt = 1e-3;
    for (int k = 0; k < 25; ++k) lp.step(0.7, dt); // 25/alpha seconds
    CHECK(std::abs(lp.output() - 0.7) <= 1e-9);
}

TEST_CASE("low-pass step response at one sample") {
    LowPassFilter lp(1000.0);
    CHECK(lp.step(1.0, 1e-3) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-15));
}

TEST_CASE("low-pass matches the continuous solution exactly for piecewise-constant input") {
    // Random staircase, each level held for a handful of samples; the exact
    // continuous solution is composed segment-wise.
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> level(-2.0, 2.0);
    std::uniform_int_distribution<int> hold(1, 7);
    const double alpha = 137.0, dt = 1e-3;
    LowPassFilter lp(alpha);
    double y_exact = 0.0;
    for (int seg = 0; seg < 200; ++seg) {
        const double u = level(rng);
        const int n = hold(rng);
        for (int k = 0; k < n; ++k) {
            const double got = lp.step(u, dt);
            y_exact = u + (y_exact - u) * std::exp(-alpha * dt);
            CHECK(std::abs(got - y_exact) <= 1e-14);
        }
    }
}

TEST_CASE("low-pass gain at the pole frequency is 1/sqrt(2)") {
    const double alpha = 100.0, dt = 1e-5;
    LowPassFilter lp(alpha);
    double peak = 0.0;
    double t = 0.0;
    const double settle = 10.0 / alpha;
    for (int k = 0; k < 200000; ++k) { // 2 s
        const double out = lp.step(std::sin(alpha * t), dt);
        if (t > settle) peak = std::max(peak, std::abs(out));
        t += dt;
    }
    CHECK(peak == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-3));
}

TEST_CASE("dirty derivative of a constant is zero") {
    DirtyDerivative dd(1000.0);
    double out = 1.0;
    for (int k = 0; k < 20; ++k) out = dd.step(3.25, 1e-3);
    CHECK(std::abs(out) <= 1e-12);
}

TEST_CASE("dirty derivative of a ramp settles to the slope") {
    const double alpha = 1000.0, dt = 1e-3, m = -0.37;
    DirtyDerivative dd(alpha);
    double out = 0.0;
    for (int k = 0; k < 100; ++k) out = dd.step(m * static_cast<double>(k) * dt, dt);
    CHECK(std::abs(out - m) <= 1e-6 * std::abs(m));
}

TEST_CASE("dirty derivative of a step is a decaying transient") {
    DirtyDerivative dd(1000.0);
    const double dt = 1e-3;
    dd.step(0.0, dt);
    const double jump = dd.step(1.0, dt);
    CHECK(jump > 0.0);
    double out = jump;
    for (int k = 0; k < 30; ++k) {
        const double next = dd.step(1.0, dt);
        CHECK(std::abs(next) < std::abs(out) + 1e-15);
        out = next;
    }
    CHECK(std::abs(out) <= 1e-9 * jump);
}

TEST_CASE("filters are linear") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> noise(0.0, 1.0);
    const double alpha = 250.0, dt = 1e-3, a = 1.7, b = -0.4;
    LowPassFilter fu(alpha), fv(alpha), fw(alpha);
    DirtyDerivative du(alpha), dv(alpha), dw(alpha);
    for (int k = 0; k < 500; ++k) {
        const double u = noise(rng), v = noise(rng);
        const double lw = fw.step(a * u + b * v, dt);
        const double lsum = a * fu.step(u, dt) + b * fv.step(v, dt);
        CHECK(std::abs(lw - lsum) <= 1e-12 * std::max(1.0, std::abs(lw)));
        const double dw_out = dw.step(a * u + b * v, dt);
        const double dsum = a * du.step(u, dt) + b * dv.step(v, dt);
        CHECK(std::abs(dw_out - dsum) <= 1e-9 * std::max(1.0, std::abs(dw_out)));
    }
}

TEST_CASE("delay line returns the input from exactly d/dt samples ago") {
    DelayLine line(0.005, 0.001);
    CHECK(line.length() == 5);

    SUBCASE("constant stream") {
        for (int k = 0; k < 5; ++k) CHECK(line.step(4.2) == 0.0); // fill value
        for (int k = 0; k < 20; ++k) CHECK(line.step(4.2) == 4.2);
    }

    SUBCASE("impulse") {
        CHECK(line.step(1.0) == 0.0);
        for (int k = 1; k < 5; ++k) CHECK(line.step(0.0) == 0.0);
        CHECK(line.step(0.0) == 1.0); // exactly d/dt samples later
        for (int k = 0; k < 10; ++k) CHECK(line.step(0.0) == 0.0);
    }

    SUBCASE("random stream is delayed bit-exactly") {
        std::mt19937_64 rng(17);
        std::normal_distribution<double> noise(0.0, 1.0);
        std::vector<double> in;
        for (int k = 0; k < 500; ++k) {
            in.push_back(noise(rng));
            const double out = line.step(in.back());
            if (static_cast<std::size_t>(k) >= line.length()) {
                CHECK(out == in[static_cast<std::size_t>(k) - line.length()]);
            } else {
                CHECK(out == 0.0);
            }
        }
    }
}

TEST_CASE("delay line rejects non-aligned delays") {
    CHECK_THROWS_AS(DelayLine(0.0055, 0.001), ConfigError);
    CHECK_THROWS_AS(DelayLine(0.0, 0.001), ConfigError);
    CHECK_NOTHROW(DelayLine(2.0, 1e-3));
}

TEST_CASE("filter constructors reject non-positive poles") {
    CHECK_THROWS_AS(LowPassFilter(0.0), ConfigError);
    CHECK_THROWS_AS(LowPassFilter(-3.0), ConfigError);
}
