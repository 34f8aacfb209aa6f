#include "coldamp/statz.hpp"

#include <cmath>
#include <random>

#include "doctest.h"

using namespace coldamp;

namespace {

StatzParams defaults() {
    StatzParams p;
    p.beta = 0.08;
    p.u_t = -0.46;
    p.lambda = 0.0;
    p.alpha = 2.0;
    return p;
}

}  // namespace

TEST_CASE("drain current at threshold and at zero u_ds") {
    StatzParams p = defaults();
    CHECK(drain_current(p, -0.46, 0.1) == 0.0);
    CHECK(drain_current(p, -0.60, 0.1) == 0.0);
    CHECK(drain_current(p, -0.30, 0.0) == 0.0);
}

TEST_CASE("drain current at the chosen operating region") {
    StatzParams p = defaults();
    // independent evaluation of the current law
    double expected = 0.08 * 0.084 * 0.084 * std::tanh(2.0 * 0.030);
    double id = drain_current(p, -0.376, 0.030);
    CHECK(id == doctest::Approx(expected).epsilon(1e-12));
    CHECK(id == doctest::Approx(3.3828e-5).epsilon(1e-3));
}

TEST_CASE("reverse region rejected") {
    CHECK_THROWS_AS(drain_current(defaults(), -0.3, -0.01), std::invalid_argument);
    CHECK_THROWS_AS(small_signal(defaults(), -0.3, -0.01), std::invalid_argument);
}

TEST_CASE("small signal in cutoff") {
    SmallSignal ss = small_signal(defaults(), -0.46, 0.05);
    CHECK(ss.g_m == 0.0);
    CHECK(ss.g_ds == 0.0);
}

TEST_CASE("analytic g_ds against the lambda=0 closed form") {
    StatzParams p = defaults();
    double u_gs = -0.376, u_ds = 0.030;
    double v = u_gs - p.u_t;
    double sech = 1.0 / std::cosh(p.alpha * u_ds);
    double expected = p.beta * v * v * p.alpha * sech * sech;
    SmallSignal ss = small_signal(p, u_gs, u_ds);
    CHECK(ss.g_ds == doctest::Approx(expected).epsilon(1e-12));
    CHECK(ss.g_ds == doctest::Approx(1.125e-3).epsilon(1e-3));
}

TEST_CASE("derivatives match central finite differences") {
    StatzParams p = defaults();
    p.lambda = 0.05;  // exercise the channel-modulation terms too
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> gs(p.u_t + 0.02, p.u_t + 0.5);
    std::uniform_real_distribution<double> ds(0.005, 0.5);
    const double h = 1e-6;
    for (int i = 0; i < 100; ++i) {
        double u_gs = gs(rng), u_ds = ds(rng);
        SmallSignal ss = small_signal(p, u_gs, u_ds);
        double fd_gm =
            (drain_current(p, u_gs + h, u_ds) - drain_current(p, u_gs - h, u_ds)) / (2 * h);
        double fd_gds =
            (drain_current(p, u_gs, u_ds + h) - drain_current(p, u_gs, u_ds - h)) / (2 * h);
        CHECK(ss.g_m == doctest::Approx(fd_gm).epsilon(1e-6));
        CHECK(ss.g_ds == doctest::Approx(fd_gds).epsilon(1e-6));
    }
}

TEST_CASE("current is non-negative and non-decreasing in u_gs") {
    StatzParams p = defaults();
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> gs(-1.0, 0.5);
    std::uniform_real_distribution<double> ds(0.0, 0.5);
    for (int i = 0; i < 200; ++i) {
        double a = gs(rng), b = gs(rng), u_ds = ds(rng);
        if (a > b) std::swap(a, b);
        double ia = drain_current(p, a, u_ds);
        double ib = drain_current(p, b, u_ds);
        CHECK(ia >= 0.0);
        CHECK(ib >= ia);
    }
}

TEST_CASE("saturation asymptote") {
    StatzParams p = defaults();
    p.lambda = 0.1;
    double u_gs = -0.2;
    double u_ds = 20.0 / p.alpha;  // alpha*u_ds = 20
    double v = u_gs - p.u_t;
    double asymptote = p.beta * v * v * (1.0 + p.lambda * u_ds);
    CHECK(drain_current(p, u_gs, u_ds) ==
          doctest::Approx(asymptote).epsilon(1e-8));
}

TEST_CASE("per-transistor dissipation at the chosen point is one microwatt") {
    double p_hemt = 30e-3 * 33.6e-6;
    CHECK(p_hemt == doctest::Approx(1.0e-6).epsilon(0.01));
}

TEST_CASE("fit recovers the generating parameters") {
    StatzParams truth = defaults();
    std::vector<IVSample> samples;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            double u_gs = -0.42 + 0.03 * i;
            double u_ds = 0.01 + 0.0125 * j;
            samples.push_back({u_gs, u_ds, drain_current(truth, u_gs, u_ds)});
        }
    FitResult fit = fit_statz(samples, 0.0, 2.0, 0.1, -0.55);
    CHECK(fit.converged);
    CHECK(fit.params.beta == doctest::Approx(0.08).epsilon(1e-6));
    CHECK(fit.params.u_t == doctest::Approx(-0.46).epsilon(1e-6));
    CHECK(fit.rms_residual < 1e-12);
}

TEST_CASE("fit with one percent noise stays within three percent on beta") {
    StatzParams truth = defaults();
    for (unsigned seed = 0; seed < 100; ++seed) {
        std::mt19937 rng(seed);
        std::normal_distribution<double> noise(0.0, 0.01);
        std::vector<IVSample> samples;
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) {
                double u_gs = -0.44 + 0.04 * i;
                double u_ds = 0.01 + 0.0125 * j;
                double id = drain_current(truth, u_gs, u_ds) * (1.0 + noise(rng));
                samples.push_back({u_gs, u_ds, std::max(id, 0.0)});
            }
        FitResult fit = fit_statz(samples, 0.0, 2.0, 0.1, -0.55);
        CHECK(std::abs(fit.params.beta - 0.08) / 0.08 < 0.03);
    }
}

TEST_CASE("degenerate sample sets are rejected") {
    StatzParams truth = defaults();
    std::vector<IVSample> three;
    for (int j = 0; j < 3; ++j)
        three.push_back({-0.35, 0.01 * (j + 1), drain_current(truth, -0.35, 0.01 * (j + 1))});
    CHECK_THROWS(fit_statz(three, 0.0, 2.0, 0.1, -0.55));

    std::vector<IVSample> one_gs;
    for (int j = 0; j < 6; ++j)
        one_gs.push_back({-0.35, 0.01 * (j + 1), drain_current(truth, -0.35, 0.01 * (j + 1))});
    CHECK_THROWS_AS(fit_statz(one_gs, 0.0, 2.0, 0.1, -0.55), std::invalid_argument);
}
