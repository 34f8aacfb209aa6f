#include "coldamp/ac.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <stdexcept>

#include "doctest.h"

using namespace coldamp;
using cplx = std::complex<double>;

namespace {

constexpr double kPi = std::numbers::pi;

LinearCircuit linear_of(const Netlist& n) { return linearize(n, solve_op(n)); }

}  // namespace

TEST_CASE("rc low-pass hits -3.01 dB at the corner") {
    Netlist n = parse(
        "V1 1 0 0 AC 1\nR1 1 2 1k\nC1 2 0 1n\n"
        ".probe V(1) I(R1) V(2) I(C1)\n");
    LinearCircuit c = linear_of(n);
    double fc = 1.0 / (2.0 * kPi * 1e3 * 1e-9);
    CHECK(fc == doctest::Approx(159154.9).epsilon(1e-4));
    AcPoint pt = solve_at(c, fc);
    CHECK(pt.gv_db == doctest::Approx(-3.010299957).epsilon(0.01 / 3.0));
    AcPoint low = solve_at(c, fc / 1000.0);
    CHECK(low.gv_db == doctest::Approx(0.0).epsilon(1e-4));
}

TEST_CASE("resistor-only linearization is the identity") {
    Netlist n = parse(
        "V1 1 0 0 AC 1\nR1 1 2 1k\nR2 2 0 1k\n"
        ".probe V(1) I(R1) V(2) I(R2)\n");
    LinearCircuit c = linear_of(n);
    for (double f : {1e3, 1e6, 1e9}) {
        AcPoint pt = solve_at(c, f);
        CHECK(std::abs(pt.v_out) == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(pt.gv_db == doctest::Approx(20.0 * std::log10(0.5)).epsilon(1e-9));
    }
}

TEST_CASE("fet in cutoff contributes a dead stage") {
    Netlist n = parse(
        "V1 d 0 0.2\nV2 s 0 1\nR1 g 0 1k\nJ1 d g s M\n"
        ".model M STATZ beta=0.08 vto=-0.46 lambda=0 alpha=2 cin=0.59p rin=31.1k\n");
    OperatingPoint op = solve_op(n);
    REQUIRE(op.converged);
    CHECK(op.fets[0].i_d == 0.0);
    LinearCircuit c = linearize(n, op);
    REQUIRE(c.vccs.size() == 1);
    CHECK(c.vccs[0].gm == 0.0);
}

TEST_CASE("fet small-signal stamp equals the bias-point derivatives") {
    Netlist n = parse(
        "V1 vd 0 0.44\nRD vd d 1003.455\nJ1 d g s MGF\nRS s 0 11199\nRG g 0 1meg\n"
        ".model MGF STATZ beta=0.08 vto=-0.46 lambda=0 alpha=2 cin=0.59p rin=31.1k\n");
    OperatingPoint op = solve_op(n);
    REQUIRE(op.converged);
    LinearCircuit c = linearize(n, op);
    REQUIRE(c.vccs.size() == 1);
    CHECK(c.vccs[0].gm == op.fets[0].g_m);
}

TEST_CASE("linearize rejects an unconverged operating point") {
    Netlist n = parse("V1 1 0 1\nR1 1 0 1k");
    OperatingPoint op = solve_op(n);
    op.converged = false;
    CHECK_THROWS_AS(linearize(n, op), std::runtime_error);
}

TEST_CASE("tank equivalent of the SQUID readout") {
    TankEquivalent eq = tank_equivalent({450e6, 100.0, 2e-9, 1.0});
    CHECK(eq.r_p == doctest::Approx(565.487).epsilon(1e-4));
    CHECK(eq.c_t == doctest::Approx(62.5439e-12).epsilon(1e-4));

    // parallel RLC impedance is purely real at resonance
    auto z_at = [&](double f) {
        double w = 2.0 * kPi * f;
        cplx y = 1.0 / cplx(eq.r_p) + cplx(0.0, w * eq.c_t) + 1.0 / cplx(0.0, w * eq.l_t);
        return 1.0 / y;
    };
    cplx z0 = z_at(450e6);
    CHECK(std::abs(z0.imag()) < 1e-9 * std::abs(z0.real()));
    CHECK(z0.real() == doctest::Approx(eq.r_p).epsilon(1e-9));

    // lossless tank away from resonance is purely reactive
    auto z_lossless = [&](double f) {
        double w = 2.0 * kPi * f;
        cplx y = cplx(0.0, w * eq.c_t) + 1.0 / cplx(0.0, w * eq.l_t);
        return 1.0 / y;
    };
    cplx z_off = z_lossless(0.8 * 450e6);
    CHECK(std::abs(z_off.real()) < 1e-12 * std::abs(z_off));

    CHECK_THROWS_AS(tank_equivalent({450e6, 0.0, 2e-9, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(tank_equivalent({450e6, 100.0, 0.0, 1.0}), std::invalid_argument);
}

TEST_CASE("canonical L-match designs") {
    MatchDesign in = design_l_match(5600.0, 600.0, 450e6);
    CHECK(in.q_match == doctest::Approx(std::sqrt(5600.0 / 600.0 - 1.0)).epsilon(1e-12));
    CHECK(in.q_match == doctest::Approx(2.88675).epsilon(1e-4));
    CHECK(in.series_l == doctest::Approx(612.62e-9).epsilon(1e-3));
    CHECK(in.shunt_c == doctest::Approx(0.18232e-12).epsilon(1e-3));
    cplx zin = in.input_impedance();
    CHECK(std::abs(zin - cplx(5600.0)) < 0.01 * 5600.0);

    MatchDesign out = design_l_match(600.0, 50.0, 450e6);
    CHECK(out.q_match == doctest::Approx(3.3166248).epsilon(1e-6));
    CHECK(std::abs(out.input_impedance() - cplx(600.0)) < 0.01 * 600.0);

    CHECK_THROWS_AS(design_l_match(600.0, 600.0, 450e6), std::invalid_argument);
}

TEST_CASE("synthesized sections hit the target impedance for random triples") {
    std::mt19937 rng(19);
    std::uniform_real_distribution<double> rd(10.0, 10000.0);
    std::uniform_real_distribution<double> fd(1e6, 5e9);
    int done = 0;
    while (done < 100) {
        double rs = rd(rng), rl = rd(rng), f = fd(rng);
        if (std::abs(rs - rl) < 1.0) continue;
        MatchDesign m = design_l_match(rs, rl, f);
        CHECK(std::abs(m.input_impedance() - cplx(rs)) < 0.01 * rs);
        ++done;
    }
}

TEST_CASE("gain identity G_P = G_V + G_I holds at every frequency") {
    Netlist n = parse(
        "V1 1 0 0 AC 1\nR1 1 2 1k\nL1 2 3 10u\nC1 3 0 1n\nR2 3 0 2k\n"
        ".probe V(1) I(R1) V(3) I(R2)\n");
    AcSweepResult r = sweep_ac(linear_of(n), 1e3, 1e8, 40);
    REQUIRE(r.points.size() > 100);
    for (const AcPoint& pt : r.points) {
        REQUIRE_FALSE(pt.singular);
        CHECK(std::abs(pt.gp_db - pt.gv_db - pt.gi_db) < 1e-6);
    }
}

TEST_CASE("reciprocity of a passive network") {
    // transfer impedance V(b)/I(a) equals V(a)/I(b) after port exchange
    const char* fwd =
        "I1 0 a 0 AC 1\nR2 a 0 330\nR1 a m 1k\nL1 m b 10u\nC1 m 0 100p\nR3 b 0 470\n";
    const char* rev =
        "I1 0 b 0 AC 1\nR2 a 0 330\nR1 a m 1k\nL1 m b 10u\nC1 m 0 100p\nR3 b 0 470\n";
    Netlist na = parse(fwd), nb = parse(rev);
    LinearCircuit ca = linear_of(na), cb = linear_of(nb);
    for (double f : {1e4, 1e6, 3e7, 1e9}) {
        auto xa = solve_phasors(ca, f);
        auto xb = solve_phasors(cb, f);
        REQUIRE_FALSE(xa.empty());
        REQUIRE_FALSE(xb.empty());
        cplx z_ab = xa[static_cast<size_t>(ca.node_of("b"))];
        cplx z_ba = xb[static_cast<size_t>(cb.node_of("a"))];
        CHECK(std::abs(z_ab - z_ba) < 1e-9 * std::abs(z_ab));
    }
}

TEST_CASE("passive network never shows power gain") {
    Netlist n = parse(
        "V1 1 0 0 AC 1\nR1 1 2 600\nL1 2 3 100n\nC1 3 0 10p\nR2 3 0 50\n"
        ".probe V(2) I(L1) V(3) I(R2)\n");
    AcSweepResult r = sweep_ac(linear_of(n), 1e6, 1e10, 30);
    for (const AcPoint& pt : r.points) {
        REQUIRE_FALSE(pt.singular);
        CHECK(pt.gp_db <= 1e-9);
    }
}

TEST_CASE("parallel sweep equals the serial reference") {
    Netlist n = parse(
        "V1 1 0 0 AC 1\nR1 1 2 1k\nL1 2 3 10u\nC1 3 0 1n\nR2 3 0 2k\n"
        ".probe V(1) I(R1) V(3) I(R2)\n");
    LinearCircuit c = linear_of(n);
    AcSweepResult par = sweep_ac(c, 1e3, 1e8, 25);
    AcSweepResult ser = sweep_ac_serial(c, 1e3, 1e8, 25);
    REQUIRE(par.points.size() == ser.points.size());
    for (size_t i = 0; i < par.points.size(); ++i) {
        CHECK(par.points[i].gv_db == ser.points[i].gv_db);
        CHECK(par.points[i].gi_db == ser.points[i].gi_db);
        CHECK(par.points[i].gp_db == ser.points[i].gp_db);
    }
    CHECK(par.f_peak == ser.f_peak);
    CHECK(par.bw_3db == ser.bw_3db);
}

TEST_CASE("singular frequency is reported and the sweep continues") {
    // hand-built stamp set: a floating node makes every frequency singular
    LinearCircuit c;
    c.node_names = {"1", "2", "orphan"};
    c.branches.push_back({0, -1, 0.0, 1.0});  // ideal drive into node 1
    c.conductances.push_back({0, 1, 1.0 / 1000.0});
    c.conductances.push_back({1, -1, 1.0 / 50.0});
    c.element_info["V1"] = {ElementKind::VSource, 0, -1, 0, 0.0, 0};
    c.element_info["RL"] = {ElementKind::Resistor, 1, -1, -1, 50.0, 0};
    c.ports = AcPorts{"1", "V1", "2", "RL"};
    AcSweepResult r = sweep_ac(c, 1e6, 1e7, 5);
    CHECK(r.errors.size() == r.points.size());
    for (const AcPoint& pt : r.points) CHECK(pt.singular);
    CHECK(r.errors[0].find("singular") != std::string::npos);

    // dropping the orphan node makes the same sweep clean
    c.node_names = {"1", "2"};
    AcSweepResult ok = sweep_ac(c, 1e6, 1e7, 5);
    CHECK(ok.errors.empty());
}

TEST_CASE("peak extraction on a resonant load") {
    // tank-loaded divider peaks at the resonance and has a finite bandwidth
    Netlist n = parse(
        "V1 1 0 0 AC 1\nR1 1 2 5k\nLT 2 0 2n\nCT 2 0 62.5439p\nRT 2 0 565.487\nRL 2 0 1meg\n"
        ".probe V(1) I(R1) V(2) I(RL)\n");
    AcSweepResult r = sweep_ac(linear_of(n), 1e8, 2e9, 200);
    CHECK(r.f_peak == doctest::Approx(450e6).epsilon(0.01));
    CHECK(r.bw_3db > 0.0);
    CHECK(r.bw_3db < 450e6);
}
