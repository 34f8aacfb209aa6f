#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "coldamp/dc.hpp"
#include "coldamp/netlist.hpp"

namespace coldamp {

/// Small-signal port designation: a voltage node and a current-carrying
/// element for each of the input and output ports.
struct AcPorts {
    std::string v_in_node;
    std::string i_in_element;
    std::string v_out_node;
    std::string i_out_element;
};

/// Frequency-independent stamp set of the linearized circuit. FETs are
/// replaced by a g_m VCCS + g_ds conductance + c_in/r_in at the gate; DC
/// sources become shorts (V) and opens (I) unless they carry an AC magnitude.
struct LinearCircuit {
    std::vector<std::string> node_names;  // non-ground
    struct Conductance { int a, b; double g; };
    struct Capacitance { int a, b; double c; };
    struct Branch { int a, b; double l; double v_ac; };  // inductor (l>0) or V source
    struct CurrentSource { int a, b; double i_ac; };
    struct Vccs { int op, om, cp, cm; double gm; };
    std::vector<Conductance> conductances;
    std::vector<Capacitance> capacitances;
    std::vector<Branch> branches;
    std::vector<CurrentSource> current_sources;
    std::vector<Vccs> vccs;

    // element name -> how to read its current/voltage back out
    struct ProbeInfo { ElementKind kind; int a, b, branch; double value; size_t vccs_index; };
    std::map<std::string, ProbeInfo> element_info;

    std::optional<AcPorts> ports;

    int node_of(const std::string& name) const;  // -1 for ground
    int size() const { return static_cast<int>(node_names.size() + branches.size()); }
};

/// Build the small-signal circuit at a converged operating point.
/// Ports are taken from the netlist's probe list (V,I input pair first,
/// then V,I output pair). Throws when op.converged is false.
LinearCircuit linearize(const Netlist& netlist, const OperatingPoint& op);

/// One solved frequency: port phasors and the three gains.
struct AcPoint {
    double f = 0.0;
    std::complex<double> v_in, i_in, v_out, i_out;
    double gv_db = 0.0;
    double gi_db = 0.0;
    double gp_db = 0.0;  // 20*log10 of the complex apparent-power ratio
    bool singular = false;
};

struct AcSweepResult {
    std::vector<double> frequencies;
    std::vector<AcPoint> points;
    double f_peak = 0.0;
    double g_p_peak_db = 0.0;
    double bw_3db = 0.0;
    std::vector<std::string> errors;  // singular frequencies, sweep continues
};

/// Log-spaced complex MNA sweep from f_start to f_stop at points_per_decade,
/// parallel across frequencies (deterministic ordering).
AcSweepResult sweep_ac(const LinearCircuit& c, double f_start, double f_stop,
                       int points_per_decade);

/// Serial reference of sweep_ac; kept for testing and benchmarking.
AcSweepResult sweep_ac_serial(const LinearCircuit& c, double f_start, double f_stop,
                              int points_per_decade);

/// Single-frequency solve.
AcPoint solve_at(const LinearCircuit& c, double f);

/// Full phasor solution at one frequency (node voltages then branch currents).
std::vector<std::complex<double>> solve_phasors(const LinearCircuit& c, double f);

struct TankSource {
    double f_res;  // Hz
    double q;      // quality factor
    double l_t;    // tank inductance, H
    double drive;  // phasor amplitude, V
};

/// Parallel R-L-C equivalent of the SQUID tank: C_t = 1/((2*pi*f)^2 L),
/// R_p = Q*2*pi*f*L.
struct TankEquivalent {
    double r_p;
    double c_t;
    double l_t;
    double drive;
};
TankEquivalent tank_equivalent(const TankSource& t);

/// Lossless low-pass L-section between two real impedances at one frequency.
struct MatchDesign {
    double r_source = 0.0;
    double r_load = 0.0;
    double f = 0.0;
    double q_match = 0.0;
    double series_l = 0.0;  // H, adjacent to the low-resistance side
    double shunt_c = 0.0;   // F, across the high-resistance side
    /// Input impedance of the synthesized section driven from the source side
    /// and terminated in r_load, evaluated independently of the synthesis.
    std::complex<double> input_impedance() const;
};
MatchDesign design_l_match(double r_source, double r_load, double f);

}  // namespace coldamp
