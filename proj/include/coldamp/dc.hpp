#pragma once

#include <map>
#include <string>
#include <vector>

#include "coldamp/netlist.hpp"

namespace coldamp {

struct FetBias {
    std::string name;
    double u_gs = 0.0;
    double u_ds = 0.0;
    double i_d = 0.0;
    double g_m = 0.0;
    double g_ds = 0.0;
    double p_hemt = 0.0;  // u_ds * i_d
    double p_bias = 0.0;  // dissipation of the auto-bias resistors on the source node
};

struct OperatingPoint {
    std::map<std::string, double> node_voltages;   // ground "0" is exactly 0
    std::map<std::string, double> source_currents; // V sources and inductors, n+ -> n-
    std::vector<FetBias> fets;
    std::map<std::string, double> resistor_power;
    bool converged = false;
    int iterations = 0;
    double max_kcl_residual = 0.0;  // A, checked without the gmin aid
    double max_step = 0.0;          // V, last Newton update
};

/// Newton-Raphson DC operating point on the MNA system. Capacitors are open,
/// inductors short. Retries with 10-step source ramping on failure; throws
/// on a singular MNA matrix (naming the floating/shorted structure).
OperatingPoint solve_op(const Netlist& netlist);

struct SweepRow {
    double u_supply = 0.0;
    double i_d = 0.0;     // first FET
    double u_ds = 0.0;    // first FET
    double p_hemt = 0.0;  // first FET
    double p_bias = 0.0;  // first FET's bias leg
    OperatingPoint op;
};

/// Supply-voltage sweep, each point warm-started from the previous solution.
std::vector<SweepRow> sweep_supply(const Netlist& netlist, const std::string& source,
                                   double start, double stop, double step);

/// Inverts the drain-current law at a (u_ds, i_d) target and returns the
/// source-leg self-bias resistor R_s = -U_gs/i_d for a grounded-gate stage.
/// Throws when the target is unreachable or degenerate (i_d = 0).
double derive_bias_resistor(const StatzParams& p, double u_ds, double i_d);

/// U_gs that produces i_d at u_ds (the inversion behind derive_bias_resistor).
double gate_voltage_for(const StatzParams& p, double u_ds, double i_d);

}  // namespace coldamp
