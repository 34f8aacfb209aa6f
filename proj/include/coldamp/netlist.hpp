#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace coldamp {

/// Statz GaAs-FET model coefficients plus the linear gate parasitics.
/// r_in is the parallel-equivalent input resistance; c_in the input
/// capacitance. A value of zero means the corresponding branch is absent.
struct StatzParams {
    double beta = 0.0;    // transconductance parameter, A/V^2
    double u_t = 0.0;     // threshold gate voltage, V
    double lambda = 0.0;  // channel-length modulation, 1/V
    double alpha = 2.0;   // tanh knee parameter, 1/V
    double c_in = 0.0;    // equivalent input capacitance, F
    double r_in = 0.0;    // equivalent input resistance, ohm
};

enum class ElementKind { Resistor, Capacitor, Inductor, VSource, ISource, Vccs, Fet };

struct Element {
    std::string name;                // first letter selects the kind
    ElementKind kind;
    std::vector<std::string> nodes;  // FET: drain,gate,source; VCCS: out+,out-,ctrl+,ctrl-
    double value = 0.0;              // passives/sources: SI value; VCCS: gm
    std::optional<double> ac_magnitude;  // sources only
    std::string model;               // FET only
};

enum class ProbeQuantity { V, I, P };

struct ProbeRef {
    ProbeQuantity quantity;
    std::string target;  // node name for V, element name for I/P
};

struct AnalysisDirective {
    enum class Kind { Op, DcSweep, AcSweep };
    Kind kind = Kind::Op;
    // .dc <source> <start> <stop> <step>
    std::string source;
    double start = 0.0, stop = 0.0, step = 0.0;
    // .ac dec <points> <fstart> <fstop>
    int points_per_decade = 0;
    double f_start = 0.0, f_stop = 0.0;
    // shared .probe list (port designations first: V,I input then V,I output)
    std::vector<ProbeRef> probes;
};

struct Netlist {
    std::string title;
    std::vector<std::string> nodes;  // unique, in order of first appearance; "0" is ground
    std::vector<Element> elements;
    std::map<std::string, StatzParams> models;  // keyed by upper-cased name
    std::vector<AnalysisDirective> analyses;
    std::vector<ProbeRef> probes;

    const Element* find_element(std::string_view name) const;
    const StatzParams& model_for(const Element& fet) const;
    bool has_node(std::string_view node) const;
};

struct ParseError : std::runtime_error {
    ParseError(int line, int column, const std::string& reason);
    int line;
    int column;
};

/// Parse a SPICE-like deck into a Netlist. Engineering suffixes are resolved,
/// '*' comments and blank lines skipped, '+' continuations joined.
/// Throws ParseError with line/column on malformed input.
Netlist parse(std::string_view source_text);

/// Simulability diagnostics: empty list means every node has a DC path to
/// ground, there is no loop of ideal voltage sources (inductors short at DC)
/// and no current-source cutset. Each diagnostic names the offending
/// nodes/elements.
std::vector<std::string> validate(const Netlist& netlist);

/// Text form that parses back to a structurally identical netlist.
std::string serialize(const Netlist& netlist);

/// Structural equality (titles excluded), used by round-trip checks.
bool structurally_equal(const Netlist& a, const Netlist& b);

/// Parse one SPICE number with optional engineering suffix
/// (f p n u m k meg g, case-insensitive; trailing unit letters ignored).
double parse_spice_number(std::string_view token);

}  // namespace coldamp
