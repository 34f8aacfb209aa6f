#include "coldamp/dc.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "coldamp/statz.hpp"

namespace coldamp {

namespace {

constexpr double kGmin = 1e-12;        // S, convergence aid to ground
constexpr double kStepTol = 1e-12;     // V, internal Newton step target
constexpr double kResidualTol = 1e-13; // A, internal KCL target
constexpr double kStepOk = 1e-9;       // V, contract level
constexpr double kResidualOk = 1e-12;  // A, contract level
constexpr int kMaxIter = 100;

struct Workspace {
    const Netlist* net = nullptr;
    std::vector<std::string> node_names;         // non-ground, index order
    std::map<std::string, int> node_index;       // -1 : ground
    std::vector<const Element*> branches;        // V sources and inductors
    std::map<std::string, int> branch_index;
    std::vector<const Element*> fets;
    int n_nodes = 0;
    int n_branches = 0;
    int size() const { return n_nodes + n_branches; }

    int idx(const std::string& node) const {
        return node == "0" ? -1 : node_index.at(node);
    }
};

Workspace build_workspace(const Netlist& net) {
    Workspace w;
    w.net = &net;
    for (const std::string& n : net.nodes) {
        if (n == "0") continue;
        w.node_index.emplace(n, static_cast<int>(w.node_names.size()));
        w.node_names.push_back(n);
    }
    for (const Element& el : net.elements) {
        if (el.kind == ElementKind::VSource || el.kind == ElementKind::Inductor) {
            w.branch_index.emplace(el.name, static_cast<int>(w.branches.size()));
            w.branches.push_back(&el);
        } else if (el.kind == ElementKind::Fet) {
            w.fets.push_back(&el);
        }
    }
    w.n_nodes = static_cast<int>(w.node_names.size());
    w.n_branches = static_cast<int>(w.branches.size());
    return w;
}

double volt(const Workspace& w, const Eigen::VectorXd& x, const std::string& node) {
    int i = w.idx(node);
    return i < 0 ? 0.0 : x[i];
}

// Residual F(x) and Jacobian J(x) of the MNA system. Node rows carry KCL in
// amps (currents leaving the node positive); branch rows the source/short
// voltage constraints in volts. source_scale ramps independent sources.
void assemble(const Workspace& w, const Eigen::VectorXd& x, double gmin, double source_scale,
              Eigen::VectorXd& f, Eigen::MatrixXd& jac) {
    const int n = w.size();
    f.setZero(n);
    jac.setZero(n, n);

    auto add_f = [&](int row, double v) {
        if (row >= 0) f[row] += v;
    };
    auto add_j = [&](int row, int col, double v) {
        if (row >= 0 && col >= 0) jac(row, col) += v;
    };

    for (const Element& el : w.net->elements) {
        switch (el.kind) {
            case ElementKind::Resistor: {
                int a = w.idx(el.nodes[0]), b = w.idx(el.nodes[1]);
                double g = 1.0 / el.value;
                double i = g * (volt(w, x, el.nodes[0]) - volt(w, x, el.nodes[1]));
                add_f(a, i);
                add_f(b, -i);
                add_j(a, a, g); add_j(a, b, -g);
                add_j(b, b, g); add_j(b, a, -g);
                break;
            }
            case ElementKind::Capacitor:
                break;  // open at DC
            case ElementKind::VSource:
            case ElementKind::Inductor: {
                int a = w.idx(el.nodes[0]), b = w.idx(el.nodes[1]);
                int br = w.n_nodes + w.branch_index.at(el.name);
                double v_set = el.kind == ElementKind::VSource ? source_scale * el.value : 0.0;
                double i_br = x[br];
                add_f(a, i_br);
                add_f(b, -i_br);
                add_j(a, br, 1.0);
                add_j(b, br, -1.0);
                f[br] = volt(w, x, el.nodes[0]) - volt(w, x, el.nodes[1]) - v_set;
                add_j(br, a, 1.0);
                add_j(br, b, -1.0);
                break;
            }
            case ElementKind::ISource: {
                int a = w.idx(el.nodes[0]), b = w.idx(el.nodes[1]);
                double i = source_scale * el.value;  // flows a -> b inside the source
                add_f(a, i);
                add_f(b, -i);
                break;
            }
            case ElementKind::Vccs: {
                int op = w.idx(el.nodes[0]), om = w.idx(el.nodes[1]);
                int cp = w.idx(el.nodes[2]), cm = w.idx(el.nodes[3]);
                double vc = volt(w, x, el.nodes[2]) - volt(w, x, el.nodes[3]);
                double i = el.value * vc;
                add_f(op, i);
                add_f(om, -i);
                add_j(op, cp, el.value); add_j(op, cm, -el.value);
                add_j(om, cp, -el.value); add_j(om, cm, el.value);
                break;
            }
            case ElementKind::Fet: {
                int d = w.idx(el.nodes[0]), g = w.idx(el.nodes[1]), s = w.idx(el.nodes[2]);
                const StatzParams& p = w.net->model_for(el);
                double u_gs = volt(w, x, el.nodes[1]) - volt(w, x, el.nodes[2]);
                double u_ds = volt(w, x, el.nodes[0]) - volt(w, x, el.nodes[2]);
                // Reverse-region excursions of the iterate are clamped to the
                // u_ds = 0 plane so the model stays on its defined domain.
                double u_ds_eff = std::max(u_ds, 0.0);
                double id = drain_current(p, u_gs, u_ds_eff);
                SmallSignal ss = small_signal(p, u_gs, u_ds_eff);
                add_f(d, id);
                add_f(s, -id);
                add_j(d, g, ss.g_m); add_j(d, s, -ss.g_m);
                add_j(s, g, -ss.g_m); add_j(s, s, ss.g_m);
                add_j(d, d, ss.g_ds); add_j(d, s, -ss.g_ds);
                add_j(s, d, -ss.g_ds); add_j(s, s, ss.g_ds);
                break;
            }
        }
    }
    if (gmin > 0.0) {
        for (int i = 0; i < w.n_nodes; ++i) {
            f[i] += gmin * x[i];
            jac(i, i) += gmin;
        }
    }
}

std::string singular_report(const Workspace& w, const Eigen::MatrixXd& jac) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
    std::ostringstream msg;
    msg << "singular MNA matrix";
    if (lu.dimensionOfKernel() > 0) {
        Eigen::MatrixXd kernel = lu.kernel();
        msg << "; underdetermined unknowns:";
        for (int i = 0; i < kernel.rows(); ++i) {
            if (kernel.row(i).cwiseAbs().maxCoeff() > 1e-6) {
                if (i < w.n_nodes)
                    msg << " node '" << w.node_names[i] << "'";
                else
                    msg << " branch '" << w.branches[i - w.n_nodes]->name << "'";
            }
        }
    }
    return msg.str();
}

struct NewtonOutcome {
    bool converged = false;
    int iterations = 0;
    double max_step = 0.0;
    double residual = 0.0;
};

NewtonOutcome newton(const Workspace& w, Eigen::VectorXd& x, double source_scale) {
    const int n = w.size();
    Eigen::VectorXd f(n);
    Eigen::MatrixXd jac(n, n);
    NewtonOutcome out;
    double gmin = kGmin;
    for (int iter = 0; iter < kMaxIter; ++iter) {
        // The aid conductance is dropped once the iterate is close, so the
        // final residual is that of the unmodified circuit.
        assemble(w, x, gmin, source_scale, f, jac);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
        if (!lu.isInvertible()) throw std::runtime_error(singular_report(w, jac));
        Eigen::VectorXd dx = lu.solve(-f);
        if (!dx.allFinite()) throw std::runtime_error(singular_report(w, jac));
        x += dx;
        out.iterations = iter + 1;
        out.max_step = dx.cwiseAbs().maxCoeff();
        if (out.max_step < 1e-6 && gmin > 0.0) {
            gmin = 0.0;
            continue;
        }
        if (gmin == 0.0 && out.max_step < kStepTol) {
            assemble(w, x, 0.0, source_scale, f, jac);
            out.residual = w.n_nodes > 0 ? f.head(w.n_nodes).cwiseAbs().maxCoeff() : 0.0;
            if (out.residual < kResidualTol || out.max_step < 1e-15) break;
        }
    }
    assemble(w, x, 0.0, source_scale, f, jac);
    out.residual = w.n_nodes > 0 ? f.head(w.n_nodes).cwiseAbs().maxCoeff() : 0.0;
    out.converged = out.max_step < kStepOk && out.residual < kResidualOk;
    return out;
}

OperatingPoint extract(const Workspace& w, const Eigen::VectorXd& x,
                       const NewtonOutcome& outcome) {
    OperatingPoint op;
    op.converged = outcome.converged;
    op.iterations = outcome.iterations;
    op.max_kcl_residual = outcome.residual;
    op.max_step = outcome.max_step;
    op.node_voltages["0"] = 0.0;
    for (int i = 0; i < w.n_nodes; ++i) op.node_voltages[w.node_names[i]] = x[i];
    for (int b = 0; b < w.n_branches; ++b)
        op.source_currents[w.branches[b]->name] = x[w.n_nodes + b];

    for (const Element& el : w.net->elements) {
        if (el.kind != ElementKind::Resistor) continue;
        double dv = volt(w, x, el.nodes[0]) - volt(w, x, el.nodes[1]);
        op.resistor_power[el.name] = dv * dv / el.value;
    }
    for (const Element* fet : w.fets) {
        const StatzParams& p = w.net->model_for(*fet);
        FetBias fb;
        fb.name = fet->name;
        fb.u_gs = volt(w, x, fet->nodes[1]) - volt(w, x, fet->nodes[2]);
        fb.u_ds = volt(w, x, fet->nodes[0]) - volt(w, x, fet->nodes[2]);
        fb.i_d = drain_current(p, fb.u_gs, std::max(fb.u_ds, 0.0));
        SmallSignal ss = small_signal(p, fb.u_gs, std::max(fb.u_ds, 0.0));
        fb.g_m = ss.g_m;
        fb.g_ds = ss.g_ds;
        fb.p_hemt = fb.u_ds * fb.i_d;
        for (const Element& el : w.net->elements) {
            if (el.kind != ElementKind::Resistor) continue;
            if (el.nodes[0] == fet->nodes[2] || el.nodes[1] == fet->nodes[2])
                fb.p_bias += op.resistor_power.at(el.name);
        }
        op.fets.push_back(fb);
    }
    return op;
}

OperatingPoint solve_with_start(const Workspace& w, Eigen::VectorXd& x) {
    NewtonOutcome out = newton(w, x, 1.0);
    if (!out.converged) {
        // Source stepping: ramp every independent source in 10 steps, each
        // solved from the previous solution.
        x.setZero();
        for (int step = 1; step <= 10; ++step)
            out = newton(w, x, static_cast<double>(step) / 10.0);
    }
    return extract(w, x, out);
}

}  // namespace

OperatingPoint solve_op(const Netlist& netlist) {
    Workspace w = build_workspace(netlist);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(w.size());
    return solve_with_start(w, x);
}

std::vector<SweepRow> sweep_supply(const Netlist& netlist, const std::string& source,
                                   double start, double stop, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("sweep_supply: step must be > 0");
    const Element* src = netlist.find_element(source);
    if (!src || src->kind != ElementKind::VSource)
        throw std::invalid_argument("sweep_supply: unknown voltage source '" + source + "'");

    Netlist local = netlist;
    Element* mutable_src = &local.elements[static_cast<size_t>(src - netlist.elements.data())];

    std::vector<SweepRow> rows;
    Workspace w = build_workspace(local);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(w.size());
    bool first = true;
    int steps = static_cast<int>(std::floor((stop - start) / step + 0.5));
    for (int k = 0; k <= steps; ++k) {
        double value = start + k * step;
        if (value > stop + step * 1e-9) break;
        mutable_src->value = value;
        OperatingPoint op;
        if (first) {
            op = solve_with_start(w, x);
            first = false;
        } else {
            NewtonOutcome out = newton(w, x, 1.0);  // warm start from previous row
            if (!out.converged) {
                x.setZero();
                op = solve_with_start(w, x);
            } else {
                op = extract(w, x, out);
            }
        }
        if (!op.converged) {
            std::ostringstream msg;
            msg << "sweep_supply: no convergence at " << source << " = " << value << " V";
            throw std::runtime_error(msg.str());
        }
        SweepRow row;
        row.u_supply = value;
        if (!op.fets.empty()) {
            row.i_d = op.fets[0].i_d;
            row.u_ds = op.fets[0].u_ds;
            row.p_hemt = op.fets[0].p_hemt;
            row.p_bias = op.fets[0].p_bias;
        }
        row.op = std::move(op);
        rows.push_back(std::move(row));
    }
    return rows;
}

double gate_voltage_for(const StatzParams& p, double u_ds, double i_d) {
    if (!(u_ds > 0.0)) throw std::invalid_argument("derive_bias_resistor: u_ds must be > 0");
    if (!(i_d > 0.0))
        throw std::invalid_argument("derive_bias_resistor: degenerate target i_d = 0");
    double denom = p.beta * (1.0 + p.lambda * u_ds) * std::tanh(p.alpha * u_ds);
    if (!(denom > 0.0))
        throw std::invalid_argument("derive_bias_resistor: target unreachable at u_ds");
    return p.u_t + std::sqrt(i_d / denom);
}

double derive_bias_resistor(const StatzParams& p, double u_ds, double i_d) {
    double u_gs = gate_voltage_for(p, u_ds, i_d);
    if (u_gs >= 0.0)
        throw std::invalid_argument(
            "derive_bias_resistor: target needs non-negative U_gs, self-bias cannot reach it");
    return -u_gs / i_d;
}

}  // namespace coldamp
