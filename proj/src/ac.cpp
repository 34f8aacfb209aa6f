#include "coldamp/ac.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "coldamp/statz.hpp"

namespace coldamp {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;

int node_index_of(const std::vector<std::string>& names, const std::string& n) {
    if (n == "0") return -1;
    auto it = std::find(names.begin(), names.end(), n);
    if (it == names.end()) throw std::runtime_error("unknown node '" + n + "'");
    return static_cast<int>(it - names.begin());
}

}  // namespace

int LinearCircuit::node_of(const std::string& name) const {
    return node_index_of(node_names, name);
}

LinearCircuit linearize(const Netlist& netlist, const OperatingPoint& op) {
    if (!op.converged)
        throw std::runtime_error("linearize: operating point did not converge");

    LinearCircuit c;
    for (const std::string& n : netlist.nodes)
        if (n != "0") c.node_names.push_back(n);
    auto idx = [&](const std::string& n) { return node_index_of(c.node_names, n); };

    for (const Element& el : netlist.elements) {
        LinearCircuit::ProbeInfo info{el.kind, -1, -1, -1, el.value, 0};
        switch (el.kind) {
            case ElementKind::Resistor: {
                info.a = idx(el.nodes[0]);
                info.b = idx(el.nodes[1]);
                c.conductances.push_back({info.a, info.b, 1.0 / el.value});
                break;
            }
            case ElementKind::Capacitor: {
                info.a = idx(el.nodes[0]);
                info.b = idx(el.nodes[1]);
                c.capacitances.push_back({info.a, info.b, el.value});
                break;
            }
            case ElementKind::Inductor: {
                info.a = idx(el.nodes[0]);
                info.b = idx(el.nodes[1]);
                info.branch = static_cast<int>(c.branches.size());
                c.branches.push_back({info.a, info.b, el.value, 0.0});
                break;
            }
            case ElementKind::VSource: {
                info.a = idx(el.nodes[0]);
                info.b = idx(el.nodes[1]);
                info.branch = static_cast<int>(c.branches.size());
                c.branches.push_back({info.a, info.b, 0.0, el.ac_magnitude.value_or(0.0)});
                break;
            }
            case ElementKind::ISource: {
                info.a = idx(el.nodes[0]);
                info.b = idx(el.nodes[1]);
                if (el.ac_magnitude && *el.ac_magnitude != 0.0)
                    c.current_sources.push_back({info.a, info.b, *el.ac_magnitude});
                break;
            }
            case ElementKind::Vccs: {
                info.a = idx(el.nodes[0]);
                info.b = idx(el.nodes[1]);
                info.vccs_index = c.vccs.size();
                c.vccs.push_back({idx(el.nodes[0]), idx(el.nodes[1]), idx(el.nodes[2]),
                                  idx(el.nodes[3]), el.value});
                break;
            }
            case ElementKind::Fet: {
                const FetBias* bias = nullptr;
                for (const FetBias& fb : op.fets)
                    if (fb.name == el.name) bias = &fb;
                if (!bias) throw std::runtime_error("linearize: no bias data for '" + el.name + "'");
                const StatzParams& p = netlist.model_for(el);
                int d = idx(el.nodes[0]), g = idx(el.nodes[1]), s = idx(el.nodes[2]);
                info.a = d;
                info.b = s;
                info.value = bias->g_ds;
                info.vccs_index = c.vccs.size();
                c.vccs.push_back({d, s, g, s, bias->g_m});
                if (bias->g_ds > 0.0) c.conductances.push_back({d, s, bias->g_ds});
                if (p.c_in > 0.0) c.capacitances.push_back({g, s, p.c_in});
                if (p.r_in > 0.0) c.conductances.push_back({g, s, 1.0 / p.r_in});
                break;
            }
        }
        c.element_info.emplace(el.name, info);
    }

    // Probe list designates ports: first V/I pair is the input, second the output.
    std::vector<std::string> v_probes, i_probes;
    for (const ProbeRef& p : netlist.probes) {
        if (p.quantity == ProbeQuantity::V) v_probes.push_back(p.target);
        if (p.quantity == ProbeQuantity::I) i_probes.push_back(p.target);
    }
    if (v_probes.size() >= 2 && i_probes.size() >= 2)
        c.ports = AcPorts{v_probes[0], i_probes[0], v_probes[1], i_probes[1]};
    return c;
}

namespace {

void fill_system(const LinearCircuit& c, double omega, Eigen::MatrixXcd& y, Eigen::VectorXcd& rhs) {
    const int n_nodes = static_cast<int>(c.node_names.size());
    const int n = c.size();
    y.setZero(n, n);
    rhs.setZero(n);
    auto add = [&](int r, int cidx, cplx v) {
        if (r >= 0 && cidx >= 0) y(r, cidx) += v;
    };
    for (const auto& g : c.conductances) {
        add(g.a, g.a, g.g); add(g.b, g.b, g.g);
        add(g.a, g.b, -g.g); add(g.b, g.a, -g.g);
    }
    for (const auto& cap : c.capacitances) {
        cplx yc(0.0, omega * cap.c);
        add(cap.a, cap.a, yc); add(cap.b, cap.b, yc);
        add(cap.a, cap.b, -yc); add(cap.b, cap.a, -yc);
    }
    for (size_t k = 0; k < c.branches.size(); ++k) {
        const auto& br = c.branches[k];
        int row = n_nodes + static_cast<int>(k);
        add(br.a, row, 1.0);
        add(br.b, row, -1.0);
        add(row, br.a, 1.0);
        add(row, br.b, -1.0);
        y(row, row) -= cplx(0.0, omega * br.l);
        rhs[row] = br.v_ac;
    }
    for (const auto& src : c.current_sources) {
        if (src.a >= 0) rhs[src.a] -= src.i_ac;  // current a -> b inside the source
        if (src.b >= 0) rhs[src.b] += src.i_ac;
    }
    for (const auto& v : c.vccs) {
        add(v.op, v.cp, v.gm); add(v.op, v.cm, -v.gm);
        add(v.om, v.cp, -v.gm); add(v.om, v.cm, v.gm);
    }
}

cplx node_voltage(const std::vector<cplx>& x, int node) {
    return node < 0 ? cplx(0.0) : x[static_cast<size_t>(node)];
}

cplx element_current(const LinearCircuit& c, const std::vector<cplx>& x,
                     const std::string& name, double omega) {
    auto it = c.element_info.find(name);
    if (it == c.element_info.end())
        throw std::runtime_error("probe references unknown element '" + name + "'");
    const auto& info = it->second;
    const int n_nodes = static_cast<int>(c.node_names.size());
    cplx va = node_voltage(x, info.a);
    cplx vb = node_voltage(x, info.b);
    switch (info.kind) {
        case ElementKind::Resistor:
            return (va - vb) / info.value;
        case ElementKind::Capacitor:
            return (va - vb) * cplx(0.0, omega * info.value);
        case ElementKind::Inductor:
        case ElementKind::VSource:
            return x[static_cast<size_t>(n_nodes + info.branch)];
        case ElementKind::ISource:
            return cplx(0.0);
        case ElementKind::Vccs: {
            const auto& v = c.vccs[info.vccs_index];
            return v.gm * (node_voltage(x, v.cp) - node_voltage(x, v.cm));
        }
        case ElementKind::Fet: {
            const auto& v = c.vccs[info.vccs_index];
            cplx i = v.gm * (node_voltage(x, v.cp) - node_voltage(x, v.cm));
            return i + info.value * (va - vb);  // g_ds channel contribution
        }
    }
    return cplx(0.0);
}

double db20(double ratio) { return 20.0 * std::log10(ratio); }

AcPoint evaluate_point(const LinearCircuit& c, double f, const std::vector<cplx>& x,
                       bool singular) {
    AcPoint pt;
    pt.f = f;
    pt.singular = singular;
    if (singular || !c.ports) return pt;
    double omega = 2.0 * kPi * f;
    pt.v_in = node_voltage(x, c.node_of(c.ports->v_in_node));
    pt.v_out = node_voltage(x, c.node_of(c.ports->v_out_node));
    pt.i_in = element_current(c, x, c.ports->i_in_element, omega);
    pt.i_out = element_current(c, x, c.ports->i_out_element, omega);
    pt.gv_db = db20(std::abs(pt.v_out) / std::abs(pt.v_in));
    pt.gi_db = db20(std::abs(pt.i_out) / std::abs(pt.i_in));
    // Apparent-power ratio on the dB20 scale; equals the real power gain when
    // both ports are resistive, and makes G_P = G_V + G_I an identity.
    pt.gp_db = db20(std::abs(pt.v_out * std::conj(pt.i_out)) /
                    std::abs(pt.v_in * std::conj(pt.i_in)));
    return pt;
}

std::vector<double> log_frequencies(double f_start, double f_stop, int ppd) {
    if (!(f_start > 0.0) || !(f_start < f_stop))
        throw std::invalid_argument("sweep_ac: need 0 < f_start < f_stop");
    if (ppd < 1) throw std::invalid_argument("sweep_ac: points_per_decade must be >= 1");
    std::vector<double> f;
    double decades = std::log10(f_stop / f_start);
    int n = static_cast<int>(std::ceil(decades * ppd - 1e-9));
    for (int k = 0; k <= n; ++k)
        f.push_back(f_start * std::pow(10.0, static_cast<double>(k) / ppd));
    if (f.back() < f_stop * (1.0 - 1e-12)) f.push_back(f_stop);
    else f.back() = std::min(f.back(), f_stop);
    return f;
}

void finish_sweep(AcSweepResult& r) {
    // Peak by quadratic interpolation around the discrete maximum of G_P,
    // -3 dB crossings by linear interpolation in dB over log-frequency.
    int best = -1;
    for (size_t i = 0; i < r.points.size(); ++i) {
        if (r.points[i].singular) {
            std::ostringstream msg;
            msg << "singular complex MNA matrix at f = " << r.points[i].f << " Hz";
            r.errors.push_back(msg.str());
            continue;
        }
        if (best < 0 || r.points[i].gp_db > r.points[static_cast<size_t>(best)].gp_db)
            best = static_cast<int>(i);
    }
    if (best < 0) return;
    double xc = std::log10(r.points[static_cast<size_t>(best)].f);
    double yc = r.points[static_cast<size_t>(best)].gp_db;
    r.f_peak = r.points[static_cast<size_t>(best)].f;
    r.g_p_peak_db = yc;
    if (best > 0 && best + 1 < static_cast<int>(r.points.size()) &&
        !r.points[static_cast<size_t>(best - 1)].singular &&
        !r.points[static_cast<size_t>(best + 1)].singular) {
        double xl = std::log10(r.points[static_cast<size_t>(best - 1)].f);
        double xr = std::log10(r.points[static_cast<size_t>(best + 1)].f);
        double yl = r.points[static_cast<size_t>(best - 1)].gp_db;
        double yr = r.points[static_cast<size_t>(best + 1)].gp_db;
        double h = (xr - xl) / 2.0;
        double denom = yl - 2.0 * yc + yr;
        if (denom < 0.0) {
            double dx = 0.5 * h * (yl - yr) / denom;
            r.f_peak = std::pow(10.0, xc + dx);
            r.g_p_peak_db = yc - 0.25 * (yl - yr) * dx / h;
        }
    }
    const double drop = 3.010299956639812;  // 10*log10(2)
    double target = r.g_p_peak_db - drop;
    auto cross = [&](int from, int dir) -> double {
        for (int i = from; i + dir >= 0 && i + dir < static_cast<int>(r.points.size()); i += dir) {
            const AcPoint& p0 = r.points[static_cast<size_t>(i)];
            const AcPoint& p1 = r.points[static_cast<size_t>(i + dir)];
            if (p0.singular || p1.singular) continue;
            if ((p0.gp_db - target) * (p1.gp_db - target) <= 0.0 && p0.gp_db != p1.gp_db) {
                double t = (target - p0.gp_db) / (p1.gp_db - p0.gp_db);
                return std::pow(10.0, std::log10(p0.f) + t * (std::log10(p1.f) - std::log10(p0.f)));
            }
        }
        return 0.0;
    };
    double lo = cross(best, -1);
    double hi = cross(best, +1);
    if (lo > 0.0 && hi > 0.0) r.bw_3db = hi - lo;
}

AcSweepResult run_sweep(const LinearCircuit& c, double f_start, double f_stop, int ppd,
                        bool parallel) {
    AcSweepResult r;
    r.frequencies = log_frequencies(f_start, f_stop, ppd);
    r.points.resize(r.frequencies.size());
    const int n = static_cast<int>(r.frequencies.size());
#pragma omp parallel for schedule(static) if (parallel)
    for (int i = 0; i < n; ++i)
        r.points[static_cast<size_t>(i)] = solve_at(c, r.frequencies[static_cast<size_t>(i)]);
    finish_sweep(r);
    return r;
}

}  // namespace

std::vector<std::complex<double>> solve_phasors(const LinearCircuit& c, double f) {
    Eigen::MatrixXcd y;
    Eigen::VectorXcd rhs;
    fill_system(c, 2.0 * kPi * f, y, rhs);
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(y);
    if (!lu.isInvertible()) return {};
    Eigen::VectorXcd x = lu.solve(rhs);
    return {x.data(), x.data() + x.size()};
}

AcPoint solve_at(const LinearCircuit& c, double f) {
    std::vector<cplx> x = solve_phasors(c, f);
    return evaluate_point(c, f, x, x.empty());
}

AcSweepResult sweep_ac(const LinearCircuit& c, double f_start, double f_stop,
                       int points_per_decade) {
    return run_sweep(c, f_start, f_stop, points_per_decade, true);
}

AcSweepResult sweep_ac_serial(const LinearCircuit& c, double f_start, double f_stop,
                              int points_per_decade) {
    return run_sweep(c, f_start, f_stop, points_per_decade, false);
}

TankEquivalent tank_equivalent(const TankSource& t) {
    if (!(t.q > 0.0) || !(t.l_t > 0.0) || !(t.f_res > 0.0))
        throw std::invalid_argument("tank_equivalent: f_res, q, l_t must be > 0");
    double omega = 2.0 * kPi * t.f_res;
    TankEquivalent eq;
    eq.l_t = t.l_t;
    eq.c_t = 1.0 / (omega * omega * t.l_t);
    eq.r_p = t.q * omega * t.l_t;
    eq.drive = t.drive;
    return eq;
}

std::complex<double> MatchDesign::input_impedance() const {
    double omega = 2.0 * kPi * f;
    cplx z_series(0.0, omega * series_l);
    cplx y_shunt(0.0, omega * shunt_c);
    if (r_source > r_load) {
        // shunt C faces the source, series L feeds the load
        cplx z = z_series + r_load;
        return 1.0 / (y_shunt + 1.0 / z);
    }
    // series L faces the source, shunt C sits across the load
    cplx z = 1.0 / (y_shunt + 1.0 / r_load);
    return z_series + z;
}

MatchDesign design_l_match(double r_source, double r_load, double f) {
    if (!(r_source > 0.0) || !(r_load > 0.0) || !(f > 0.0))
        throw std::invalid_argument("design_l_match: impedances and frequency must be > 0");
    if (r_source == r_load)
        throw std::invalid_argument("design_l_match: nothing to match, r_source = r_load");
    double r_hi = std::max(r_source, r_load);
    double r_lo = std::min(r_source, r_load);
    double omega = 2.0 * kPi * f;
    MatchDesign m;
    m.r_source = r_source;
    m.r_load = r_load;
    m.f = f;
    m.q_match = std::sqrt(r_hi / r_lo - 1.0);
    double x_series = m.q_match * r_lo;  // adjacent to the low side
    double x_shunt = r_hi / m.q_match;   // across the high side
    m.series_l = x_series / omega;
    m.shunt_c = 1.0 / (omega * x_shunt);
    return m;
}

}  // namespace coldamp
