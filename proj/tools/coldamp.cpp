// coldamp: netlist-driven DC/AC simulation of the cooled HEMT amplifier plus
// the measuring-cell physics tools (qubit spectrum, photon budget, brightness
// temperature, matching synthesis).

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "coldamp/ac.hpp"
#include "coldamp/constants.hpp"
#include "coldamp/dc.hpp"
#include "coldamp/netlist.hpp"
#include "coldamp/output.hpp"
#include "coldamp/planck.hpp"
#include "coldamp/qubit.hpp"
#include "coldamp/statz.hpp"

namespace {

using namespace coldamp;

constexpr int kExitOk = 0;
constexpr int kExitError = 2;        // file/parse/validate/usage problems
constexpr int kExitNoConverge = 3;   // solver failed to converge

struct GlobalOpts {
    std::string format = "csv";
    std::string out;
    bool quiet = false;
};

std::ostream& info(const GlobalOpts& g) {
    static std::ofstream devnull("/dev/null");
    return g.quiet ? devnull : std::cerr;
}

std::string resolve_out(const std::string& path) {
    const char* dir = std::getenv("COLDAMP_OUT_DIR");
    if (!dir || !*dir || path.empty() || path.front() == '/') return path;
    return std::string(dir) + "/" + path;
}

void write_output(const GlobalOpts& g, const std::string& text) {
    if (g.out.empty()) {
        std::cout << text;
        return;
    }
    std::string path = resolve_out(g.out);
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open output file '" + path + "'");
    f << text;
}

std::string render(const GlobalOpts& g, const Table& t) {
    if (g.format == "json") return to_json(t);
    return to_csv(t);
}

Netlist load_netlist(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("no such file: '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str());
}

int run_dc(const GlobalOpts& g, const std::string& path,
           const std::vector<std::string>& sweep_args) {
    Netlist net = load_netlist(path);
    auto diags = validate(net);
    if (!diags.empty()) {
        for (const std::string& d : diags) std::cerr << "diagnostic: " << d << "\n";
        return kExitError;
    }

    std::optional<AnalysisDirective> sweep;
    if (!sweep_args.empty()) {
        AnalysisDirective d;
        d.kind = AnalysisDirective::Kind::DcSweep;
        d.source = sweep_args[0];
        d.start = parse_spice_number(sweep_args[1]);
        d.stop = parse_spice_number(sweep_args[2]);
        d.step = parse_spice_number(sweep_args[3]);
        sweep = d;
    } else {
        for (const AnalysisDirective& d : net.analyses)
            if (d.kind == AnalysisDirective::Kind::DcSweep) sweep = d;
    }

    if (sweep) {
        auto rows = sweep_supply(net, sweep->source, sweep->start, sweep->stop, sweep->step);
        Table t;
        t.columns = {"u_supply", "i_d", "u_ds", "p_hemt", "p_bias"};
        for (const SweepRow& r : rows)
            t.rows.push_back({r.u_supply, r.i_d, r.u_ds, r.p_hemt, r.p_bias});
        if (g.format == "svg") {
            Series id{"i_d [uA]", {}, {}}, uds{"u_ds [mV]", {}, {}}, ph{"p_hemt [uW]", {}, {}},
                pb{"p_bias [uW]", {}, {}};
            for (const SweepRow& r : rows) {
                id.x.push_back(r.u_supply); id.y.push_back(r.i_d * 1e6);
                uds.x.push_back(r.u_supply); uds.y.push_back(r.u_ds * 1e3);
                ph.x.push_back(r.u_supply); ph.y.push_back(r.p_hemt * 1e6);
                pb.x.push_back(r.u_supply); pb.y.push_back(r.p_bias * 1e6);
            }
            write_output(g, to_svg({id, uds, ph, pb}, "U_supply [V]", "operating point", false));
        } else {
            write_output(g, render(g, t));
        }
        for (const SweepRow& r : rows) {
            // chosen operation point, when the sweep crosses it
            if (std::abs(r.u_supply - 0.44) < 1e-9)
                info(g) << "at U_supply = 0.44 V: I_d = " << format_number(r.i_d)
                        << " A, U_ds = " << format_number(r.u_ds)
                        << " V, P_HEMT = " << format_number(r.p_hemt)
                        << " W, P_bias = " << format_number(r.p_bias) << " W\n";
        }
        return kExitOk;
    }

    OperatingPoint op = solve_op(net);
    Table t;
    std::vector<double> row;
    for (const auto& [node, v] : op.node_voltages) {
        if (node == "0") continue;
        t.columns.push_back("v(" + node + ")");
        row.push_back(v);
    }
    for (const auto& [name, i] : op.source_currents) {
        t.columns.push_back("i(" + name + ")");
        row.push_back(i);
    }
    for (const FetBias& fb : op.fets) {
        for (const char* q : {"u_gs", "u_ds", "i_d", "g_m", "g_ds", "p_hemt", "p_bias"})
            t.columns.push_back(std::string(q) + "(" + fb.name + ")");
        row.insert(row.end(), {fb.u_gs, fb.u_ds, fb.i_d, fb.g_m, fb.g_ds, fb.p_hemt, fb.p_bias});
    }
    t.rows.push_back(row);
    write_output(g, render(g, t));
    info(g) << "operating point " << (op.converged ? "converged" : "did NOT converge") << " in "
            << op.iterations << " iterations, max KCL residual "
            << format_number(op.max_kcl_residual) << " A\n";
    return op.converged ? kExitOk : kExitNoConverge;
}

int run_ac(const GlobalOpts& g, const std::string& path, int points, double fstart,
           double fstop) {
    Netlist net = load_netlist(path);
    auto diags = validate(net);
    if (!diags.empty()) {
        for (const std::string& d : diags) std::cerr << "diagnostic: " << d << "\n";
        return kExitError;
    }
    for (const AnalysisDirective& d : net.analyses) {
        if (d.kind != AnalysisDirective::Kind::AcSweep) continue;
        if (points <= 0) points = d.points_per_decade;
        if (fstart <= 0) fstart = d.f_start;
        if (fstop <= 0) fstop = d.f_stop;
    }
    if (points <= 0 || fstart <= 0 || fstop <= 0)
        throw std::runtime_error("no .ac directive and no --points/--fstart/--fstop given");

    OperatingPoint op = solve_op(net);
    if (!op.converged) return kExitNoConverge;
    LinearCircuit lin = linearize(net, op);
    if (!lin.ports)
        throw std::runtime_error(
            "netlist needs a .probe line naming the ports: V(in) I(in) V(out) I(out)");
    AcSweepResult r = sweep_ac(lin, fstart, fstop, points);
    for (const std::string& e : r.errors) std::cerr << "warning: " << e << "\n";

    Table t;
    t.columns = {"f_hz", "gv_db", "gi_db", "gp_db"};
    for (const AcPoint& pt : r.points) {
        if (pt.singular) continue;
        t.rows.push_back({pt.f, pt.gv_db, pt.gi_db, pt.gp_db});
    }
    if (g.format == "svg") {
        Series gv{"G_V [dB]", {}, {}}, gi{"G_I [dB]", {}, {}}, gp{"G_P [dB]", {}, {}};
        for (const AcPoint& pt : r.points) {
            if (pt.singular) continue;
            gv.x.push_back(pt.f); gv.y.push_back(pt.gv_db);
            gi.x.push_back(pt.f); gi.y.push_back(pt.gi_db);
            gp.x.push_back(pt.f); gp.y.push_back(pt.gp_db);
        }
        write_output(g, to_svg({gv, gi, gp}, "f [Hz]", "gain [dB]", true));
    } else {
        write_output(g, render(g, t));
    }

    if (fstart <= 450e6 && 450e6 <= fstop) {
        AcPoint at = solve_at(lin, 450e6);
        info(g) << "at 450 MHz: G_V = " << format_number(at.gv_db)
                << " dB, G_I = " << format_number(at.gi_db)
                << " dB, G_P = " << format_number(at.gp_db) << " dB\n";
    }
    info(g) << "peak G_P = " << format_number(r.g_p_peak_db) << " dB at "
            << format_number(r.f_peak) << " Hz, 3 dB bandwidth " << format_number(r.bw_3db)
            << " Hz\n";
    return kExitOk;
}

int run_fit(const GlobalOpts& g, const std::string& path, double lambda, double alpha,
            double init_beta, double init_vto, double cin, double rin) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("no such file: '" + path + "'");
    std::string header;
    if (!std::getline(f, header) || header.find("u_gs") == std::string::npos)
        throw std::runtime_error("fit CSV needs a 'u_gs,u_ds,i_d' header");
    std::vector<IVSample> samples;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        IVSample s{};
        char comma;
        std::istringstream ls(line);
        if (!(ls >> s.u_gs >> comma >> s.u_ds >> comma >> s.i_d))
            throw std::runtime_error("bad CSV row: '" + line + "'");
        samples.push_back(s);
    }
    FitResult fit = fit_statz(samples, lambda, alpha, init_beta, init_vto);
    std::ostringstream out;
    out << ".model FIT STATZ beta=" << format_number(fit.params.beta)
        << " vto=" << format_number(fit.params.u_t) << " lambda=" << format_number(lambda)
        << " alpha=" << format_number(alpha) << " cin=" << format_number(cin)
        << " rin=" << format_number(rin) << "\n";
    write_output(g, out.str());
    info(g) << "fit " << (fit.converged ? "converged" : "did NOT converge") << " in "
            << fit.iterations << " iterations, rms residual " << format_number(fit.rms_residual)
            << " A over " << samples.size() << " samples\n";
    return fit.converged ? kExitOk : kExitNoConverge;
}

int run_spectrum(const GlobalOpts& g, const std::string& path, int levels, int n, double phi_min,
                 double phi_max, const std::string& potential_out) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("no such file: '" + path + "'");
    nlohmann::json j = nlohmann::json::parse(f);
    QubitParams q;
    q.l = j.at("l").get<double>();
    q.c = j.at("c").get<double>();
    q.beta_l = j.at("beta_l").get<double>();
    q.phi_e = j.at("phi_e").get<double>();

    FluxGrid grid = default_grid(q);
    if (n > 0) grid.n = n;
    if (phi_min < phi_max) {
        grid.phi_min = phi_min;
        grid.phi_max = phi_max;
    }
    Hamiltonian ham = build_hamiltonian(q, grid);
    SpectrumResult s = eigensolve(ham, levels);
    if (s.coarse_grid_warning)
        std::cerr << "warning: grid is coarse (fewer than 3 points per local wavelength)\n";

    Table t;
    t.columns = {"level", "energy_K", "energy_GHz", "flux_expect_phi0"};
    for (int i = 0; i < levels; ++i)
        t.rows.push_back({static_cast<double>(i), s.energy_K[i], s.energy_GHz[i],
                          s.flux_expect[i]});
    if (g.format == "svg") {
        Series pot{"U/k_B [K]", s.phi, s.potential_K};
        std::vector<Series> all{pot};
        for (int i = 0; i < levels; ++i)
            all.push_back({"E" + std::to_string(i),
                           {s.phi.front(), s.phi.back()},
                           {s.energy_K[i], s.energy_K[i]}});
        write_output(g, to_svg(all, "flux [Phi0]", "U/k_B [K]", false));
    } else {
        write_output(g, render(g, t));
    }
    if (!potential_out.empty()) {
        Table pt;
        pt.columns = {"phi", "potential_K"};
        for (size_t i = 0; i < s.phi.size(); ++i)
            pt.rows.push_back({s.phi[i], s.potential_K[i]});
        std::ofstream pf(resolve_out(potential_out));
        pf << (g.format == "json" ? to_json(pt) : to_csv(pt));
    }
    if (s.wells.is_double_well()) {
        info(g) << "double well: minima at " << format_number(s.wells.minima_phi[0]) << " and "
                << format_number(s.wells.minima_phi[1]) << " Phi0, barrier at "
                << format_number(s.wells.barrier_phi) << " Phi0\n";
        for (int i = 0; i < levels; ++i) {
            const char* w = s.well[i] == Well::Lower ? "lower well"
                            : s.well[i] == Well::Upper ? "upper well"
                                                       : "delocalized";
            info(g) << "level " << i << ": " << w << "\n";
        }
    }
    return kExitOk;
}

int run_photons(const GlobalOpts& g, double f, double t, double area, double bandwidth,
                bool table_mode) {
    Table out;
    out.columns = {"f_hz", "t_k", "area_m2", "bandwidth_hz", "radiance", "power_density",
                   "rate_per_s"};
    if (table_mode) {
        info(g) << "bandwidth assumption: f/10 per row (the published counts carry no explicit "
                   "bandwidth)\n";
        for (double fg : {8e9, 10e9, 12e9, 15e9})
            for (double tg : {0.010, 0.020, 0.030}) {
                PhotonBudget b = photon_rate(fg, tg, area, fg / 10.0);
                out.rows.push_back({b.f, b.t, b.area, b.bandwidth, b.radiance, b.power_density,
                                    b.rate});
            }
    } else {
        PhotonBudget b = photon_rate(f, t, area, bandwidth);
        out.rows.push_back({b.f, b.t, b.area, b.bandwidth, b.radiance, b.power_density, b.rate});
    }
    write_output(g, render(g, out));
    return kExitOk;
}

int run_brightness(const GlobalOpts& g, double tg, double td, double s12) {
    Table t;
    t.columns = {"t_b_K"};
    t.rows.push_back({brightness_temperature(tg, td, s12)});
    write_output(g, render(g, t));
    return kExitOk;
}

int run_match(const GlobalOpts& g, double rs, double rl, double f) {
    MatchDesign m = design_l_match(rs, rl, f);
    std::ostringstream out;
    out << "* L-section " << format_number(rs) << " -> " << format_number(rl) << " ohm at "
        << format_number(f) << " Hz, q = " << format_number(m.q_match) << "\n";
    out << "* shunt capacitor across the " << format_number(std::max(rs, rl))
        << " ohm side, series inductor toward the " << format_number(std::min(rs, rl))
        << " ohm side\n";
    out << "CSHUNT hi 0 " << format_number(m.shunt_c) << "\n";
    out << "LSER hi lo " << format_number(m.series_l) << "\n";
    write_output(g, out.str());
    std::complex<double> zin = m.input_impedance();
    info(g) << "input impedance check: " << format_number(zin.real()) << " + j"
            << format_number(zin.imag()) << " ohm (target " << format_number(rs) << ")\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cryogenic amplifier and measuring-cell design calculator"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand
    GlobalOpts g;
    app.add_option("--format", g.format, "output format: csv, json or svg")
        ->check(CLI::IsMember({"csv", "json", "svg"}));
    app.add_option("--out", g.out, "output path (default stdout; COLDAMP_OUT_DIR prefixes relative paths)");
    app.add_flag("--quiet", g.quiet, "suppress summary output on stderr");

    std::string netlist_path, csv_path, json_path;
    std::vector<std::string> sweep_args;
    int points = 0, levels = 10, grid_n = 0;
    double fstart = 0, fstop = 0;
    double lambda = 0.0, alpha = 2.0, init_beta = 0.1, init_vto = -0.55, cin = 0.0, rin = 0.0;
    double phi_min = 0, phi_max = 0;
    std::string potential_out;
    double f = 10e9, t = 0.020, area = 1.25e-2, bandwidth = 1e6;
    bool table_mode = false;
    double tg = 0, td = 0, s12 = 0, rs = 0, rl = 0, fmatch = 450e6;

    CLI::App* dc = app.add_subcommand("dc", "DC operating point or supply sweep of a netlist");
    dc->add_option("netlist", netlist_path)->required();
    dc->add_option("--sweep", sweep_args, "SOURCE START STOP STEP (overrides the .dc directive)")
        ->expected(4);

    CLI::App* ac = app.add_subcommand("ac", "small-signal sweep around the operating point");
    ac->add_option("netlist", netlist_path)->required();
    ac->add_option("--points", points, "points per decade");
    ac->add_option("--fstart", fstart, "sweep start, Hz");
    ac->add_option("--fstop", fstop, "sweep stop, Hz");

    CLI::App* fit = app.add_subcommand("fit", "fit beta and vto of the drain-current law to I-V data");
    fit->add_option("csv", csv_path, "CSV with header u_gs,u_ds,i_d")->required();
    fit->add_option("--lambda", lambda);
    fit->add_option("--alpha", alpha);
    fit->add_option("--init-beta", init_beta);
    fit->add_option("--init-vto", init_vto);
    fit->add_option("--cin", cin, "passed through to the emitted .model line");
    fit->add_option("--rin", rin, "passed through to the emitted .model line");

    CLI::App* spectrum = app.add_subcommand("spectrum", "flux-qubit stationary spectrum");
    spectrum->add_option("params", json_path, "JSON with l, c, beta_l, phi_e")->required();
    spectrum->add_option("--levels", levels);
    spectrum->add_option("--n", grid_n, "grid points");
    spectrum->add_option("--phi-min", phi_min);
    spectrum->add_option("--phi-max", phi_max);
    spectrum->add_option("--potential-out", potential_out, "also write phi,potential_K table");

    CLI::App* photons = app.add_subcommand("photons", "thermal photon budget in the shield cavity");
    photons->add_option("--f", f, "Hz");
    photons->add_option("--t", t, "K");
    photons->add_option("--area", area, "m^2");
    photons->add_option("--bandwidth", bandwidth, "Hz");
    photons->add_flag("--table", table_mode, "published frequency/temperature grid");

    CLI::App* brightness = app.add_subcommand("brightness", "amplifier input brightness temperature");
    brightness->add_option("--tg", tg, "gate temperature, K")->required();
    brightness->add_option("--td", td, "drain electron temperature, K")->required();
    brightness->add_option("--s12", s12, "backward transmission, dB")->required();

    CLI::App* match = app.add_subcommand("match", "lossless L-section between two resistances");
    match->add_option("--rs", rs, "source resistance, ohm")->required();
    match->add_option("--rl", rl, "load resistance, ohm")->required();
    match->add_option("--f", fmatch, "design frequency, Hz");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitError;
    }

    try {
        if (dc->parsed()) return run_dc(g, netlist_path, sweep_args);
        if (ac->parsed()) return run_ac(g, netlist_path, points, fstart, fstop);
        if (fit->parsed()) return run_fit(g, csv_path, lambda, alpha, init_beta, init_vto, cin, rin);
        if (spectrum->parsed())
            return run_spectrum(g, json_path, levels, grid_n, phi_min, phi_max, potential_out);
        if (photons->parsed()) return run_photons(g, f, t, area, bandwidth, table_mode);
        if (brightness->parsed()) return run_brightness(g, tg, td, s12);
        if (match->parsed()) return run_match(g, rs, rl, fmatch);
    } catch (const std::runtime_error& e) {
        std::string what = e.what();
        std::cerr << "error: " << what << "\n";
        return what.find("convergence") != std::string::npos ? kExitNoConverge : kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
