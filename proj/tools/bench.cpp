// Benchmark of the OpenMP kernels against their serial reference
// implementations: the complex MNA frequency sweep and the qubit
// transition scan.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <omp.h>

#include "coldamp/ac.hpp"
#include "coldamp/dc.hpp"
#include "coldamp/netlist.hpp"
#include "coldamp/qubit.hpp"

using namespace coldamp;

namespace {

double seconds(auto fn) {
    auto t0 = std::chrono::steady_clock::now();
    fn();
    auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    std::string netlist_path = argc > 1 ? argv[1] : "circuits/two_stage_amp.cir";
    std::ifstream f(netlist_path);
    if (!f) {
        std::fprintf(stderr, "cannot open %s (run from the repository root)\n",
                     netlist_path.c_str());
        return 1;
    }
    std::stringstream ss;
    ss << f.rdbuf();
    Netlist net = parse(ss.str());
    OperatingPoint op = solve_op(net);
    LinearCircuit lin = linearize(net, op);

    std::printf("threads: %d\n\n", omp_get_max_threads());

    {
        const int ppd = 2000;  // ~2600 frequency points
        AcSweepResult serial, parallel;
        double ts = seconds([&] { serial = sweep_ac_serial(lin, 100e6, 2e9, ppd); });
        double tp = seconds([&] { parallel = sweep_ac(lin, 100e6, 2e9, ppd); });
        double max_diff = 0.0;
        for (size_t i = 0; i < serial.points.size(); ++i)
            max_diff = std::max(max_diff,
                                std::abs(serial.points[i].gp_db - parallel.points[i].gp_db));
        std::printf("ac sweep, %zu points:\n", serial.points.size());
        std::printf("  serial   %8.1f ms\n", ts * 1e3);
        std::printf("  parallel %8.1f ms   speedup %.2fx   max |dGp| %.3g dB\n\n", tp * 1e3,
                    ts / tp, max_diff);
    }

    {
        QubitParams q{2e-10, 76e-15, 1.325, 0.5135};
        const int n_points = 64;
        std::vector<ScanPoint> serial, parallel;
        double ts = seconds(
            [&] { serial = transition_scan_serial(q, "beta_l", 1.26, 1.44, n_points, 6, 7); });
        double tp = seconds(
            [&] { parallel = transition_scan(q, "beta_l", 1.26, 1.44, n_points, 6, 7); });
        double max_diff = 0.0;
        for (size_t i = 0; i < serial.size(); ++i)
            max_diff = std::max(max_diff, std::abs(serial[i].f_ij_ghz - parallel[i].f_ij_ghz));
        std::printf("transition scan, %d spectra:\n", n_points);
        std::printf("  serial   %8.1f ms\n", ts * 1e3);
        std::printf("  parallel %8.1f ms   speedup %.2fx   max |df| %.3g GHz\n", tp * 1e3,
                    ts / tp, max_diff);
    }
    return 0;
}
