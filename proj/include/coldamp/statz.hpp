#pragma once

#include <vector>

#include "coldamp/netlist.hpp"

namespace coldamp {

/// One measured I-V point of a FET in its forward region.
struct IVSample {
    double u_gs;  // gate-source voltage, V
    double u_ds;  // drain-source voltage, V
    double i_d;   // drain current, A
};

struct SmallSignal {
    double g_m;   // dI_d/dU_gs, S
    double g_ds;  // dI_d/dU_ds, S
};

/// Statz drain current beta*(U_gs-U_T)^2*(1+lambda*U_ds)*tanh(alpha*U_ds),
/// clamped to zero below threshold. Requires u_ds >= 0.
double drain_current(const StatzParams& p, double u_gs, double u_ds);

/// Analytic partial derivatives of drain_current; both zero in cutoff.
SmallSignal small_signal(const StatzParams& p, double u_gs, double u_ds);

struct FitResult {
    StatzParams params;
    double rms_residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Least-squares recovery of (beta, u_t) from I-V samples with lambda and
/// alpha held fixed. Damped Gauss-Newton (Levenberg-Marquardt); converged
/// when the relative parameter step drops below 1e-9, capped at 200
/// iterations (non-convergence returns best-so-far with converged=false).
/// Throws on fewer than 4 samples, fewer than 2 distinct u_gs values,
/// samples outside the forward region, or a degenerate Jacobian.
FitResult fit_statz(const std::vector<IVSample>& samples,
                    double fixed_lambda, double fixed_alpha,
                    double init_beta, double init_u_t);

}  // namespace coldamp
