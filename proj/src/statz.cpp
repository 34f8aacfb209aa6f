#include "coldamp/statz.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace coldamp {

double drain_current(const StatzParams& p, double u_gs, double u_ds) {
    if (u_ds < 0.0) throw std::invalid_argument("drain_current: u_ds must be >= 0");
    double v = u_gs - p.u_t;
    if (v <= 0.0) return 0.0;  // cutoff clamp
    return p.beta * v * v * (1.0 + p.lambda * u_ds) * std::tanh(p.alpha * u_ds);
}

SmallSignal small_signal(const StatzParams& p, double u_gs, double u_ds) {
    if (u_ds < 0.0) throw std::invalid_argument("small_signal: u_ds must be >= 0");
    double v = u_gs - p.u_t;
    if (v <= 0.0) return {0.0, 0.0};
    double th = std::tanh(p.alpha * u_ds);
    double ch = std::cosh(p.alpha * u_ds);
    double sech2 = 1.0 / (ch * ch);
    double mod = 1.0 + p.lambda * u_ds;
    SmallSignal ss;
    ss.g_m = 2.0 * p.beta * v * mod * th;
    ss.g_ds = p.beta * v * v * (p.lambda * th + mod * p.alpha * sech2);
    return ss;
}

FitResult fit_statz(const std::vector<IVSample>& samples,
                    double fixed_lambda, double fixed_alpha,
                    double init_beta, double init_u_t) {
    if (samples.size() < 4)
        throw std::invalid_argument("fit_statz: need at least 4 samples");
    std::set<double> gs_values;
    for (const IVSample& s : samples) {
        if (s.u_ds < 0.0 || !std::isfinite(s.i_d) || s.i_d < 0.0)
            throw std::invalid_argument("fit_statz: samples must lie in the forward region");
        gs_values.insert(s.u_gs);
    }
    if (gs_values.size() < 2)
        throw std::invalid_argument("fit_statz: degenerate Jacobian, all samples at one u_gs");

    StatzParams p;
    p.beta = init_beta;
    p.u_t = init_u_t;
    p.lambda = fixed_lambda;
    p.alpha = fixed_alpha;

    auto cost = [&](const StatzParams& q) {
        double c = 0.0;
        for (const IVSample& s : samples) {
            double r = drain_current(q, s.u_gs, s.u_ds) - s.i_d;
            c += r * r;
        }
        return c;
    };

    FitResult result;
    double mu = 1e-3;
    double best_cost = cost(p);
    int iter = 0;
    for (; iter < 200; ++iter) {
        // Normal equations for the 2-parameter residual, accumulated directly.
        double jtj00 = 0, jtj01 = 0, jtj11 = 0, jtr0 = 0, jtr1 = 0;
        for (const IVSample& s : samples) {
            double id = drain_current(p, s.u_gs, s.u_ds);
            double r = id - s.i_d;
            double d_beta = p.beta > 0.0 ? id / p.beta : 0.0;
            double d_ut = -small_signal(p, s.u_gs, s.u_ds).g_m;  // dI/dU_T = -dI/dU_gs
            jtj00 += d_beta * d_beta;
            jtj01 += d_beta * d_ut;
            jtj11 += d_ut * d_ut;
            jtr0 += d_beta * r;
            jtr1 += d_ut * r;
        }
        double det = jtj00 * jtj11 - jtj01 * jtj01;
        if (det <= 1e-30 * std::max(1.0, jtj00 * jtj11))
            throw std::runtime_error("fit_statz: degenerate Jacobian");

        // Damped step; retry with heavier damping until the cost drops.
        bool accepted = false;
        for (int tries = 0; tries < 40; ++tries) {
            double a00 = jtj00 * (1.0 + mu), a11 = jtj11 * (1.0 + mu);
            double d = a00 * a11 - jtj01 * jtj01;
            double step_beta = (-jtr0 * a11 + jtr1 * jtj01) / d;
            double step_ut = (-jtr1 * a00 + jtr0 * jtj01) / d;
            StatzParams trial = p;
            trial.beta += step_beta;
            trial.u_t += step_ut;
            if (trial.beta > 0.0) {
                double c = cost(trial);
                if (c <= best_cost) {
                    double rel = std::max(std::abs(step_beta) / std::max(1e-30, std::abs(trial.beta)),
                                          std::abs(step_ut) / std::max(1e-30, std::abs(trial.u_t)));
                    p = trial;
                    best_cost = c;
                    mu = std::max(mu / 3.0, 1e-12);
                    accepted = true;
                    if (rel < 1e-9) {
                        result.converged = true;
                        iter++;
                    }
                    break;
                }
            }
            mu *= 3.0;
        }
        if (result.converged) break;
        if (!accepted) break;  // stuck: damping no longer helps
    }

    result.params = p;
    result.iterations = iter;
    result.rms_residual = std::sqrt(best_cost / static_cast<double>(samples.size()));
    return result;
}

}  // namespace coldamp
