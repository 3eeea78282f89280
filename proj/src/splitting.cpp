#include "af/splitting.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>

#include "af/solver.hpp"
#include "af/verification.hpp"

namespace af {

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw Error("least_squares_slope: need two or more matching points");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t k = 0; k < x.size(); ++k) {
        sx += x[k];
        sy += y[k];
        sxx += x[k] * x[k];
        sxy += x[k] * y[k];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

OrderProbe splitting_order_probe(const Mat2& f1, const Mat2& f2, double t_end,
                                 const std::vector<double>& dt_list, const SplitWeights& weights) {
    using V2 = Eigen::Vector2d;
    const V2 u0(1.0, 0.5);
    const V2 exact = Mat2((f1 + f2) * t_end).exp() * u0;
    OrderProbe probe;
    probe.dts = dt_list;
    for (double dt : dt_list) {
        const int steps = static_cast<int>(std::lround(t_end / dt));
        const double h = t_end / steps;
        SubFlow<V2> a = [&](const V2& u, double s) -> V2 { return Mat2(f1 * s).exp() * u; };
        SubFlow<V2> b = [&](const V2& u, double s) -> V2 { return Mat2(f2 * s).exp() * u; };
        V2 ul = u0, us = u0, ut = u0;
        for (int k = 0; k < steps; ++k) {
            ul = lie_step(a, b, ul, h);
            us = strang_step(a, b, us, h);
            ut = third_order_step(a, b, ut, h, weights);
        }
        probe.lie_err.push_back((ul - exact).norm());
        probe.strang_err.push_back((us - exact).norm());
        probe.third_err.push_back((ut - exact).norm());
    }
    const double floor = 1e-13 * std::max(1.0, exact.norm());
    probe.exact = true;
    for (size_t k = 0; k < dt_list.size(); ++k)
        if (probe.lie_err[k] > floor || probe.strang_err[k] > floor || probe.third_err[k] > floor) probe.exact = false;
    if (!probe.exact) {
        std::vector<double> lx, ll, ls, lt;
        for (size_t k = 0; k < dt_list.size(); ++k) {
            lx.push_back(std::log(dt_list[k]));
            ll.push_back(std::log(std::max(probe.lie_err[k], 1e-300)));
            ls.push_back(std::log(std::max(probe.strang_err[k], 1e-300)));
            lt.push_back(std::log(std::max(probe.third_err[k], 1e-300)));
        }
        probe.lie_slope = least_squares_slope(lx, ll);
        probe.strang_slope = least_squares_slope(lx, ls);
        probe.third_slope = least_squares_slope(lx, lt);
    }
    return probe;
}

FieldState ns_inviscid_step(const FieldState& state, double dt, const NsProblem& problem) {
    try {
        return af_explicit_step(state, *problem.grid, ns_inviscid_model(problem.gas), problem.bc, dt, problem.exec);
    } catch (const Error& e) {
        throw Error(std::string("inviscid sub-step: ") + e.what());
    }
}

namespace {

bool viscous_is_identity(const NsProblem& problem) {
    return problem.gas.mu <= 0.0 && !problem.external;
}

}  // namespace

// The physical clock is advanced by the inviscid sub-flow only; the viscous sub-flow
// samples its external source at the current clock. Implicit Euler alone would cap the
// split step at first order in time, so it is extrapolated to second order by default.
FieldState ns_viscous_step(const FieldState& state, double dt, const NsProblem& problem,
                           NsStepStats* stats) {
    if (viscous_is_identity(problem) || dt == 0.0) return state;
    auto solve = [&](const FieldState& s, double h) {
        DualTimeStats ds;
        FieldState out = viscous_dual_step(s, *problem.grid, problem.gas, problem.bc, problem.external,
                                           state.time, h, problem.dual, problem.exec, &ds);
        out.time = state.time;
        if (stats) {
            stats->viscous_solves++;
            stats->dual_iterations += ds.iterations;
            stats->max_residual = std::max(stats->max_residual, ds.residual);
        }
        return out;
    };
    try {
        FieldState full = solve(state, dt);
        if (!problem.viscous_extrapolation) return full;
        FieldState half = solve(solve(state, 0.5 * dt), 0.5 * dt);
        return combine(2.0, half, -1.0, full);
    } catch (const Error& e) {
        throw Error(std::string("viscous sub-step: ") + e.what());
    }
}

FieldState ns_time_step(const FieldState& state, double dt, const NsProblem& problem,
                        const SplitWeights& weights, NsStepStats* stats) {
    if (viscous_is_identity(problem)) return ns_inviscid_step(state, dt, problem);
    SubFlow<FieldState> inviscid = [&](const FieldState& s, double h) { return ns_inviscid_step(s, h, problem); };
    SubFlow<FieldState> viscous = [&](const FieldState& s, double h) { return ns_viscous_step(s, h, problem, stats); };
    FieldState out = third_order_step(inviscid, viscous, state, dt, weights);
    if (!out.all_finite()) throw Error("split step produced a nonfinite state");
    return out;
}

}  // namespace af
