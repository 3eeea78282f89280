#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "af/boundary.hpp"
#include "af/mesh.hpp"
#include "af/models.hpp"
#include "af/update.hpp"

namespace af {

template <class S>
using SubFlow = std::function<S(const S&, double)>;

struct SplitWeights {
    double alpha_w = 2.0 / 3.0;
    double beta_w = -1.0 / 6.0;
};

inline FieldState combine(double a, const FieldState& x, double b, const FieldState& y) {
    FieldState r = x;
    for (size_t i = 0; i < r.cell_avgs.size(); ++i) r.cell_avgs[i] = a * x.cell_avgs[i] + b * y.cell_avgs[i];
    for (size_t i = 0; i < r.face_vals.size(); ++i) r.face_vals[i] = a * x.face_vals[i] + b * y.face_vals[i];
    r.source_budget.assign(std::max(x.source_budget.size(), y.source_budget.size()), 0.0);
    for (size_t i = 0; i < r.source_budget.size(); ++i) {
        double xs = i < x.source_budget.size() ? x.source_budget[i] : 0.0;
        double ys = i < y.source_budget.size() ? y.source_budget[i] : 0.0;
        r.source_budget[i] = a * xs + b * ys;
    }
    return r;
}

template <class S>
S combine(double a, const S& x, double b, const S& y) {
    return a * x + b * y;
}

template <class S>
S lie_step(const SubFlow<S>& f1, const SubFlow<S>& f2, const S& u, double dt) {
    return f2(f1(u, dt), dt);
}

template <class S>
S strang_step(const SubFlow<S>& f1, const SubFlow<S>& f2, const S& u, double dt) {
    return f1(f2(f1(u, 0.5 * dt), dt), 0.5 * dt);
}

template <class S>
S third_order_step(const SubFlow<S>& f1, const SubFlow<S>& f2, const S& u, double dt,
                   const SplitWeights& w = {}) {
    S u1 = lie_step(f1, f2, u, dt);
    S u2 = lie_step(f2, f1, u, dt);
    S u3 = strang_step(f1, f2, u, dt);
    S u4 = strang_step(f2, f1, u, dt);
    S strang_sum = combine(1.0, u3, 1.0, u4);
    S lie_sum = combine(1.0, u1, 1.0, u2);
    return combine(w.alpha_w, strang_sum, w.beta_w, lie_sum);
}

struct OrderProbe {
    std::vector<double> dts;
    std::vector<double> lie_err, strang_err, third_err;
    double lie_slope = 0.0;
    double strang_slope = 0.0;
    double third_slope = 0.0;
    bool exact = false;  // commuting pair: every error at round-off
};

using Mat2 = Eigen::Matrix2d;

OrderProbe splitting_order_probe(const Mat2& f1, const Mat2& f2, double t_end,
                                 const std::vector<double>& dt_list,
                                 const SplitWeights& weights = {});

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y);

struct NsProblem {
    const Grid* grid = nullptr;
    GasParams gas;
    BoundarySpec bc;
    std::function<Vec(double, double)> external;  // manufactured source or empty
    DualTimeConfig dual;
    Exec exec = Exec::serial;
    // Viscous sub-step as 2*B(h/2)B(h/2) - B(h) with implicit Euler B; plain B(h) when false.
    bool viscous_extrapolation = true;
};

struct NsStepStats {
    int viscous_solves = 0;
    int dual_iterations = 0;
    double max_residual = 0.0;
};

FieldState ns_inviscid_step(const FieldState& state, double dt, const NsProblem& problem);
FieldState ns_viscous_step(const FieldState& state, double dt, const NsProblem& problem,
                           NsStepStats* stats = nullptr);

FieldState ns_time_step(const FieldState& state, double dt, const NsProblem& problem,
                        const SplitWeights& weights = {}, NsStepStats* stats = nullptr);

}  // namespace af
