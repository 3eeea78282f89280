#include "af/update.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "af/reconstruction.hpp"

namespace af {

Vec simpson_flux(const Vec& f_n, const Vec& f_half, const Vec& f_np1, double dt) {
    return dt / 6.0 * (f_n + 4.0 * f_half + f_np1);
}

FieldState conservative_update(const FieldState& state, const std::vector<double>& time_fluxes,
                               const std::vector<double>& source_integrals, const Grid& grid,
                               double dt, Exec exec) {
    const int n = state.n_cells, m = state.n_vars;
    if (time_fluxes.size() != static_cast<size_t>(n + 1) * m)
        throw Error("conservative_update: flux array size mismatch");
    const bool src = !source_integrals.empty();
    if (src && source_integrals.size() != static_cast<size_t>(n) * m)
        throw Error("conservative_update: source array size mismatch");
    FieldState out = state;
    const double inv_dx = 1.0 / grid.dx;
    if (exec == Exec::omp) {
#pragma omp parallel for schedule(static)
        for (int i = 0; i < n; ++i)
            for (int v = 0; v < m; ++v) {
                size_t c = static_cast<size_t>(i) * m + v;
                double d = time_fluxes[c + m] - time_fluxes[c];
                out.cell_avgs[c] = state.cell_avgs[c] - d * inv_dx + (src ? source_integrals[c] * inv_dx : 0.0);
            }
    } else {
        for (int i = 0; i < n; ++i)
            for (int v = 0; v < m; ++v) {
                size_t c = static_cast<size_t>(i) * m + v;
                double d = time_fluxes[c + m] - time_fluxes[c];
                out.cell_avgs[c] = state.cell_avgs[c] - d * inv_dx + (src ? source_integrals[c] * inv_dx : 0.0);
            }
    }
    if (src) {
        out.source_budget.resize(m, 0.0);
        for (int i = 0; i < n; ++i)
            for (int v = 0; v < m; ++v) out.source_budget[v] += source_integrals[static_cast<size_t>(i) * m + v];
    }
    out.time = state.time + dt;
    return out;
}

Vec linear_source_integral(const ModelDescriptor& model, int cell, const FieldState& state_n,
                           const std::vector<double>& faces_half,
                           const std::vector<double>& faces_np1, const Grid& grid, double t_n,
                           double dt) {
    const int m = state_n.n_vars;
    Vec out = Vec::Zero(m);
    if (!model.has_source) return out;
    const size_t l = static_cast<size_t>(cell) * m, r = l + m;
    if (model.source_matrix.size() > 0) {
        Vec st(m);
        for (int v = 0; v < m; ++v)
            st[v] = spacetime_cell_integral(state_n.avg(cell, v), state_n.face(cell, v), faces_half[l + v],
                                            faces_np1[l + v], state_n.face(cell + 1, v), faces_half[r + v],
                                            faces_np1[r + v], grid.dx, dt);
        out.noalias() += model.source_matrix * st;
    }
    if (model.external) {
        const double xl = grid.face_coords[cell], xr = grid.face_coords[cell + 1];
        const double xc = 0.5 * (xl + xr);
        const double th = t_n + 0.5 * dt, t1 = t_n + dt;
        Vec el0 = model.external(xl, t_n), elh = model.external(xl, th), el1 = model.external(xl, t1);
        Vec er0 = model.external(xr, t_n), erh = model.external(xr, th), er1 = model.external(xr, t1);
        Vec avg = (el0 + 4.0 * model.external(xc, t_n) + er0) / 6.0;
        for (int v = 0; v < m; ++v)
            out[v] += spacetime_cell_integral(avg[v], el0[v], elh[v], el1[v], er0[v], erh[v], er1[v], grid.dx, dt);
    }
    return out;
}

BdfCoeffs bdf_coeffs(int order) {
    switch (order) {
        case 1: return {1.0, -1.0, 0.0, 0.0, 1};
        case 2: return {1.5, -2.0, 0.5, 0.0, 2};
        case 3: return {11.0 / 6.0, -3.0, 1.5, -1.0 / 3.0, 3};
        default: throw Error("bdf_coeffs: order must be 1, 2 or 3");
    }
}

FieldState dual_time_march(const std::vector<const FieldState*>& history, double dt,
                           const DualStepFn& step_fn, const DualTimeConfig& config,
                           const BdfCoeffs& coeffs, const std::vector<int>& pseudo_steady_vars,
                           DualTimeStats* stats) {
    if (static_cast<int>(history.size()) < coeffs.order) throw Error("dual_time_march: history shorter than BDF order");
    if (!(dt > 0.0)) throw Error("dual_time_march: dt must be positive");
    const FieldState& un = *history[0];
    const int n = un.n_cells, m = un.n_vars;

    std::vector<double> mask(m, 1.0);
    for (int v : pseudo_steady_vars) mask[v] = 0.0;

    // Frozen BDF history contribution per cell: (beta U^n + gamma U^{n-1} + delta U^{n-2}) / dt.
    std::vector<double> hist(static_cast<size_t>(n) * m, 0.0);
    const double w[3] = {coeffs.beta, coeffs.gamma, coeffs.delta};
    for (int h = 0; h < coeffs.order; ++h)
        for (size_t c = 0; c < hist.size(); ++c) hist[c] += w[h] * history[h]->cell_avgs[c] / dt;

    std::ofstream log;
    if (!config.residual_log.empty()) log.open(config.residual_log, std::ios::app);

    FieldState cur = un;
    double res = 0.0;
    for (int it = 1; it <= config.max_iters; ++it) {
        DualResidual r = step_fn(cur);
        const double dtau = r.dtau;
        FieldState next = r.next_faces;
        res = 0.0;
        for (int i = 0; i < n; ++i)
            for (int v = 0; v < m; ++v) {
                size_t c = static_cast<size_t>(i) * m + v;
                double rstar = r.rstar[c] - mask[v] * hist[c];
                double upd = (cur.cell_avgs[c] + dtau * rstar) / (1.0 + mask[v] * coeffs.alpha * dtau / dt);
                res = std::max(res, std::abs(upd - cur.cell_avgs[c]) / dtau);
                next.cell_avgs[c] = upd;
            }
        if (!std::isfinite(res)) throw Error("dual time diverged at iteration " + std::to_string(it));
        if (log) log << it << "," << std::setprecision(17) << res << "\n";
        next.time = un.time;
        next.source_budget = un.source_budget;
        cur = std::move(next);
        if (res < config.tol) {
            if (stats) *stats = {it, res, dtau};
            cur.time = un.time + dt;
            if (!r.source_per_dt.empty()) {
                cur.source_budget.resize(m, 0.0);
                for (int i = 0; i < n; ++i)
                    for (int v = 0; v < m; ++v) cur.source_budget[v] += r.source_per_dt[static_cast<size_t>(i) * m + v];
            }
            return cur;
        }
    }
    std::ostringstream os;
    os << "dual time stalled (residual=" << std::setprecision(6) << res << ")";
    throw Error(os.str());
}

}  // namespace af
