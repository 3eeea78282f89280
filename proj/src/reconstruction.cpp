#include "af/reconstruction.hpp"

#include <cmath>

namespace af {

CellParabola reconstruct_cell(double avg, double left, double right) {
    CellParabola p;
    p.coeff_quad = -3.0 * (2.0 * avg - left - right);
    p.coeff_lin = right - left;
    p.coeff_const = (6.0 * avg - left - right) / 4.0;
    return p;
}

Reconstruction::Reconstruction(const Grid& grid, const FieldState& state, const GhostCells& ghosts)
    : grid_(&grid), m_(state.n_vars), n_(state.n_cells) {
    coeffs_.resize(static_cast<size_t>(n_ + 2) * m_ * 3);
    auto store = [&](int cell, int v, double avg, double l, double r) {
        CellParabola p = reconstruct_cell(avg, l, r);
        size_t k = (static_cast<size_t>(cell + 1) * m_ + v) * 3;
        coeffs_[k] = p.coeff_quad;
        coeffs_[k + 1] = p.coeff_lin;
        coeffs_[k + 2] = p.coeff_const;
    };
    for (int v = 0; v < m_; ++v) {
        store(-1, v, ghosts.left_avg[v], ghosts.left_outer_face[v], state.face(0, v));
        store(n_, v, ghosts.right_avg[v], state.face(n_, v), ghosts.right_outer_face[v]);
    }
    for (int i = 0; i < n_; ++i)
        for (int v = 0; v < m_; ++v) store(i, v, state.avg(i, v), state.face(i, v), state.face(i + 1, v));
}

CellParabola Reconstruction::parabola(int cell, int var) const {
    size_t k = (static_cast<size_t>(cell + 1) * m_ + var) * 3;
    CellParabola p;
    p.coeff_quad = coeffs_[k];
    p.coeff_lin = coeffs_[k + 1];
    p.coeff_const = coeffs_[k + 2];
    p.cell_index = cell;
    return p;
}

void Reconstruction::eval_into(double x, double* out) const {
    const Grid& g = *grid_;
    double s = (x - g.x_min) / g.dx;
    double slack = 1e-9;
    if (!(s >= -1.0 - slack && s <= n_ + 1.0 + slack)) throw Error("foot outside stencil");
    int c = static_cast<int>(std::floor(s));
    if (c < -1) c = -1;
    if (c > n_) c = n_;
    double xi = s - (c + 0.5);
    const double* k = &coeffs_[static_cast<size_t>(c + 1) * m_ * 3];
    for (int v = 0; v < m_; ++v, k += 3) out[v] = (k[0] * xi + k[1]) * xi + k[2];
}

Vec Reconstruction::eval(double x) const {
    Vec u(m_);
    eval_into(x, u.data());
    return u;
}

double spacetime_cell_integral(double avg_n, double left_n, double left_half, double left_np1,
                               double right_n, double right_half, double right_np1, double dx,
                               double dt) {
    double sides = (left_np1 + right_np1) / 12.0 + (left_half + right_half) / 3.0 -
                   5.0 * (left_n + right_n) / 12.0;
    return dx * dt * (avg_n + sides);
}

}  // namespace af
