#pragma once

#include <vector>

#include "af/mesh.hpp"

namespace af {

// U(x) = coeff_quad * xi^2 + coeff_lin * xi + coeff_const, xi = (x - x_i) / dx.
struct CellParabola {
    double coeff_quad = 0.0;
    double coeff_lin = 0.0;
    double coeff_const = 0.0;
    int cell_index = 0;

    double eval(double xi) const { return (coeff_quad * xi + coeff_lin) * xi + coeff_const; }
};

CellParabola reconstruct_cell(double avg, double left, double right);

// One ghost cell on each side of the physical domain.
struct GhostCells {
    Vec left_avg, left_outer_face;
    Vec right_avg, right_outer_face;
};

// Frozen piecewise-parabolic field; cells -1 and N are the ghosts.
class Reconstruction {
public:
    Reconstruction(const Grid& grid, const FieldState& state, const GhostCells& ghosts);

    int n_vars() const { return m_; }
    const Grid& grid() const { return *grid_; }

    // Values at x; throws "foot outside stencil" beyond the one-cell ghost margin.
    Vec eval(double x) const;
    void eval_into(double x, double* out) const;
    CellParabola parabola(int cell, int var) const;

private:
    const Grid* grid_;
    int m_;
    int n_;
    // (n_ + 2) cells x m vars x {quad, lin, const}
    std::vector<double> coeffs_;
};

double spacetime_cell_integral(double avg_n, double left_n, double left_half, double left_np1,
                               double right_n, double right_half, double right_np1, double dx,
                               double dt);

}  // namespace af
