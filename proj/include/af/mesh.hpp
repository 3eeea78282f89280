#pragma once

#include <string>
#include <vector>

#include "af/types.hpp"

namespace af {

struct ModelDescriptor;

struct Grid {
    double x_min = 0.0;
    double x_max = 1.0;
    int n_cells = 1;
    double dx = 1.0;
    std::vector<double> cell_centers;
    std::vector<double> face_coords;
};

// Cell averages and the shared face point values, row-major per cell/face.
struct FieldState {
    int n_vars = 1;
    int n_cells = 0;
    double time = 0.0;
    std::vector<double> cell_avgs;
    std::vector<double> face_vals;
    // Running per-variable total of the integrated source, for budget checks.
    std::vector<double> source_budget;

    FieldState() = default;
    FieldState(int n_cells_, int n_vars_);

    double& avg(int i, int v) { return cell_avgs[static_cast<size_t>(i) * n_vars + v]; }
    double avg(int i, int v) const { return cell_avgs[static_cast<size_t>(i) * n_vars + v]; }
    double& face(int j, int v) { return face_vals[static_cast<size_t>(j) * n_vars + v]; }
    double face(int j, int v) const { return face_vals[static_cast<size_t>(j) * n_vars + v]; }

    Vec avg_vec(int i) const;
    Vec face_vec(int j) const;
    void set_avg(int i, const Vec& u);
    void set_face(int j, const Vec& u);
    bool all_finite() const;
};

Grid build_grid(double x_min, double x_max, int n_cells);

// Largest spectral radius over every cell average and face value.
double max_wave_speed(const FieldState& state, const ModelDescriptor& model);

double cfl_timestep(const FieldState& state, const ModelDescriptor& model, double courant,
                    const Grid& grid);

// Per-variable sum of cell averages times dx.
std::vector<double> total_content(const FieldState& state, const Grid& grid);

void write_snapshot(const std::string& dir, const Grid& grid, const FieldState& state,
                    const std::vector<std::string>& var_names);
FieldState read_snapshot(const std::string& dir, const Grid& grid, int n_vars);

}  // namespace af
