#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "af/mesh.hpp"
#include "af/models.hpp"

namespace af {

struct PrimState {
    double rho;
    double u;
    double p;
};

struct StarState {
    double p_star;
    double u_star;
};

StarState sod_star_state(const PrimState& left, const PrimState& right, double gamma);
PrimState exact_sod(double x, double t, const PrimState& left, const PrimState& right,
                    double gamma);

PrimState manufactured_fields(double x, double t);
// Viscous stress and heat flux of the manufactured fields.
std::array<double, 2> manufactured_stress_heat(double x, double t, const GasParams& gas);
// Time derivative of the manufactured heat flux.
double manufactured_heat_rate(double x, double t, const GasParams& gas);
std::array<double, 3> manufactured_sources(double x, double t, const GasParams& gas);
std::array<double, 3> manufactured_sources_printed(double x, double t, const GasParams& gas);

PrimState shu_osher_init(double x);

struct FdDiffusionSetup {
    double x_min, x_max;
    double nu;
    std::function<double(double)> source;
    std::function<double(double)> initial;
    double left_value, right_value;
};

FdDiffusionSetup standard_diffusion_setup();

// Point values at grid_points + 1 uniformly spaced nodes including the ends.
std::vector<double> fd_diffusion_reference(int grid_points, const FdDiffusionSetup& setup,
                                           double t_end, double dt = 0.0);
// The same spatial operator solved directly for its steady state.
std::vector<double> fd_diffusion_steady(int grid_points, const FdDiffusionSetup& setup);

// Cell averages of point data on a fine uniform node set (composite Simpson).
std::vector<double> average_nodes_to_cells(const std::vector<double>& nodes, int n_cells);
// Average a fine cell-average field down to n_cells coarse cells.
std::vector<double> restrict_averages(const std::vector<double>& fine, int n_cells);
// Cell averages of f over each cell of grid (Gauss-Legendre, 5 points).
std::vector<double> cell_averages(const Grid& grid, const std::function<double(double)>& f);

double l2_error(const FieldState& solution, int var, const std::vector<double>& reference,
                const Grid& grid);
double l2_error(const std::vector<double>& a, const std::vector<double>& b, double dx);

struct ConvergenceReport {
    std::vector<int> grid_sizes;
    std::vector<double> errors;
    std::vector<double> pairwise_orders;
    double fitted_order = 0.0;
};

ConvergenceReport convergence_order(const std::vector<double>& errors,
                                    const std::vector<int>& grid_sizes);

void write_reference(const std::string& path, const std::string& provenance,
                     const std::vector<double>& x, const std::vector<double>& values);
// Returns false when the file is missing or its provenance line differs.
bool read_reference(const std::string& path, const std::string& provenance,
                    std::vector<double>& values);

}  // namespace af
