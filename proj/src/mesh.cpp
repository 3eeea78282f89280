#include "af/mesh.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "af/models.hpp"

namespace af {

FieldState::FieldState(int n_cells_, int n_vars_)
    : n_vars(n_vars_),
      n_cells(n_cells_),
      cell_avgs(static_cast<size_t>(n_cells_) * n_vars_, 0.0),
      face_vals(static_cast<size_t>(n_cells_ + 1) * n_vars_, 0.0) {}

Vec FieldState::avg_vec(int i) const {
    Vec u(n_vars);
    for (int v = 0; v < n_vars; ++v) u[v] = avg(i, v);
    return u;
}

Vec FieldState::face_vec(int j) const {
    Vec u(n_vars);
    for (int v = 0; v < n_vars; ++v) u[v] = face(j, v);
    return u;
}

void FieldState::set_avg(int i, const Vec& u) {
    for (int v = 0; v < n_vars; ++v) avg(i, v) = u[v];
}

void FieldState::set_face(int j, const Vec& u) {
    for (int v = 0; v < n_vars; ++v) face(j, v) = u[v];
}

bool FieldState::all_finite() const {
    for (double a : cell_avgs)
        if (!std::isfinite(a)) return false;
    for (double a : face_vals)
        if (!std::isfinite(a)) return false;
    return true;
}

Grid build_grid(double x_min, double x_max, int n_cells) {
    if (n_cells < 1) throw Error("build_grid: cell count must be positive");
    if (!(x_max > x_min)) throw Error("build_grid: degenerate interval");
    Grid g;
    g.x_min = x_min;
    g.x_max = x_max;
    g.n_cells = n_cells;
    g.dx = (x_max - x_min) / n_cells;
    g.face_coords.resize(n_cells + 1);
    for (int j = 0; j <= n_cells; ++j) g.face_coords[j] = x_min + j * g.dx;
    g.face_coords[n_cells] = x_max;
    g.cell_centers.resize(n_cells);
    for (int i = 0; i < n_cells; ++i)
        g.cell_centers[i] = 0.5 * (g.face_coords[i] + g.face_coords[i + 1]);
    return g;
}

double max_wave_speed(const FieldState& state, const ModelDescriptor& model) {
    if (!state.all_finite()) throw Error("nonfinite state");
    double a_max = 0.0;
    for (int i = 0; i < state.n_cells; ++i) a_max = std::max(a_max, model.wave_speed(state.avg_vec(i)));
    for (int j = 0; j <= state.n_cells; ++j) a_max = std::max(a_max, model.wave_speed(state.face_vec(j)));
    return a_max;
}

double cfl_timestep(const FieldState& state, const ModelDescriptor& model, double courant,
                    const Grid& grid) {
    if (!(courant > 0.0 && courant < 1.0)) throw Error("cfl_timestep: courant number must lie in (0, 1)");
    double a_max = max_wave_speed(state, model);
    if (a_max <= 0.0) throw Error("no wave speed");
    return courant * grid.dx / a_max;
}

std::vector<double> total_content(const FieldState& state, const Grid& grid) {
    std::vector<double> sum(state.n_vars, 0.0);
    for (int i = 0; i < state.n_cells; ++i)
        for (int v = 0; v < state.n_vars; ++v) sum[v] += state.avg(i, v) * grid.dx;
    return sum;
}

namespace {

void write_table(const std::string& path, const std::vector<double>& x, const std::vector<double>& data,
                 int n_vars, const std::vector<std::string>& names) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << "x";
    for (int v = 0; v < n_vars; ++v)
        out << "," << (v < static_cast<int>(names.size()) ? names[v] : "u" + std::to_string(v));
    out << "\n" << std::setprecision(17);
    for (size_t i = 0; i < x.size(); ++i) {
        out << x[i];
        for (int v = 0; v < n_vars; ++v) out << "," << data[i * n_vars + v];
        out << "\n";
    }
}

std::vector<double> read_table(const std::string& path, int n_vars, size_t rows) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path);
    std::string line;
    std::getline(in, line);
    std::vector<double> data;
    data.reserve(rows * n_vars);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::getline(ss, cell, ',');
        for (int v = 0; v < n_vars; ++v) {
            std::getline(ss, cell, ',');
            data.push_back(std::stod(cell));
        }
    }
    if (data.size() != rows * n_vars) throw Error("snapshot size mismatch in " + path);
    return data;
}

}  // namespace

void write_snapshot(const std::string& dir, const Grid& grid, const FieldState& state,
                    const std::vector<std::string>& var_names) {
    std::filesystem::create_directories(dir);
    write_table(dir + "/cells.csv", grid.cell_centers, state.cell_avgs, state.n_vars, var_names);
    write_table(dir + "/faces.csv", grid.face_coords, state.face_vals, state.n_vars, var_names);
}

FieldState read_snapshot(const std::string& dir, const Grid& grid, int n_vars) {
    FieldState s(grid.n_cells, n_vars);
    s.cell_avgs = read_table(dir + "/cells.csv", n_vars, grid.n_cells);
    s.face_vals = read_table(dir + "/faces.csv", n_vars, grid.n_cells + 1);
    return s;
}

}  // namespace af
