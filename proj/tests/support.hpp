#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "af/boundary.hpp"
#include "af/mesh.hpp"
#include "af/models.hpp"
#include "af/reconstruction.hpp"
#include "af/verification.hpp"

namespace test {

inline constexpr double kPi = std::numbers::pi;

// Seeded generator; each property test owns one so failures reproduce.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : eng_(seed) {}
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }

    // Admissible gas state from random primitives.
    af::Vec euler_state(const af::GasParams& gas) {
        af::Vec q(3);
        q << uniform(0.1, 5.0), uniform(-3.0, 3.0), uniform(0.1, 5.0);
        return af::prim_to_cons(q, gas);
    }
    af::Vec ns_state(const af::GasParams& gas) {
        af::Vec q(5);
        q << uniform(0.1, 5.0), uniform(-3.0, 3.0), uniform(0.1, 5.0), uniform(-0.5, 0.5), uniform(-0.5, 0.5);
        return af::prim_to_cons(q, gas);
    }

private:
    std::mt19937_64 eng_;
};

// Averages and face values of f on grid, via the library's Gauss averages.
inline af::FieldState sample_state(const af::Grid& grid, int m,
                                   const std::function<af::Vec(double)>& f) {
    af::FieldState s(grid.n_cells, m);
    for (int v = 0; v < m; ++v) {
        std::vector<double> a = af::cell_averages(grid, [&](double x) { return f(x)[v]; });
        for (int i = 0; i < grid.n_cells; ++i) s.avg(i, v) = a[i];
    }
    for (int j = 0; j <= grid.n_cells; ++j) s.set_face(j, f(grid.face_coords[j]));
    return s;
}

// Ghost DOFs that continue f past both ends.
inline af::GhostCells extended_ghosts(const af::Grid& grid, int m,
                                      const std::function<af::Vec(double)>& f) {
    af::Grid lg = af::build_grid(grid.x_min - grid.dx, grid.x_min, 1);
    af::Grid rg = af::build_grid(grid.x_max, grid.x_max + grid.dx, 1);
    af::GhostCells g;
    g.left_avg = af::Vec(m);
    g.right_avg = af::Vec(m);
    for (int v = 0; v < m; ++v) {
        g.left_avg[v] = af::cell_averages(lg, [&](double x) { return f(x)[v]; })[0];
        g.right_avg[v] = af::cell_averages(rg, [&](double x) { return f(x)[v]; })[0];
    }
    g.left_outer_face = f(grid.x_min - grid.dx);
    g.right_outer_face = f(grid.x_max + grid.dx);
    return g;
}

inline af::ModelDescriptor advection_model(double c) {
    af::ModelDescriptor m;
    m.name = "advection";
    m.n_vars = 1;
    m.var_names = {"u"};
    m.flux = [c](const af::Vec& u) { return af::Vec(c * u); };
    m.eigenvalues = [c](const af::Vec&) {
        af::Vec l(1);
        l << c;
        return l;
    };
    m.eigen = [c](const af::Vec&) {
        af::EigenSystem e;
        e.values = af::Vec::Constant(1, c);
        e.right = af::Mat::Identity(1, 1);
        e.left = af::Mat::Identity(1, 1);
        return e;
    };
    m.wave_speed = [c](const af::Vec&) { return std::abs(c); };
    return m;
}

// Constant-coefficient hyperbolic system A = R diag(lam) R^-1.
inline af::ModelDescriptor linear_system_model(const af::Mat& r, const af::Vec& lam) {
    af::ModelDescriptor m;
    const int n = static_cast<int>(lam.size());
    af::Mat l = r.inverse();
    af::Mat a = r * lam.asDiagonal() * l;
    m.name = "linear";
    m.n_vars = n;
    for (int v = 0; v < n; ++v) m.var_names.push_back("w" + std::to_string(v));
    m.flux = [a](const af::Vec& u) { return af::Vec(a * u); };
    m.eigenvalues = [lam](const af::Vec&) { return lam; };
    m.eigen = [lam, r, l](const af::Vec&) { return af::EigenSystem{lam, r, l}; };
    m.wave_speed = [lam](const af::Vec&) { return lam.cwiseAbs().maxCoeff(); };
    return m;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

}  // namespace test
