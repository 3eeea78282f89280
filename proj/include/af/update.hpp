#pragma once

#include <functional>
#include <string>
#include <vector>

#include "af/mesh.hpp"
#include "af/models.hpp"

namespace af {

Vec simpson_flux(const Vec& f_n, const Vec& f_half, const Vec& f_np1, double dt);

// time_fluxes: (N+1) x m of the time-integrated flux; source_integrals: N x m or empty.
FieldState conservative_update(const FieldState& state, const std::vector<double>& time_fluxes,
                               const std::vector<double>& source_integrals, const Grid& grid,
                               double dt, Exec exec = Exec::serial);

// Space-time source integral over cell i: K applied to the space-time integral of the
// state plus the external source pushed through the same functional.
Vec linear_source_integral(const ModelDescriptor& model, int cell, const FieldState& state_n,
                           const std::vector<double>& faces_half,
                           const std::vector<double>& faces_np1, const Grid& grid, double t_n,
                           double dt);

struct BdfCoeffs {
    double alpha = 1.0;
    double beta = -1.0;
    double gamma = 0.0;
    double delta = 0.0;
    int order = 1;
};

BdfCoeffs bdf_coeffs(int order);

struct DualTimeConfig {
    double dual_courant = 0.9;
    double tol = 1e-10;
    int max_iters = 20000;
    // Relaxation components reach pseudo-steady state each physical step.
    bool relaxation_pseudo_steady = false;
    std::string residual_log;  // appended as "iteration,residual" when non-empty
};

struct DualTimeStats {
    int iterations = 0;
    double residual = 0.0;
    double dtau = 0.0;
};

// Returns dR*/dtau-style pieces for the current dual iterate.
struct DualResidual {
    std::vector<double> rstar;  // N x m, without the alpha term
    FieldState next_faces;      // faces advanced by one pseudo step
    double dtau = 0.0;
    std::vector<double> source_per_dt;  // N x m integrated source over one physical dt
};

using DualStepFn = std::function<DualResidual(const FieldState& current)>;

FieldState dual_time_march(const std::vector<const FieldState*>& history, double dt,
                           const DualStepFn& step_fn, const DualTimeConfig& config,
                           const BdfCoeffs& coeffs, const std::vector<int>& pseudo_steady_vars,
                           DualTimeStats* stats = nullptr);

}  // namespace af
