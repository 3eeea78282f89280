#pragma once

#include <functional>
#include <string>
#include <vector>

#include "af/boundary.hpp"
#include "af/mesh.hpp"
#include "af/models.hpp"
#include "af/splitting.hpp"
#include "af/update.hpp"
#include "af/verification.hpp"

namespace af {

enum class Problem { burgers, sod, diffusion, ns_manufactured, shu_osher };

Problem parse_problem(const std::string& name);
std::string problem_name(Problem p);

struct RunConfig {
    Problem problem = Problem::burgers;
    int n_cells = 21;
    double courant = 0.7;
    double t_end = 0.5;
    double dt = 0.0;  // fixed physical step (diffusion); 0 means CFL-driven
    int bdf_order = 3;
    double dual_courant = 0.9;
    double dual_tol = 1e-10;
    int dual_max_iters = 20000;
    double mu = 0.0;
    std::string output_dir;
    int snapshot_every = 0;
    Exec exec = Exec::serial;
};

RunConfig default_config(Problem p);

// Explicit AF step: faces at dt/2 and dt, Simpson fluxes, conservative update.
FieldState af_explicit_step(const FieldState& state, const Grid& grid,
                            const ModelDescriptor& model, const BoundarySpec& bc, double dt,
                            Exec exec = Exec::serial);

// Dirichlet data for the hyperbolic diffusion system: U at each end.
struct DiffusionBoundary {
    double u_left;
    double u_right;
};

struct DiffusionStepResult {
    FieldState state;
    DualTimeStats stats;
};

// One physical step of the relaxed diffusion system with dual time stepping.
// history[0] = U^n, history[1] = U^{n-1}, ...
DiffusionStepResult diffusion_dual_step(const std::vector<const FieldState*>& history,
                                        const Grid& grid, const DiffusionParams& params,
                                        const DiffusionBoundary& bnd, double dt,
                                        const BdfCoeffs& coeffs, const DualTimeConfig& cfg,
                                        Exec exec = Exec::serial);

// One viscous sub-step of the hyperbolic NS system (BDF1 in physical time, dual time
// inside); the external source is held at t_clock.
FieldState viscous_dual_step(const FieldState& state, const Grid& grid, const GasParams& gas,
                             const BoundarySpec& bc,
                             const std::function<Vec(double, double)>& external, double t_clock,
                             double dt, const DualTimeConfig& cfg, Exec exec = Exec::serial,
                             DualTimeStats* stats = nullptr);

// Cached high-order FD reference for the diffusion problem: point values on points + 1 nodes.
std::vector<double> diffusion_reference_nodes(double t_end, int points,
                                              const std::string& cache_path = {});

struct StepInfo {
    int step = 0;
    double dt = 0.0;
    int dual_iterations = 0;
    double dual_residual = 0.0;
};

using StepObserver =
    std::function<void(const FieldState& before, const FieldState& after, const StepInfo&)>;

struct RunResult {
    Grid grid;
    FieldState state;
    ModelDescriptor model;
    int steps = 0;
    int max_dual_iterations = 0;
    double max_dual_residual = 0.0;
    bool all_dual_converged = true;
};

Grid problem_grid(const RunConfig& cfg);
FieldState initial_state(const RunConfig& cfg, const Grid& grid);
ModelDescriptor problem_model(const RunConfig& cfg);
GasParams problem_gas(const RunConfig& cfg);

RunResult run_problem(const RunConfig& cfg, const StepObserver& observer = {});

// Per-cell reference values for the density / U component used in convergence studies.
std::vector<double> exact_reference(const RunConfig& cfg, const Grid& grid);

enum class ReferenceKind { exact, self, fd };
ReferenceKind parse_reference(const std::string& name);

// Grid sweep n = base_n * 2^k, k < levels, with the L2 error of variable 0 against the
// chosen reference. A self reference runs at ref_cells, which every level must divide.
ConvergenceReport run_convergence(const RunConfig& base, int levels, int base_n, ReferenceKind ref,
                                  int ref_cells = 2560);
void write_convergence_csv(const std::string& path, const ConvergenceReport& report);

}  // namespace af
