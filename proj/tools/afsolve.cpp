#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>

#include "af/models.hpp"
#include "af/solver.hpp"

namespace {

struct Overrides {
    std::string problem = "burgers";
    std::optional<int> cells;
    std::optional<double> courant;
    std::optional<double> t_end;
    std::optional<double> dt;
    std::optional<int> bdf_order;
    std::optional<double> dual_courant;
    std::optional<double> dual_tol;
    std::optional<int> dual_max_iters;
    std::optional<double> mu;
    std::string out;
    std::optional<int> snapshot_every;
    bool omp = false;
};

void add_run_options(CLI::App* app, Overrides& o) {
    app->add_option("--problem", o.problem, "burgers | sod | diffusion | ns_manufactured | shu_osher")
        ->check(CLI::IsMember({"burgers", "sod", "diffusion", "ns_manufactured", "shu_osher"}));
    app->add_option("--cells", o.cells, "number of cells")->check(CLI::PositiveNumber);
    app->add_option("--courant", o.courant, "Courant number")->check(CLI::PositiveNumber);
    app->add_option("--t-end", o.t_end, "final time")->check(CLI::PositiveNumber);
    app->add_option("--dt", o.dt, "fixed physical time step (diffusion)")->check(CLI::PositiveNumber);
    app->add_option("--bdf-order", o.bdf_order, "BDF order")->check(CLI::Range(1, 3));
    app->add_option("--dual-courant", o.dual_courant, "pseudo-time Courant number")->check(CLI::PositiveNumber);
    app->add_option("--dual-tol", o.dual_tol, "dual time tolerance")->check(CLI::PositiveNumber);
    app->add_option("--dual-max-iters", o.dual_max_iters, "dual time iteration cap")->check(CLI::PositiveNumber);
    app->add_option("--mu", o.mu, "dynamic viscosity (Navier-Stokes problems)")->check(CLI::NonNegativeNumber);
    app->add_option("--out", o.out, "output directory");
    app->add_option("--snapshot-every", o.snapshot_every, "snapshot interval in steps")->check(CLI::PositiveNumber);
    app->add_flag("--omp", o.omp, "use the OpenMP kernels");
}

af::RunConfig resolve(const Overrides& o) {
    af::RunConfig c = af::default_config(af::parse_problem(o.problem));
    if (o.cells) c.n_cells = *o.cells;
    if (o.courant) c.courant = *o.courant;
    if (o.t_end) c.t_end = *o.t_end;
    if (o.dt) c.dt = *o.dt;
    if (o.bdf_order) c.bdf_order = *o.bdf_order;
    if (o.dual_courant) c.dual_courant = *o.dual_courant;
    if (o.dual_tol) c.dual_tol = *o.dual_tol;
    if (o.dual_max_iters) c.dual_max_iters = *o.dual_max_iters;
    if (o.mu) c.mu = *o.mu;
    if (o.snapshot_every) c.snapshot_every = *o.snapshot_every;
    c.output_dir = o.out;
    c.exec = o.omp ? af::Exec::omp : af::Exec::serial;
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"One-dimensional Active Flux solver"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "configuration file; options go in [run] / [converge] / [sweep_roots] sections");

    Overrides run_opts;
    CLI::App* run = app.add_subcommand("run", "run one problem to t_end");
    add_run_options(run, run_opts);

    Overrides conv_opts;
    int levels = 7, base_n = 5, ref_cells = 2560;
    std::string reference = "exact";
    CLI::App* conv = app.add_subcommand("converge", "grid convergence study");
    add_run_options(conv, conv_opts);
    conv->add_option("--levels", levels, "number of grid levels")->check(CLI::Range(3, 16));
    conv->add_option("--base-n", base_n, "coarsest cell count")->check(CLI::PositiveNumber);
    conv->add_option("--reference", reference, "exact | self | fd")->check(CLI::IsMember({"exact", "self", "fd"}));
    conv->add_option("--ref-cells", ref_cells, "cells of the self reference")->check(CLI::PositiveNumber);

    int samples = 5;
    double stress_scale = 0.01;
    std::string roots_out;
    CLI::App* roots = app.add_subcommand("sweep_roots", "reality check of the characteristic polynomial roots");
    roots->add_option("--samples", samples, "samples per variable")->check(CLI::Range(2, 40));
    roots->add_option("--stress-scale", stress_scale, "mu_inf a_inf / L_inf relative to rho_inf a_inf^2")
        ->check(CLI::PositiveNumber);
    roots->add_option("--out", roots_out, "report file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            af::RunConfig cfg = resolve(run_opts);
            af::RunResult r = af::run_problem(cfg);
            std::cout << af::problem_name(cfg.problem) << ": n=" << cfg.n_cells << " steps=" << r.steps
                      << " t=" << std::setprecision(10) << r.state.time;
            if (r.max_dual_iterations > 0)
                std::cout << " max_dual_iterations=" << r.max_dual_iterations
                          << " max_dual_residual=" << std::setprecision(3) << r.max_dual_residual;
            std::cout << "\n";
        } else if (*conv) {
            af::RunConfig cfg = resolve(conv_opts);
            af::ConvergenceReport rep =
                af::run_convergence(cfg, levels, base_n, af::parse_reference(reference), ref_cells);
            const std::string dir = cfg.output_dir.empty() ? "." : cfg.output_dir;
            af::write_convergence_csv(dir + "/convergence.csv", rep);
            for (size_t k = 0; k < rep.errors.size(); ++k) {
                std::cout << "n=" << rep.grid_sizes[k] << " error=" << std::setprecision(6) << std::scientific
                          << rep.errors[k] << std::defaultfloat;
                if (k > 0) std::cout << " order=" << std::setprecision(3) << rep.pairwise_orders[k - 1];
                std::cout << "\n";
            }
            std::cout << "fitted order " << std::setprecision(4) << rep.fitted_order << "\n";
        } else if (*roots) {
            af::RootsReport rep = af::real_roots_sweep(af::default_root_ranges(), samples, 1.4, 1e-8, stress_scale);
            std::ostream* os = &std::cout;
            std::ofstream f;
            if (!roots_out.empty()) {
                f.open(roots_out);
                if (!f) throw af::Error("cannot write " + roots_out);
                os = &f;
            }
            *os << "cases," << rep.cases << "\nall_real," << (rep.all_real ? 1 : 0) << "\nmax_imag,"
                << std::setprecision(6) << rep.max_imag << "\nmax_relative_imag," << rep.max_rel_imag << "\n";
            if (os != &std::cout)
                std::cout << rep.cases << " cases, " << (rep.all_real ? "all real" : "complex roots found") << "\n";
            return rep.all_real ? 0 : 2;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
