#include "af/solver.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <iomanip>
#include <memory>
#include <numbers>
#include <sstream>

#include "af/evolution.hpp"
#include "af/reconstruction.hpp"
#include "af/verification.hpp"

namespace af {

Problem parse_problem(const std::string& name) {
    if (name == "burgers") return Problem::burgers;
    if (name == "sod") return Problem::sod;
    if (name == "diffusion") return Problem::diffusion;
    if (name == "ns_manufactured") return Problem::ns_manufactured;
    if (name == "shu_osher") return Problem::shu_osher;
    throw Error("unknown problem '" + name + "'");
}

std::string problem_name(Problem p) {
    switch (p) {
        case Problem::burgers: return "burgers";
        case Problem::sod: return "sod";
        case Problem::diffusion: return "diffusion";
        case Problem::ns_manufactured: return "ns_manufactured";
        case Problem::shu_osher: return "shu_osher";
    }
    return "unknown";
}

RunConfig default_config(Problem p) {
    RunConfig c;
    c.problem = p;
    switch (p) {
        case Problem::burgers:
            c.n_cells = 21;
            c.courant = 0.7;
            c.t_end = 2.0;
            break;
        case Problem::sod:
            c.n_cells = 80;
            c.courant = 0.7;
            c.t_end = 0.4;
            break;
        case Problem::diffusion:
            c.n_cells = 25;
            c.t_end = 20.0;
            c.dt = 0.1;
            c.bdf_order = 3;
            c.dual_courant = 0.9;
            c.dual_tol = 1e-10;
            break;
        case Problem::ns_manufactured:
            c.n_cells = 20;
            c.courant = 0.7;
            c.t_end = 0.8;
            c.mu = 0.01;
            c.dual_courant = 0.9;
            c.dual_tol = 1e-10;
            break;
        case Problem::shu_osher:
            c.n_cells = 100;
            c.courant = 0.5;
            c.t_end = 1.8;
            c.mu = 0.0;
            break;
    }
    return c;
}

namespace {

std::vector<double> flux_integrals(const FieldState& state, const FaceEvolution& fe,
                                   const ModelDescriptor& model, double dt, Exec exec) {
    const int nf = state.n_cells + 1, m = state.n_vars;
    std::vector<double> out(static_cast<size_t>(nf) * m);
    auto one = [&](int j) {
        Vec h(m), f(m);
        for (int v = 0; v < m; ++v) {
            h[v] = fe.half[static_cast<size_t>(j) * m + v];
            f[v] = fe.full[static_cast<size_t>(j) * m + v];
        }
        Vec r = simpson_flux(model.flux(state.face_vec(j)), model.flux(h), model.flux(f), dt);
        for (int v = 0; v < m; ++v) out[static_cast<size_t>(j) * m + v] = r[v];
    };
    if (exec == Exec::omp) {
        std::string err;
#pragma omp parallel for schedule(static)
        for (int j = 0; j < nf; ++j) {
            try {
                one(j);
            } catch (const Error& e) {
#pragma omp critical
                err = "face " + std::to_string(j) + ": " + e.what();
            }
        }
        if (!err.empty()) throw Error(err);
    } else {
        for (int j = 0; j < nf; ++j) {
            try {
                one(j);
            } catch (const Error& e) {
                throw Error("face " + std::to_string(j) + ": " + e.what());
            }
        }
    }
    return out;
}

std::vector<double> source_integrals(const ModelDescriptor& model, const FieldState& state,
                                     const FaceEvolution& fe, const Grid& grid, double t_n,
                                     double dt) {
    if (!model.has_source) return {};
    const int n = state.n_cells, m = state.n_vars;
    std::vector<double> out(static_cast<size_t>(n) * m);
    for (int i = 0; i < n; ++i) {
        Vec s = linear_source_integral(model, i, state, fe.half, fe.full, grid, t_n, dt);
        for (int v = 0; v < m; ++v) out[static_cast<size_t>(i) * m + v] = s[v];
    }
    return out;
}

void set_face(std::vector<double>& arr, int j, const Vec& u) {
    for (int v = 0; v < u.size(); ++v) arr[static_cast<size_t>(j) * u.size() + v] = u[v];
}

bool is_gas_system(const ModelDescriptor& model) { return model.n_vars >= 3; }

}  // namespace

FieldState af_explicit_step(const FieldState& state, const Grid& grid,
                            const ModelDescriptor& model, const BoundarySpec& bc, double dt,
                            Exec exec) {
    GhostCells ghosts = fill_ghosts(state, bc);
    Reconstruction recon(grid, state, ghosts);
    FaceEvolution fe = evolve_faces(recon, model, dt, state.time, exec);
    if (is_gas_system(model)) {
        // Characteristic treatment at non-periodic ends, ghost state from the ghost cell.
        if (bc.left.kind != GhostKind::periodic) {
            BoundaryFace b = euler_characteristic_bc(Side::left, recon, model, ghosts.left_avg, dt);
            set_face(fe.half, 0, b.half);
            set_face(fe.full, 0, b.full);
        }
        if (bc.right.kind != GhostKind::periodic) {
            BoundaryFace b = euler_characteristic_bc(Side::right, recon, model, ghosts.right_avg, dt);
            set_face(fe.half, state.n_cells, b.half);
            set_face(fe.full, state.n_cells, b.full);
        }
    }
    std::vector<double> fluxes = flux_integrals(state, fe, model, dt, exec);
    std::vector<double> src = source_integrals(model, state, fe, grid, state.time, dt);
    FieldState out = conservative_update(state, fluxes, src, grid, dt, exec);
    out.face_vals = fe.full;
    return out;
}

namespace {

// Pseudo-time problem for one physical step: the BDF terms enter both the cell residual
// and, as an extra linear source, the face evolution.
struct DualProblem {
    const Grid* grid = nullptr;
    ModelDescriptor base;      // physical model, external source frozen at the new time level
    ModelDescriptor derived;   // base plus -M (alpha U + history) / dt
    std::vector<double> mask;  // 1 for physical-time components
    std::function<GhostCells(const FieldState&)> ghosts;
    // Optional override of the two boundary faces.
    std::function<void(const FieldState&, const Reconstruction&, double, FaceEvolution&)> boundary;
    double dt = 0.0;
    double alpha = 1.0;
    double courant = 0.9;
    Exec exec = Exec::serial;
};

DualProblem make_dual_problem(const Grid& grid, const ModelDescriptor& model,
                              const std::vector<const FieldState*>& history, const BdfCoeffs& coeffs,
                              double dt, double t_ext, const std::vector<int>& pseudo_steady,
                              std::function<GhostCells(const FieldState&)> ghosts, double courant,
                              Exec exec) {
    const int m = model.n_vars;
    DualProblem p;
    p.grid = &grid;
    p.dt = dt;
    p.alpha = coeffs.alpha;
    p.courant = courant;
    p.exec = exec;
    p.ghosts = ghosts;
    p.mask.assign(m, 1.0);
    for (int v : pseudo_steady) p.mask[v] = 0.0;

    p.base = model;
    if (model.external) {
        auto ext = model.external;
        p.base.external = [ext, t_ext](double x, double) { return ext(x, t_ext); };
    }

    struct Hist {
        std::vector<std::unique_ptr<Reconstruction>> recon;
        std::vector<double> weight;
    };
    auto hist = std::make_shared<Hist>();
    const double w[3] = {coeffs.beta, coeffs.gamma, coeffs.delta};
    for (int h = 0; h < coeffs.order; ++h) {
        hist->recon.push_back(std::make_unique<Reconstruction>(grid, *history[h], ghosts(*history[h])));
        hist->weight.push_back(w[h] / dt);
    }
    Vec mvec(m);
    for (int v = 0; v < m; ++v) mvec[v] = p.mask[v];

    p.derived = p.base;
    p.derived.has_source = true;
    Mat k = model.source_matrix.size() > 0 ? model.source_matrix : Mat::Zero(m, m);
    for (int v = 0; v < m; ++v) k(v, v) -= p.mask[v] * coeffs.alpha / dt;
    p.derived.source_matrix = k;
    auto base_ext = p.base.external;
    p.derived.external = [hist, mvec, base_ext, m](double x, double t) {
        Vec s = base_ext ? base_ext(x, t) : Vec::Zero(m);
        Vec acc = Vec::Zero(m);
        for (size_t h = 0; h < hist->recon.size(); ++h) acc += hist->weight[h] * hist->recon[h]->eval(x);
        return Vec(s - mvec.cwiseProduct(acc));
    };
    return p;
}

DualResidual dual_residual(const DualProblem& p, const FieldState& cur) {
    const Grid& grid = *p.grid;
    const int n = cur.n_cells, m = cur.n_vars;

    double a_max = max_wave_speed(cur, p.base);
    double dtau = a_max > 0.0 ? grid.dx / a_max : std::numeric_limits<double>::infinity();
    bool physical = false;
    for (double mv : p.mask) physical = physical || mv > 0.0;
    if (physical) dtau = std::min(dtau, p.dt / p.alpha);
    if (p.base.source_matrix.size() > 0)
        for (int v = 0; v < m; ++v)
            if (p.base.source_matrix(v, v) < 0.0) dtau = std::min(dtau, -1.0 / p.base.source_matrix(v, v));
    if (!std::isfinite(dtau)) throw Error("dual time: no pseudo-time scale");
    dtau *= p.courant;

    GhostCells ghosts = p.ghosts(cur);
    Reconstruction recon(grid, cur, ghosts);
    FaceEvolution fe = evolve_faces(recon, p.derived, dtau, cur.time, p.exec);
    if (p.boundary) p.boundary(cur, recon, dtau, fe);

    std::vector<double> fluxes = flux_integrals(cur, fe, p.base, dtau, p.exec);
    std::vector<double> src = source_integrals(p.base, cur, fe, grid, cur.time, dtau);

    DualResidual r;
    r.dtau = dtau;
    r.rstar.assign(static_cast<size_t>(n) * m, 0.0);
    if (!src.empty()) r.source_per_dt.assign(static_cast<size_t>(n) * m, 0.0);
    const double scale = 1.0 / (grid.dx * dtau);
    for (int i = 0; i < n; ++i)
        for (int v = 0; v < m; ++v) {
            size_t c = static_cast<size_t>(i) * m + v;
            double s = src.empty() ? 0.0 : src[c];
            r.rstar[c] = (-(fluxes[c + m] - fluxes[c]) + s) * scale;
            if (!src.empty()) r.source_per_dt[c] = s * p.dt / dtau;
        }
    r.next_faces = cur;
    r.next_faces.face_vals = fe.full;
    return r;
}

}  // namespace

DiffusionStepResult diffusion_dual_step(const std::vector<const FieldState*>& history,
                                        const Grid& grid, const DiffusionParams& params,
                                        const DiffusionBoundary& bnd, double dt,
                                        const BdfCoeffs& coeffs, const DualTimeConfig& cfg,
                                        Exec exec) {
    const ModelDescriptor model = diffusion_model(params);
    const int n = grid.n_cells;
    // The ghost P is the current boundary-face P, so at dual convergence the face U
    // equals the Dirichlet value.
    auto ghosts = [bnd, n](const FieldState& s) {
        BoundarySpec bc;
        bc.left.kind = bc.right.kind = GhostKind::dirichlet;
        bc.left.dirichlet_state = Vec(2);
        bc.left.dirichlet_state << bnd.u_left, s.face(0, 1);
        bc.right.dirichlet_state = Vec(2);
        bc.right.dirichlet_state << bnd.u_right, s.face(n, 1);
        return fill_ghosts(s, bc);
    };
    std::vector<int> steady;
    if (cfg.relaxation_pseudo_steady) steady = model.relaxation_vars;
    DualProblem p = make_dual_problem(grid, model, history, coeffs, dt, history[0]->time + dt, steady, ghosts,
                                      cfg.dual_courant, exec);
    const ModelDescriptor* derived = &p.derived;
    p.boundary = [derived, &params, bnd, n](const FieldState& cur, const Reconstruction& recon, double dtau,
                                            FaceEvolution& fe) {
        BoundaryFace l = diffusion_boundary_faces(Side::left, dtau, recon, params, *derived, bnd.u_left,
                                                  cur.face(0, 1), cur.time);
        BoundaryFace r = diffusion_boundary_faces(Side::right, dtau, recon, params, *derived, bnd.u_right,
                                                  cur.face(n, 1), cur.time);
        set_face(fe.half, 0, l.half);
        set_face(fe.full, 0, l.full);
        set_face(fe.half, n, r.half);
        set_face(fe.full, n, r.full);
    };
    DiffusionStepResult res;
    res.state = dual_time_march(history, dt, [&p](const FieldState& s) { return dual_residual(p, s); }, cfg,
                                coeffs, steady, &res.stats);
    return res;
}

FieldState viscous_dual_step(const FieldState& state, const Grid& grid, const GasParams& gas,
                             const BoundarySpec& bc,
                             const std::function<Vec(double, double)>& external, double t_clock,
                             double dt, const DualTimeConfig& cfg, Exec exec, DualTimeStats* stats) {
    const ModelDescriptor model = ns_viscous_model(gas, external);
    std::vector<int> steady;
    if (cfg.relaxation_pseudo_steady) steady = model.relaxation_vars;
    auto ghosts = [bc](const FieldState& s) { return fill_ghosts(s, bc); };
    std::vector<const FieldState*> history{&state};
    BdfCoeffs c1 = bdf_coeffs(1);
    DualProblem p = make_dual_problem(grid, model, history, c1, dt, t_clock, steady, ghosts, cfg.dual_courant, exec);
    if (bc.left.kind == GhostKind::dirichlet || bc.right.kind == GhostKind::dirichlet) {
        const ModelDescriptor* derived = &p.derived;
        p.boundary = [derived, gas, bc](const FieldState& cur, const Reconstruction& recon, double dtau,
                                        FaceEvolution& fe) {
            const int n = cur.n_cells;
            auto apply = [&](Side side, const GhostSpec& g, int j) {
                if (g.kind != GhostKind::dirichlet) return;
                Vec prim = cons_to_prim(g.dirichlet_state, gas);
                for (int pass = 0; pass < 2; ++pass) {
                    double h = pass == 0 ? 0.5 * dtau : dtau;
                    ViscousFaceValues f =
                        ns_viscous_boundary(side, recon, *derived, gas, prim, cur.face(j, 0), h, cur.time);
                    Vec q(5);
                    q << cur.face(j, 0), f.u, f.p, f.tau, f.q;
                    set_face(pass == 0 ? fe.half : fe.full, j, prim_to_cons(q, gas));
                }
            };
            apply(Side::left, bc.left, 0);
            apply(Side::right, bc.right, n);
        };
    }
    return dual_time_march(history, dt, [&p](const FieldState& s) { return dual_residual(p, s); }, cfg, c1,
                           steady, stats);
}

std::vector<double> diffusion_reference_nodes(double t_end, int points, const std::string& cache_path) {
    std::ostringstream prov;
    prov << "fd4 rk3 diffusion reference, points=" << points << ", t=" << std::setprecision(17) << t_end;
    static std::mutex memo_mutex;
    static std::map<std::pair<double, int>, std::vector<double>> memo;
    {
        std::lock_guard<std::mutex> lock(memo_mutex);
        auto it = memo.find({t_end, points});
        if (it != memo.end()) return it->second;
    }
    std::vector<double> values;
    if (!cache_path.empty() && read_reference(cache_path, prov.str(), values) &&
        values.size() == static_cast<size_t>(points + 1))
        return values;
    FdDiffusionSetup setup = standard_diffusion_setup();
    values = fd_diffusion_reference(points, setup, t_end);
    if (!cache_path.empty()) {
        std::vector<double> x(points + 1);
        for (int i = 0; i <= points; ++i) x[i] = setup.x_min + i * (setup.x_max - setup.x_min) / points;
        write_reference(cache_path, prov.str(), x, values);
    }
    std::lock_guard<std::mutex> lock(memo_mutex);
    memo[{t_end, points}] = values;
    return values;
}

namespace {

constexpr double kPi = std::numbers::pi;

DiffusionParams standard_diffusion_params() {
    const double nu = 0.01;
    const double length = 1.0 / (2.0 * kPi);
    return make_diffusion_params(nu, length * length / nu, [](double x) { return 0.1 * std::exp(0.05 * x); });
}

// Cell averages of a vector-valued function with optional discontinuity locations.
std::vector<double> averages_with_breaks(const Grid& grid, int m, const std::function<Vec(double)>& f,
                                         std::vector<double> breaks) {
    static const double xg[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                 0.9061798459386640};
    static const double wg[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                 0.4786286704993665, 0.2369268850561891};
    std::sort(breaks.begin(), breaks.end());
    std::vector<double> out(static_cast<size_t>(grid.n_cells) * m, 0.0);
    for (int i = 0; i < grid.n_cells; ++i) {
        std::vector<double> pts{grid.face_coords[i]};
        for (double b : breaks)
            if (b > grid.face_coords[i] && b < grid.face_coords[i + 1]) pts.push_back(b);
        pts.push_back(grid.face_coords[i + 1]);
        Vec acc = Vec::Zero(m);
        for (size_t s = 0; s + 1 < pts.size(); ++s) {
            const double a = pts[s], b = pts[s + 1];
            const double c = 0.5 * (a + b), h = 0.5 * (b - a);
            // Sub-interval endpoints of a jump belong to the side they bound.
            for (int q = 0; q < 5; ++q) acc += wg[q] * h * f(c + h * xg[q]);
        }
        for (int v = 0; v < m; ++v) out[static_cast<size_t>(i) * m + v] = acc[v] / grid.dx;
    }
    return out;
}

std::function<Vec(double, double)> manufactured_external(const GasParams& gas) {
    return [gas](double x, double t) {
        auto s = manufactured_sources(x, t, gas);
        Vec e(5);
        e << s[0], s[1], s[2], 0.0, manufactured_heat_rate(x, t, gas);
        return e;
    };
}

Vec manufactured_state(double x, double t, const GasParams& gas) {
    PrimState p = manufactured_fields(x, t);
    auto th = manufactured_stress_heat(x, t, gas);
    Vec q(5);
    q << p.rho, p.u, p.p, th[0], th[1];
    return prim_to_cons(q, gas);
}

const PrimState kSodLeft{1.0, 0.0, 1.0};
const PrimState kSodRight{0.125, 0.0, 0.1};

std::vector<double> sod_breaks(double t, double gamma) {
    if (t <= 0.0) return {0.0};
    StarState s = sod_star_state(kSodLeft, kSodRight, gamma);
    const double al = std::sqrt(gamma * kSodLeft.p / kSodLeft.rho);
    const double ar = std::sqrt(gamma * kSodRight.p / kSodRight.rho);
    const double as = al * std::pow(s.p_star / kSodLeft.p, (gamma - 1.0) / (2.0 * gamma));
    const double shock = ar * std::sqrt((gamma + 1.0) / (2.0 * gamma) * s.p_star / kSodRight.p +
                                        (gamma - 1.0) / (2.0 * gamma));
    return {-al * t, (s.u_star - as) * t, s.u_star * t, shock * t};
}

}  // namespace

Grid problem_grid(const RunConfig& cfg) {
    switch (cfg.problem) {
        case Problem::burgers: return build_grid(0.0, 1.0, cfg.n_cells);
        case Problem::sod: return build_grid(-1.0, 1.0, cfg.n_cells);
        case Problem::diffusion: return build_grid(-1.5 * kPi, 1.5 * kPi, cfg.n_cells);
        case Problem::ns_manufactured: return build_grid(-kPi, kPi, cfg.n_cells);
        case Problem::shu_osher: return build_grid(-5.0, 5.0, cfg.n_cells);
    }
    throw Error("unknown problem");
}

GasParams problem_gas(const RunConfig& cfg) { return make_gas_params(cfg.mu); }

ModelDescriptor problem_model(const RunConfig& cfg) {
    switch (cfg.problem) {
        case Problem::burgers: return burgers_model();
        case Problem::sod: return euler_model(problem_gas(cfg));
        case Problem::diffusion: return diffusion_model(standard_diffusion_params());
        case Problem::ns_manufactured:
        case Problem::shu_osher: return ns_inviscid_model(problem_gas(cfg));
    }
    throw Error("unknown problem");
}

FieldState initial_state(const RunConfig& cfg, const Grid& grid) {
    const GasParams gas = problem_gas(cfg);
    std::function<Vec(double)> f;
    std::vector<double> breaks;
    int m = 1;
    switch (cfg.problem) {
        case Problem::burgers:
            m = 1;
            f = [](double x) {
                Vec u(1);
                u << std::sin(2.0 * kPi * x) / (2.0 * kPi);
                return u;
            };
            break;
        case Problem::sod:
            m = 3;
            breaks = {0.0};
            f = [gas](double x) {
                const PrimState& s = x <= 0.0 ? kSodLeft : kSodRight;
                Vec q(3);
                q << s.rho, s.u, s.p;
                return prim_to_cons(q, gas);
            };
            break;
        case Problem::diffusion: {
            m = 2;
            const double nu = standard_diffusion_params().nu;
            f = [nu](double x) {
                Vec u(2);
                u << std::cos(x), -nu * std::sin(x);
                return u;
            };
            break;
        }
        case Problem::ns_manufactured:
            m = 5;
            f = [gas](double x) { return manufactured_state(x, 0.0, gas); };
            break;
        case Problem::shu_osher:
            m = 5;
            breaks = {-4.0};
            f = [gas](double x) {
                PrimState s = shu_osher_init(x);
                Vec q(5);
                q << s.rho, s.u, s.p, 0.0, 0.0;
                return prim_to_cons(q, gas);
            };
            break;
    }
    FieldState st(grid.n_cells, m);
    st.cell_avgs = averages_with_breaks(grid, m, f, breaks);
    // A face sitting on a jump takes the right-hand state, the low-pressure side for both
    // shock tubes, so the parabolas next to the jump stay admissible.
    for (int j = 0; j <= grid.n_cells; ++j) {
        const double x = grid.face_coords[j];
        Vec u = f(x);
        for (double b : breaks)
            if (std::abs(x - b) < 1e-9 * grid.dx) u = f(b + 1e-6 * grid.dx);
        st.set_face(j, u);
    }
    st.time = 0.0;
    return st;
}

std::vector<double> exact_reference(const RunConfig& cfg, const Grid& grid) {
    switch (cfg.problem) {
        case Problem::sod: {
            const double g = problem_gas(cfg).gamma;
            const double t = cfg.t_end;
            auto f = [&](double x) {
                Vec r(1);
                r << exact_sod(x, t, kSodLeft, kSodRight, g).rho;
                return r;
            };
            return averages_with_breaks(grid, 1, f, sod_breaks(t, g));
        }
        case Problem::ns_manufactured:
            return cell_averages(grid, [&](double x) { return manufactured_fields(x, cfg.t_end).rho; });
        case Problem::diffusion: {
            const int points = 2560;
            std::vector<double> nodes = diffusion_reference_nodes(cfg.t_end, points);
            return average_nodes_to_cells(nodes, grid.n_cells);
        }
        default:
            throw Error("no exact reference for " + problem_name(cfg.problem) + "; use a self reference");
    }
}

RunResult run_problem(const RunConfig& cfg, const StepObserver& observer) {
    if (cfg.n_cells < 1) throw Error("cell count must be positive");
    if (!(cfg.t_end > 0.0)) throw Error("t_end must be positive");
    RunResult res;
    res.grid = problem_grid(cfg);
    const Grid& grid = res.grid;
    res.model = problem_model(cfg);
    FieldState state = initial_state(cfg, grid);
    const GasParams gas = problem_gas(cfg);

    auto snapshot = [&](const FieldState& s, int step, bool final) {
        if (cfg.output_dir.empty()) return;
        if (final) {
            write_snapshot(cfg.output_dir, grid, s, res.model.var_names);
        } else if (cfg.snapshot_every > 0 && step % cfg.snapshot_every == 0) {
            std::ostringstream d;
            d << cfg.output_dir << "/step_" << std::setw(6) << std::setfill('0') << step;
            write_snapshot(d.str(), grid, s, res.model.var_names);
        }
    };
    snapshot(state, 0, false);

    DualTimeConfig dual;
    dual.dual_courant = cfg.dual_courant;
    dual.tol = cfg.dual_tol;
    dual.max_iters = cfg.dual_max_iters;

    NsProblem ns;
    ns.grid = &grid;
    ns.gas = gas;
    ns.dual = dual;
    ns.exec = cfg.exec;
    if (cfg.problem == Problem::ns_manufactured) {
        ns.bc = periodic_bc();
        ns.external = manufactured_external(gas);
    } else {
        ns.bc = transmissive_bc();
    }

    std::vector<FieldState> history;  // most recent first (diffusion only)
    const FdDiffusionSetup dsetup = standard_diffusion_setup();
    const DiffusionParams dparams = standard_diffusion_params();

    int step = 0;
    const double eps = 1e-12 * cfg.t_end;
    while (state.time < cfg.t_end - eps) {
        StepInfo info;
        info.step = step + 1;
        FieldState next;
        try {
            if (cfg.problem == Problem::diffusion) {
                if (!(cfg.dt > 0.0)) throw Error("diffusion runs need a fixed dt");
                double dt = std::min(cfg.dt, cfg.t_end - state.time);
                info.dt = dt;
                history.insert(history.begin(), state);
                if (history.size() > 3) history.pop_back();
                const int order = std::min<int>(cfg.bdf_order, static_cast<int>(history.size()));
                std::vector<const FieldState*> hp;
                for (auto& h : history) hp.push_back(&h);
                dual.relaxation_pseudo_steady = true;
                DiffusionStepResult r = diffusion_dual_step(hp, grid, dparams,
                                                            {dsetup.left_value, dsetup.right_value}, dt,
                                                            bdf_coeffs(order), dual, cfg.exec);
                next = std::move(r.state);
                info.dual_iterations = r.stats.iterations;
                info.dual_residual = r.stats.residual;
            } else {
                double dt = cfl_timestep(state, res.model, cfg.courant, grid);
                dt = std::min(dt, cfg.t_end - state.time);
                info.dt = dt;
                if (cfg.problem == Problem::burgers || cfg.problem == Problem::sod) {
                    BoundarySpec bc = cfg.problem == Problem::burgers ? periodic_bc() : transmissive_bc();
                    next = af_explicit_step(state, grid, res.model, bc, dt, cfg.exec);
                } else {
                    NsStepStats st;
                    next = ns_time_step(state, dt, ns, {}, &st);
                    info.dual_iterations = st.dual_iterations;
                    info.dual_residual = st.max_residual;
                }
            }
            if (!next.all_finite()) throw Error("nonfinite state");
        } catch (const Error& e) {
            std::ostringstream os;
            os << "step " << step + 1 << ", t=" << std::setprecision(10) << state.time << ": " << e.what();
            throw Error(os.str());
        }
        ++step;
        res.max_dual_iterations = std::max(res.max_dual_iterations, info.dual_iterations);
        res.max_dual_residual = std::max(res.max_dual_residual, info.dual_residual);
        if (observer) observer(state, next, info);
        state = std::move(next);
        snapshot(state, step, false);
    }
    res.steps = step;
    res.state = state;
    snapshot(state, step, true);
    return res;
}

ReferenceKind parse_reference(const std::string& name) {
    if (name == "exact") return ReferenceKind::exact;
    if (name == "self") return ReferenceKind::self;
    if (name == "fd") return ReferenceKind::fd;
    throw Error("unknown reference '" + name + "'");
}

namespace {

std::vector<double> column(const FieldState& s, int var) {
    std::vector<double> out(s.n_cells);
    for (int i = 0; i < s.n_cells; ++i) out[i] = s.avg(i, var);
    return out;
}

}  // namespace

ConvergenceReport run_convergence(const RunConfig& base, int levels, int base_n, ReferenceKind ref,
                                  int ref_cells) {
    if (levels < 3) throw Error("convergence study needs at least three levels");
    if (base_n < 1) throw Error("base cell count must be positive");
    if (ref == ReferenceKind::fd && base.problem != Problem::diffusion)
        throw Error("fd reference is only available for diffusion");
    std::vector<double> fine;
    if (ref == ReferenceKind::self) {
        RunConfig rc = base;
        rc.n_cells = ref_cells;
        rc.output_dir.clear();
        fine = column(run_problem(rc).state, 0);
    }
    std::vector<int> sizes;
    std::vector<double> errors;
    for (int k = 0; k < levels; ++k) {
        RunConfig rc = base;
        rc.n_cells = base_n << k;
        rc.output_dir.clear();
        RunResult r = run_problem(rc);
        std::vector<double> reference =
            ref == ReferenceKind::self ? restrict_averages(fine, rc.n_cells) : exact_reference(rc, r.grid);
        sizes.push_back(rc.n_cells);
        errors.push_back(l2_error(r.state, 0, reference, r.grid));
    }
    return convergence_order(errors, sizes);
}

void write_convergence_csv(const std::string& path, const ConvergenceReport& report) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream f(path);
    if (!f) throw Error("cannot write " + path);
    f << "n,error,order\n" << std::setprecision(17);
    for (size_t k = 0; k < report.errors.size(); ++k) {
        f << report.grid_sizes[k] << "," << report.errors[k] << ",";
        if (k > 0) f << report.pairwise_orders[k - 1];
        f << "\n";
    }
}

}  // namespace af
