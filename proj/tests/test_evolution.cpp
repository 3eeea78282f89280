#include <doctest.h>

#include "af/evolution.hpp"
#include "support.hpp"

using namespace af;

namespace {

struct Field {
    Grid grid;
    FieldState state;
    GhostCells ghosts;
};

Field make_field(double x0, double x1, int n, int m, const std::function<Vec(double)>& f) {
    Field fl;
    fl.grid = build_grid(x0, x1, n);
    fl.state = test::sample_state(fl.grid, m, f);
    fl.ghosts = test::extended_ghosts(fl.grid, m, f);
    return fl;
}

// Burgers characteristic solution u = u0(x - u t) by Newton.
double burgers_exact(double x, double t) {
    auto u0 = [](double s) { return std::sin(2.0 * test::kPi * s) / (2.0 * test::kPi); };
    auto du0 = [](double s) { return std::cos(2.0 * test::kPi * s); };
    double u = u0(x);
    for (int it = 0; it < 50; ++it) {
        double g = u - u0(x - u * t);
        double dg = 1.0 + t * du0(x - u * t);
        u -= g / dg;
    }
    return u;
}

}  // namespace

TEST_CASE("foot tracing") {
    auto lin = [](double x) { return Vec::Constant(1, x); };
    Field f = make_field(0.0, 1.2, 12, 1, lin);
    Reconstruction r(f.grid, f.state, f.ghosts);

    FootTrace c = trace_foot_scalar(0.6, 0.1, r, [](double) { return 0.8; });
    CHECK(c.foot == doctest::Approx(0.6 - 0.08).epsilon(1e-15));
    CHECK(c.converged);
    CHECK(c.iterations_used == 2);

    // U0(x) = x: fixed point of x0 = 1 - 0.1 x0.
    FootTrace b = trace_foot_scalar(1.0, 0.1, r, [](double u) { return u; });
    CHECK(b.iterations_used == 3);
    CHECK(std::abs(b.foot - 1.0 / 1.1) < 1e-3);
    CHECK(b.foot == doctest::Approx(0.909).epsilon(1e-12));
}

TEST_CASE("evolve_scalar on constants and at dt = 0") {
    auto cst = [](double) { return Vec::Constant(1, 0.3); };
    Field f = make_field(0.0, 1.0, 10, 1, cst);
    Reconstruction r(f.grid, f.state, f.ghosts);
    ModelDescriptor b = burgers_model();
    for (double dt : {0.0, 0.01, 0.05}) CHECK(evolve_scalar(0.5, dt, r, b) == doctest::Approx(0.3));
    FootTrace t = trace_foot_scalar(0.5, 0.05, r, [](double u) { return u; });
    CHECK(t.foot == doctest::Approx(0.5 - 0.3 * 0.05));

    test::Gen gen(41);
    FieldState s(10, 1);
    for (double& v : s.cell_avgs) v = gen.uniform(-1, 1);
    for (double& v : s.face_vals) v = gen.uniform(-1, 1);
    Reconstruction rr(f.grid, s, fill_ghosts(s, periodic_bc()));
    for (int j = 0; j <= 10; ++j) CHECK(evolve_scalar(f.grid.face_coords[j], 0.0, rr, b) == doctest::Approx(s.face(j, 0)).epsilon(1e-14).scale(1.0));
}

TEST_CASE("linear advection of a quadratic is exact") {
    test::Gen gen(42);
    for (int trial = 0; trial < 100; ++trial) {
        const double a = gen.uniform(-2, 2), b = gen.uniform(-2, 2), c0 = gen.uniform(-2, 2);
        const double c = gen.uniform(-1, 1);
        auto q = [&](double x) { return a * x * x + b * x + c0; };
        Field f = make_field(-1.0, 1.0, gen.integer(4, 30), 1, [&](double x) { return Vec::Constant(1, q(x)); });
        Reconstruction r(f.grid, f.state, f.ghosts);
        ModelDescriptor adv = test::advection_model(c);
        const double dt = gen.uniform(0.0, 0.9) * f.grid.dx / std::max(std::abs(c), 1e-3);
        for (double x : f.grid.face_coords)
            CHECK(evolve_scalar(x, dt, r, adv) == doctest::Approx(q(x - c * dt)).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("burgers face evolution is third order in dt") {
    auto u0 = [](double x) { return Vec::Constant(1, std::sin(2.0 * test::kPi * x) / (2.0 * test::kPi)); };
    Grid g = build_grid(0.0, 1.0, 2560);
    FieldState s = test::sample_state(g, 1, u0);
    Reconstruction r(g, s, fill_ghosts(s, periodic_bc()));
    ModelDescriptor b = burgers_model();
    std::vector<double> err;
    // Time steps far above dx, so the reconstruction error stays below the foot error.
    for (double dt : {0.08, 0.04, 0.02}) {
        double e = 0.0;
        for (int k = 1; k < 20; ++k) {
            double x = k / 20.0;
            FootTrace tr = trace_foot_scalar(x, dt, r, [](double u) { return u; });
            double u = r.eval(tr.foot)[0];
            e = std::max(e, std::abs(u - burgers_exact(x, dt)));
        }
        err.push_back(e);
    }
    for (size_t k = 1; k < err.size(); ++k) CHECK(std::log2(err[k - 1] / err[k]) > 2.7);
}

TEST_CASE("evolve_system reduces to the scalar operator") {
    test::Gen gen(43);
    Grid g = build_grid(0.0, 1.0, 20);
    FieldState s(20, 1);
    for (double& v : s.cell_avgs) v = gen.uniform(0.5, 1.0);
    for (double& v : s.face_vals) v = gen.uniform(0.5, 1.0);
    Reconstruction r(g, s, fill_ghosts(s, periodic_bc()));
    ModelDescriptor b = burgers_model();
    for (double x : g.face_coords) {
        double sys = evolve_system(x, 0.03, r, b)[0];
        CHECK(sys == doctest::Approx(evolve_scalar(x, 0.03, r, b, 2)).epsilon(1e-15));
    }
}

TEST_CASE("constant states are fixed points of the system operator") {
    test::Gen gen(44);
    GasParams gas;
    ModelDescriptor euler = euler_model(gas);
    for (int trial = 0; trial < 50; ++trial) {
        Vec u = gen.euler_state(gas);
        Field f = make_field(0.0, 1.0, 8, 3, [&](double) { return u; });
        Reconstruction r(f.grid, f.state, f.ghosts);
        const double dt = 0.5 * f.grid.dx / euler.wave_speed(u);
        Vec out = evolve_system(0.5, dt, r, euler);
        CHECK((out - u).cwiseAbs().maxCoeff() < 1e-12 * u.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("linear systems evolve by exact characteristics") {
    test::Gen gen(45);
    for (int trial = 0; trial < 40; ++trial) {
        const int m = gen.integer(2, 4);
        Mat rm(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) rm(i, j) = gen.uniform(-1, 1) + (i == j ? 2.0 : 0.0);
        Vec lam(m);
        for (int k = 0; k < m; ++k) lam[k] = -1.0 + 2.0 * k / (m - 1) + gen.uniform(-0.1, 0.1);
        ModelDescriptor lin = test::linear_system_model(rm, lam);
        Mat coef(m, 3);
        for (int v = 0; v < m; ++v) coef.row(v) << gen.uniform(-1, 1), gen.uniform(-1, 1), gen.uniform(-1, 1);
        auto u0 = [&](double x) {
            Vec u(m);
            for (int v = 0; v < m; ++v) u[v] = coef(v, 0) * x * x + coef(v, 1) * x + coef(v, 2);
            return u;
        };
        Field f = make_field(-1.0, 1.0, 10, m, u0);
        Reconstruction r(f.grid, f.state, f.ghosts);
        const double dt = 0.8 * f.grid.dx / lam.cwiseAbs().maxCoeff();
        Mat lm = rm.inverse();
        for (double x : f.grid.face_coords) {
            Vec exact = Vec::Zero(m);
            for (int k = 0; k < m; ++k) exact += rm.col(k) * lm.row(k).dot(u0(x - lam[k] * dt));
            Vec out = evolve_system(x, dt, r, lin);
            CHECK((out - exact).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
}

TEST_CASE("source-free models take the same path with and without source") {
    GasParams gas;
    ModelDescriptor euler = euler_model(gas);
    Vec q(3);
    q << 1.0, 0.5, 1.0;
    Vec base = prim_to_cons(q, gas);
    Field f = make_field(0.0, 1.0, 12, 3, [&](double x) {
        Vec u = base;
        u[0] *= 1.0 + 0.1 * std::sin(2.0 * test::kPi * x);
        return u;
    });
    Reconstruction r(f.grid, f.state, f.ghosts);
    const double dt = 0.5 * f.grid.dx / euler.wave_speed(base) / 1.2;
    for (double x : f.grid.face_coords) {
        Vec a = evolve_system(x, dt, r, euler);
        Vec b = evolve_system_with_source(x, dt, r, euler, 0.3);
        CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("diffusion system at equilibrium and at dt = 0") {
    DiffusionParams p = make_diffusion_params(0.01, std::pow(1.0 / (2.0 * test::kPi), 2) / 0.01);
    ModelDescriptor d = diffusion_model(p);
    Field f = make_field(0.0, 1.0, 10, 2, [](double) {
        Vec u(2);
        u << 0.4, 0.0;
        return u;
    });
    Reconstruction r(f.grid, f.state, f.ghosts);
    Vec out = evolve_system_with_source(0.5, 0.5, r, d, 0.0);
    CHECK(out[0] == doctest::Approx(0.4));
    CHECK(std::abs(out[1]) < 1e-15);

    test::Gen gen(47);
    FieldState s(10, 2);
    for (double& v : s.cell_avgs) v = gen.uniform(-1, 1);
    for (double& v : s.face_vals) v = gen.uniform(-1, 1);
    Reconstruction rr(f.grid, s, fill_ghosts(s, periodic_bc()));
    for (int j = 0; j <= 10; ++j) {
        Vec z = evolve_system_with_source(f.grid.face_coords[j], 0.0, rr, d, 0.0);
        CHECK((z - s.face_vec(j)).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("diffusion characteristic relaxation") {
    const double relax = 0.5;
    DiffusionParams p = make_diffusion_params(0.2, relax);
    auto cst = [](double) {
        Vec u(2);
        u << 0.7, 0.3;
        return u;
    };
    Field f = make_field(0.0, 1.0, 10, 2, cst);
    Reconstruction r(f.grid, f.state, f.ghosts);
    // Each characteristic relaxes toward the partner frozen at the face.
    std::vector<double> gap;
    for (double dt : {0.1, 0.05, 0.025}) {
        Vec out = evolve_diffusion_exact(0.5, dt, r, p);
        const double frozen = 0.3 * (2.0 * std::exp(-dt / (2.0 * relax)) - 1.0);
        CHECK(out[1] == doctest::Approx(frozen).epsilon(1e-14));
        CHECK(out[0] == doctest::Approx(0.7).epsilon(1e-14));
        gap.push_back(std::abs(out[1] - 0.3 * std::exp(-dt / relax)));
    }
    // Agrees with dP/dt = -P/T to second order per step.
    for (size_t k = 1; k < gap.size(); ++k) CHECK(std::log2(gap[k - 1] / gap[k]) == doctest::Approx(2.0).epsilon(0.05));

    Vec z = evolve_diffusion_exact(0.5, 0.0, r, p);
    CHECK(z[0] == doctest::Approx(0.7));
    CHECK(z[1] == doctest::Approx(0.3));

    auto eq = [](double) {
        Vec u(2);
        u << 0.9, 0.0;
        return u;
    };
    Field fe = make_field(0.0, 1.0, 10, 2, eq);
    Reconstruction re(fe.grid, fe.state, fe.ghosts);
    Vec e = evolve_diffusion_exact(0.5, 0.3, re, p);
    CHECK(e[0] == doctest::Approx(0.9));
    CHECK(std::abs(e[1]) < 1e-15);
}

TEST_CASE("zero-eigenvalue source limit is continuous") {
    // Two-family linear system with relaxation on the second variable.
    auto model_with = [](double lam0) {
        Mat rm(2, 2);
        rm << 1.0, 0.3, 0.2, 1.0;
        Vec lam(2);
        lam << lam0, 1.0;
        ModelDescriptor m = test::linear_system_model(rm, lam);
        m.has_source = true;
        m.source_matrix = Mat::Zero(2, 2);
        m.source_matrix(1, 1) = -2.0;
        return m;
    };
    Field f = make_field(0.0, 1.0, 10, 2, [](double x) {
        Vec u(2);
        u << 1.0 + 0.2 * x, 0.5 - 0.1 * x * x;
        return u;
    });
    Reconstruction r(f.grid, f.state, f.ghosts);
    const double eps = 1e-8;
    Vec below = evolve_system_with_source(0.5, 0.05, r, model_with(0.9 * eps), 0.0);
    Vec above = evolve_system_with_source(0.5, 0.05, r, model_with(1.1 * eps), 0.0);
    CHECK((below - above).cwiseAbs().maxCoeff() < 10.0 * eps);
}

TEST_CASE("serial and parallel face evolution agree bitwise") {
    GasParams gas;
    ModelDescriptor euler = euler_model(gas);
    Field f = make_field(0.0, 1.0, 200, 3, [&](double x) {
        Vec q(3);
        q << 1.0 + 0.2 * std::sin(2.0 * test::kPi * x), 0.5, 1.0;
        return prim_to_cons(q, gas);
    });
    Reconstruction r(f.grid, f.state, fill_ghosts(f.state, periodic_bc()));
    FaceEvolution a = evolve_faces(r, euler, 1e-3, 0.0, Exec::serial);
    FaceEvolution b = evolve_faces(r, euler, 1e-3, 0.0, Exec::omp);
    CHECK(a.half == b.half);
    CHECK(a.full == b.full);
}
