#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "af/update.hpp"
#include "support.hpp"

using namespace af;

TEST_CASE("simpson_flux") {
    Vec c = Vec::Constant(2, 3.0);
    CHECK(simpson_flux(c, c, c, 0.5)[1] == doctest::Approx(1.5));
    CHECK(simpson_flux(Vec::Constant(1, 0.0), Vec::Constant(1, 0.5), Vec::Constant(1, 1.0), 1.0)[0] ==
          doctest::Approx(0.5));
    CHECK(simpson_flux(Vec::Constant(1, 0.0), Vec::Constant(1, 0.25), Vec::Constant(1, 1.0), 1.0)[0] ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-15));

    test::Gen gen(51);
    for (int trial = 0; trial < 500; ++trial) {
        double a[4];
        for (double& v : a) v = gen.uniform(-3, 3);
        const double dt = gen.uniform(0.01, 3);
        auto f = [&](double t) { return Vec::Constant(1, a[0] + t * (a[1] + t * (a[2] + t * a[3]))); };
        const double exact = dt * (a[0] + dt * (a[1] / 2 + dt * (a[2] / 3 + dt * a[3] / 4)));
        CHECK(simpson_flux(f(0), f(dt / 2), f(dt), dt)[0] == doctest::Approx(exact).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("conservative_update") {
    Grid g = build_grid(0.0, 1.0, 6);
    FieldState s(6, 2);
    test::Gen gen(52);
    for (double& v : s.cell_avgs) v = gen.uniform(-1, 1);

    std::vector<double> zero(7 * 2, 0.0);
    FieldState z = conservative_update(s, zero, {}, g, 0.1);
    CHECK(z.cell_avgs == s.cell_avgs);
    CHECK(z.time == doctest::Approx(0.1));

    std::vector<double> uniform(7 * 2, 0.37);
    FieldState u = conservative_update(s, uniform, {}, g, 0.1);
    CHECK(test::max_abs_diff(u.cell_avgs, s.cell_avgs) < 1e-15);

    std::vector<double> one(7 * 2, 0.0);
    const double dt = 0.1, phi = 2.0;
    one[3 * 2 + 1] = dt * phi;
    FieldState o = conservative_update(s, one, {}, g, dt);
    CHECK(o.avg(2, 1) - s.avg(2, 1) == doctest::Approx(-dt * phi / g.dx));
    CHECK(o.avg(3, 1) - s.avg(3, 1) == doctest::Approx(dt * phi / g.dx));
    CHECK(total_content(o, g)[1] == doctest::Approx(total_content(s, g)[1]).epsilon(1e-14));

    CHECK_THROWS_AS(conservative_update(s, std::vector<double>(5, 0.0), {}, g, dt), Error);
    CHECK_THROWS_AS(conservative_update(s, zero, std::vector<double>(3, 0.0), g, dt), Error);
}

TEST_CASE("conservative_update conserves and matches serial under OpenMP") {
    test::Gen gen(53);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = gen.integer(5, 400), m = gen.integer(1, 5);
        Grid g = build_grid(0.0, gen.uniform(0.5, 5.0), n);
        FieldState s(n, m);
        for (double& v : s.cell_avgs) v = gen.uniform(-1, 1);
        std::vector<double> flux((n + 1) * m);
        for (double& v : flux) v = gen.uniform(-1, 1);
        for (int v = 0; v < m; ++v) flux[static_cast<size_t>(n) * m + v] = flux[v];
        FieldState a = conservative_update(s, flux, {}, g, 0.01, Exec::serial);
        FieldState b = conservative_update(s, flux, {}, g, 0.01, Exec::omp);
        CHECK(a.cell_avgs == b.cell_avgs);
        std::vector<double> before = total_content(s, g), after = total_content(a, g);
        for (int v = 0; v < m; ++v) CHECK(std::abs(after[v] - before[v]) < 1e-12 * std::max(1.0, std::abs(before[v])) * n);
    }
}

TEST_CASE("linear_source_integral") {
    Grid g = build_grid(0.0, 1.0, 4);
    const double dt = 0.2;

    ModelDescriptor b = burgers_model();
    FieldState sb(4, 1);
    std::vector<double> fb(5, 1.0);
    CHECK(linear_source_integral(b, 1, sb, fb, fb, g, 0.0, dt)[0] == 0.0);

    const double relax = 0.4, p0 = 0.3;
    ModelDescriptor d = diffusion_model(make_diffusion_params(0.1, relax));
    FieldState s(4, 2);
    for (int i = 0; i < 4; ++i) s.avg(i, 1) = p0;
    for (int j = 0; j <= 4; ++j) s.face(j, 1) = p0;
    Vec r = linear_source_integral(d, 2, s, s.face_vals, s.face_vals, g, 0.0, dt);
    CHECK(r[0] == doctest::Approx(0.0));
    CHECK(r[1] == doctest::Approx(-p0 / relax * g.dx * dt));

    const double c = 1.7;
    ModelDescriptor de = diffusion_model(make_diffusion_params(0.1, relax, [c](double) { return c; }));
    FieldState zs(4, 2);
    Vec e = linear_source_integral(de, 0, zs, zs.face_vals, zs.face_vals, g, 0.0, dt);
    CHECK(e[0] == doctest::Approx(c * g.dx * dt));
    CHECK(e[1] == doctest::Approx(0.0));
}

TEST_CASE("bdf coefficients") {
    BdfCoeffs b1 = bdf_coeffs(1), b2 = bdf_coeffs(2), b3 = bdf_coeffs(3);
    CHECK(b1.alpha == 1.0);
    CHECK(b1.beta == -1.0);
    CHECK(b2.alpha == 1.5);
    CHECK(b2.beta == -2.0);
    CHECK(b2.gamma == 0.5);
    CHECK(b3.alpha == doctest::Approx(11.0 / 6.0));
    CHECK(b3.beta == -3.0);
    CHECK(b3.gamma == 1.5);
    CHECK(b3.delta == doctest::Approx(-1.0 / 3.0));
    for (const BdfCoeffs& b : {b1, b2, b3}) CHECK(b.alpha + b.beta + b.gamma + b.delta == doctest::Approx(0.0).scale(1.0));
    CHECK_THROWS_AS(bdf_coeffs(4), Error);

    // Polynomials up to the order are differentiated exactly; the next degree at O(dt^order).
    for (int order = 1; order <= 3; ++order) {
        BdfCoeffs b = bdf_coeffs(order);
        auto deriv = [&](auto f, double t, double dt) {
            return (b.alpha * f(t) + b.beta * f(t - dt) + b.gamma * f(t - 2 * dt) + b.delta * f(t - 3 * dt)) / dt;
        };
        for (int p = 0; p <= order; ++p) {
            auto f = [p](double t) { return std::pow(t, p); };
            const double exact = p == 0 ? 0.0 : p * std::pow(1.3, p - 1);
            CHECK(deriv(f, 1.3, 0.1) == doctest::Approx(exact).epsilon(1e-12).scale(1.0));
        }
        auto f = [order](double t) { return std::pow(t, order + 1); };
        const double exact = (order + 1) * std::pow(1.3, order);
        double e1 = std::abs(deriv(f, 1.3, 0.02) - exact), e2 = std::abs(deriv(f, 1.3, 0.01) - exact);
        CHECK(std::log2(e1 / e2) == doctest::Approx(order).epsilon(0.05));
    }
}

namespace {

DualStepFn constant_rstar(const std::vector<double>& rstar, double dtau) {
    return [rstar, dtau](const FieldState& cur) {
        DualResidual r;
        r.rstar = rstar;
        r.next_faces = cur;
        r.dtau = dtau;
        return r;
    };
}

}  // namespace

TEST_CASE("dual time march fixed points") {
    test::Gen gen(54);
    const double dt = 0.1;
    for (int order = 1; order <= 3; ++order) {
        FieldState zero(5, 2);
        std::vector<const FieldState*> hist(order, &zero);
        std::vector<double> rs(10);
        for (double& v : rs) v = gen.uniform(-1, 1);
        DualTimeConfig cfg;
        cfg.tol = 1e-12;
        DualTimeStats st;
        BdfCoeffs b = bdf_coeffs(order);
        FieldState out = dual_time_march(hist, dt, constant_rstar(rs, 0.05), cfg, b, {}, &st);
        for (size_t c = 0; c < rs.size(); ++c) CHECK(out.cell_avgs[c] == doctest::Approx(dt * rs[c] / b.alpha).scale(1e-3));
        CHECK(out.time == doctest::Approx(dt));
        CHECK(st.residual < 1e-12);
    }

    FieldState un(6, 1);
    for (double& v : un.cell_avgs) v = gen.uniform(-1, 1);
    FieldState out = dual_time_march({&un}, dt, constant_rstar(std::vector<double>(6, 0.0), 0.03), DualTimeConfig{},
                                     bdf_coeffs(1), {});
    CHECK(test::max_abs_diff(out.cell_avgs, un.cell_avgs) < 1e-10);
}

TEST_CASE("dual time residual decreases monotonically") {
    auto log = std::filesystem::temp_directory_path() / "af_dual_log.csv";
    std::filesystem::remove(log);
    FieldState un(4, 1);
    DualTimeConfig cfg;
    cfg.residual_log = log.string();
    dual_time_march({&un}, 0.1, constant_rstar({1.0, -2.0, 0.5, 3.0}, 0.02), cfg, bdf_coeffs(1), {});
    std::ifstream in(log);
    std::string line;
    double prev = 1e300;
    int rows = 0;
    while (std::getline(in, line)) {
        double r = std::stod(line.substr(line.find(',') + 1));
        CHECK(r < prev);
        prev = r;
        ++rows;
    }
    CHECK(rows > 10);
    std::filesystem::remove(log);
}

TEST_CASE("dual time march errors") {
    FieldState un(4, 1);
    CHECK_THROWS_AS(dual_time_march({&un}, 0.1, constant_rstar(std::vector<double>(4, 1.0), 0.02), DualTimeConfig{},
                                    bdf_coeffs(2), {}),
                    Error);
    DualTimeConfig few;
    few.max_iters = 3;
    CHECK_THROWS_AS(dual_time_march({&un}, 0.1, constant_rstar(std::vector<double>(4, 1.0), 0.02), few,
                                    bdf_coeffs(1), {}),
                    Error);
}
