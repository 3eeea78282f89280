#include "af/verification.hpp"

#include <Eigen/Sparse>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

namespace af {

namespace {

struct RiemannSide {
    double rho, u, p, a;
};

// Pressure function of one side and its derivative.
void pressure_fn(double p, const RiemannSide& s, double g, double& f, double& df) {
    if (p > s.p) {
        const double a = 2.0 / ((g + 1.0) * s.rho);
        const double b = (g - 1.0) / (g + 1.0) * s.p;
        const double q = std::sqrt(a / (p + b));
        f = (p - s.p) * q;
        df = q * (1.0 - 0.5 * (p - s.p) / (b + p));
    } else {
        const double pr = p / s.p;
        f = 2.0 * s.a / (g - 1.0) * (std::pow(pr, (g - 1.0) / (2.0 * g)) - 1.0);
        df = 1.0 / (s.rho * s.a) * std::pow(pr, -(g + 1.0) / (2.0 * g));
    }
}

RiemannSide side_of(const PrimState& s, double g) {
    if (!(s.rho > 0.0) || !(s.p > 0.0)) throw Error("inadmissible state");
    return {s.rho, s.u, s.p, std::sqrt(g * s.p / s.rho)};
}

}  // namespace

StarState sod_star_state(const PrimState& left, const PrimState& right, double gamma) {
    const RiemannSide l = side_of(left, gamma), r = side_of(right, gamma);
    const double du = r.u - l.u;
    if (2.0 * (l.a + r.a) / (gamma - 1.0) <= du) throw Error("vacuum formation");
    double p = std::max(1e-8, 0.5 * (l.p + r.p) - 0.125 * du * (l.rho + r.rho) * (l.a + r.a));
    for (int it = 0; it < 100; ++it) {
        double fl, dfl, fr, dfr;
        pressure_fn(p, l, gamma, fl, dfl);
        pressure_fn(p, r, gamma, fr, dfr);
        double next = p - (fl + fr + du) / (dfl + dfr);
        if (next < 1e-12) next = 1e-12;
        double change = 2.0 * std::abs(next - p) / (next + p);
        p = next;
        if (change < 1e-15) break;
    }
    double fl, dfl, fr, dfr;
    pressure_fn(p, l, gamma, fl, dfl);
    pressure_fn(p, r, gamma, fr, dfr);
    return {p, 0.5 * (l.u + r.u) + 0.5 * (fr - fl)};
}

PrimState exact_sod(double x, double t, const PrimState& left, const PrimState& right,
                    double gamma) {
    if (t < 0.0) throw Error("exact_sod: negative time");
    if (t == 0.0) return x <= 0.0 ? left : right;
    const double g = gamma;
    const RiemannSide l = side_of(left, g), r = side_of(right, g);
    const StarState star = sod_star_state(left, right, g);
    const double ps = star.p_star, us = star.u_star;
    const double s = x / t;
    const double gm = (g - 1.0) / (g + 1.0);
    if (s <= us) {
        if (ps > l.p) {
            const double sl = l.u - l.a * std::sqrt((g + 1.0) / (2.0 * g) * ps / l.p + (g - 1.0) / (2.0 * g));
            if (s <= sl) return left;
            const double rho = l.rho * (ps / l.p + gm) / (gm * ps / l.p + 1.0);
            return {rho, us, ps};
        }
        const double shl = l.u - l.a;
        if (s <= shl) return left;
        const double as = l.a * std::pow(ps / l.p, (g - 1.0) / (2.0 * g));
        const double stl = us - as;
        if (s > stl) return {l.rho * std::pow(ps / l.p, 1.0 / g), us, ps};
        const double c = 2.0 / (g + 1.0) + gm / l.a * (l.u - s);
        return {l.rho * std::pow(c, 2.0 / (g - 1.0)), 2.0 / (g + 1.0) * (l.a + (g - 1.0) / 2.0 * l.u + s),
                l.p * std::pow(c, 2.0 * g / (g - 1.0))};
    }
    if (ps > r.p) {
        const double sr = r.u + r.a * std::sqrt((g + 1.0) / (2.0 * g) * ps / r.p + (g - 1.0) / (2.0 * g));
        if (s >= sr) return right;
        const double rho = r.rho * (ps / r.p + gm) / (gm * ps / r.p + 1.0);
        return {rho, us, ps};
    }
    const double shr = r.u + r.a;
    if (s >= shr) return right;
    const double as = r.a * std::pow(ps / r.p, (g - 1.0) / (2.0 * g));
    const double str = us + as;
    if (s < str) return {r.rho * std::pow(ps / r.p, 1.0 / g), us, ps};
    const double c = 2.0 / (g + 1.0) - gm / r.a * (r.u - s);
    return {r.rho * std::pow(c, 2.0 / (g - 1.0)), 2.0 / (g + 1.0) * (-r.a + (g - 1.0) / 2.0 * r.u + s),
            r.p * std::pow(c, 2.0 * g / (g - 1.0))};
}

PrimState manufactured_fields(double x, double t) {
    return {1.0 + 0.1 * t * std::sin(x), 1.0 + 2.0 * std::sin(x), 1.0 - 0.5 * std::cos(x)};
}

namespace {

// p / rho and its derivatives for the manufactured fields.
struct PressureRatio {
    double f, fx, fxx, fxt;
};

PressureRatio pressure_ratio(double x, double t) {
    const double s = std::sin(x), c = std::cos(x);
    const double n = 1.0 - 0.5 * c, nx = 0.5 * s, nxx = 0.5 * c;
    const double d = 1.0 + 0.1 * t * s, dx = 0.1 * t * c, dxx = -0.1 * t * s;
    const double dt = 0.1 * s, dxt = 0.1 * c;
    PressureRatio r;
    r.f = n / d;
    r.fx = nx / d - n * dx / (d * d);
    r.fxx = nxx / d - 2.0 * nx * dx / (d * d) - n * dxx / (d * d) + 2.0 * n * dx * dx / (d * d * d);
    r.fxt = -nx * dt / (d * d) - n * (dxt / (d * d) - 2.0 * dx * dt / (d * d * d));
    return r;
}

double heat_coeff(const GasParams& gas) { return gas.gamma * gas.mu / (gas.prandtl * (gas.gamma - 1.0)); }

}  // namespace

std::array<double, 2> manufactured_stress_heat(double x, double t, const GasParams& gas) {
    const double tau = 4.0 / 3.0 * gas.mu * 2.0 * std::cos(x);
    const double q = -heat_coeff(gas) * pressure_ratio(x, t).fx;
    return {tau, q};
}

double manufactured_heat_rate(double x, double t, const GasParams& gas) {
    return -heat_coeff(gas) * pressure_ratio(x, t).fxt;
}

std::array<double, 3> manufactured_sources(double x, double t, const GasParams& gas) {
    const double g = gas.gamma;
    const double s = std::sin(x), c = std::cos(x);
    const double rho = 1.0 + 0.1 * t * s, rho_t = 0.1 * s, rho_x = 0.1 * t * c;
    const double u = 1.0 + 2.0 * s, u_x = 2.0 * c;
    const double p = 1.0 - 0.5 * c, p_x = 0.5 * s;
    const double tau = 4.0 / 3.0 * gas.mu * u_x, tau_x = -8.0 / 3.0 * gas.mu * s;
    const double q_x = -heat_coeff(gas) * pressure_ratio(x, t).fxx;
    const double re = p / (g - 1.0) + 0.5 * rho * u * u;
    const double re_t = 0.5 * rho_t * u * u;
    const double re_x = p_x / (g - 1.0) + 0.5 * rho_x * u * u + rho * u * u_x;

    const double s1 = rho_t + rho_x * u + rho * u_x;
    const double s2 = rho_t * u + rho_x * u * u + 2.0 * rho * u * u_x + p_x - tau_x;
    const double s3 = re_t + u_x * (re + p) + u * (re_x + p_x) - tau_x * u - tau * u_x + q_x;
    return {s1, s2, s3};
}

std::array<double, 3> manufactured_sources_printed(double x, double t, const GasParams& gas) {
    const double g = gas.gamma, mu = gas.mu;
    const double s = std::sin(x), c = std::cos(x);
    const double s1 = 0.1 * s + (2.0 + 0.1 * t + 0.4 * t * s) * c;
    const double s2 = (0.6 + 8.0 / 3.0 * mu + 0.2 * s) * s +
                      (4.0 + 0.1 * t + 8.0 * s + 0.8 * t * s + 1.2 * t * s * s) * c;
    const double d = 1.0 + 0.1 * t * s;
    const double s3 =
        (0.05 + 0.2 * s + 0.2 * s * s + 0.5 * g / (g - 1.0) + 8.0 / 3.0 * mu) * s +
        ((5.0 * g - 3.0) / (g - 1.0) + 0.05 * t + 0.6 * t * s + 12.0 * s + 1.8 * t * s * s + 12.0 * s * s +
         1.6 * t * s * s * s) * c -
        (g / (g - 1.0) + 16.0 / 3.0 * mu) * (c * c - s * s) -
        g * mu / (gas.prandtl * (g - 1.0)) *
            ((0.5 * c + 0.1 * t * s) * d / (d * d * d) - 0.2 * t * c * (0.05 * t + 0.5 * s - 0.1 * t * c) / (d * d * d));
    return {s1, s2, s3};
}

PrimState shu_osher_init(double x) {
    if (x <= -4.0) return {3.857143, 2.629369, 10.33333};
    return {1.0 + 0.2 * std::sin(std::numbers::pi * x), 0.0, 1.0};
}

FdDiffusionSetup standard_diffusion_setup() {
    FdDiffusionSetup s;
    s.x_min = -1.5 * std::numbers::pi;
    s.x_max = 1.5 * std::numbers::pi;
    s.nu = 0.01;
    s.source = [](double x) { return 0.1 * std::exp(0.05 * x); };
    s.initial = [](double x) { return std::cos(x); };
    s.left_value = 0.1 * std::exp(-0.05 * 1.5 * std::numbers::pi);
    s.right_value = 0.1 * std::exp(0.05 * 1.5 * std::numbers::pi);
    return s;
}

namespace {

// nu * u_xx + S at interior nodes, fourth order, one-sided next to the ends.
void fd_rhs(const std::vector<double>& u, const std::vector<double>& src, double nu, double dx,
            std::vector<double>& out) {
    const int n = static_cast<int>(u.size()) - 1;
    const double k = nu / (12.0 * dx * dx);
    out.assign(u.size(), 0.0);
    if (n < 6) throw Error("fd_diffusion_reference: need at least six intervals");
    out[1] = k * (10.0 * u[0] - 15.0 * u[1] - 4.0 * u[2] + 14.0 * u[3] - 6.0 * u[4] + u[5]) + src[1];
    out[n - 1] = k * (10.0 * u[n] - 15.0 * u[n - 1] - 4.0 * u[n - 2] + 14.0 * u[n - 3] - 6.0 * u[n - 4] + u[n - 5]) +
                 src[n - 1];
    for (int i = 2; i <= n - 2; ++i)
        out[i] = k * (-u[i - 2] + 16.0 * u[i - 1] - 30.0 * u[i] + 16.0 * u[i + 1] - u[i + 2]) + src[i];
}

}  // namespace

std::vector<double> fd_diffusion_reference(int grid_points, const FdDiffusionSetup& setup,
                                           double t_end, double dt) {
    const int n = grid_points;
    const double dx = (setup.x_max - setup.x_min) / n;
    // Explicit RK3 stability bound for the fourth-order Laplacian (spectral radius 16/3 / dx^2).
    const double dt_max = 2.5 / (16.0 / 3.0) * dx * dx / setup.nu;
    if (dt <= 0.0) dt = 0.5 * dt_max;
    if (dt > dt_max) throw Error("fd_diffusion_reference: time step unstable for the parabolic limit");
    std::vector<double> u(n + 1), src(n + 1, 0.0);
    for (int i = 0; i <= n; ++i) {
        const double x = setup.x_min + i * dx;
        u[i] = setup.initial ? setup.initial(x) : 0.0;
        if (setup.source) src[i] = setup.source(x);
    }
    u[0] = setup.left_value;
    u[n] = setup.right_value;
    const int steps = static_cast<int>(std::ceil(t_end / dt - 1e-12));
    if (steps > 0) dt = t_end / steps;
    std::vector<double> k, u1(u), u2(u);
    for (int s = 0; s < steps; ++s) {
        fd_rhs(u, src, setup.nu, dx, k);
        for (int i = 1; i < n; ++i) u1[i] = u[i] + dt * k[i];
        fd_rhs(u1, src, setup.nu, dx, k);
        for (int i = 1; i < n; ++i) u2[i] = 0.75 * u[i] + 0.25 * (u1[i] + dt * k[i]);
        fd_rhs(u2, src, setup.nu, dx, k);
        for (int i = 1; i < n; ++i) u[i] = u[i] / 3.0 + 2.0 / 3.0 * (u2[i] + dt * k[i]);
    }
    for (double v : u)
        if (!std::isfinite(v)) throw Error("fd_diffusion_reference: solution blew up");
    return u;
}

std::vector<double> fd_diffusion_steady(int grid_points, const FdDiffusionSetup& setup) {
    const int n = grid_points;
    const double dx = (setup.x_max - setup.x_min) / n;
    const double k = setup.nu / (12.0 * dx * dx);
    std::vector<Eigen::Triplet<double>> trips;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n - 1);
    std::vector<double> fixed(n + 1, 0.0);
    fixed[0] = setup.left_value;
    fixed[n] = setup.right_value;
    auto add = [&](int row, int node, double w) {
        if (node == 0 || node == n)
            b[row - 1] -= w * fixed[node];
        else
            trips.emplace_back(row - 1, node - 1, w);
    };
    for (int i = 1; i < n; ++i) {
        const double x = setup.x_min + i * dx;
        b[i - 1] -= setup.source ? setup.source(x) : 0.0;
        if (i == 1) {
            const double w[6] = {10, -15, -4, 14, -6, 1};
            for (int j = 0; j < 6; ++j) add(i, j, k * w[j]);
        } else if (i == n - 1) {
            const double w[6] = {10, -15, -4, 14, -6, 1};
            for (int j = 0; j < 6; ++j) add(i, n - j, k * w[j]);
        } else {
            const double w[5] = {-1, 16, -30, 16, -1};
            for (int j = 0; j < 5; ++j) add(i, i - 2 + j, k * w[j]);
        }
    }
    Eigen::SparseMatrix<double> a(n - 1, n - 1);
    a.setFromTriplets(trips.begin(), trips.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(a);
    if (lu.info() != Eigen::Success) throw Error("fd_diffusion_steady: factorisation failed");
    Eigen::VectorXd sol = lu.solve(b);
    std::vector<double> u(n + 1);
    u[0] = fixed[0];
    u[n] = fixed[n];
    for (int i = 1; i < n; ++i) u[i] = sol[i - 1];
    return u;
}

std::vector<double> average_nodes_to_cells(const std::vector<double>& nodes, int n_cells) {
    const int intervals = static_cast<int>(nodes.size()) - 1;
    if (n_cells < 1 || intervals % n_cells != 0) throw Error("average_nodes_to_cells: nodes do not align with cells");
    const int per = intervals / n_cells;
    if (per % 2 != 0) throw Error("average_nodes_to_cells: Simpson rule needs an even node count per cell");
    std::vector<double> out(n_cells);
    for (int c = 0; c < n_cells; ++c) {
        const int o = c * per;
        double sum = nodes[o] + nodes[o + per];
        for (int j = 1; j < per; ++j) sum += (j % 2 ? 4.0 : 2.0) * nodes[o + j];
        out[c] = sum / (3.0 * per);
    }
    return out;
}

std::vector<double> restrict_averages(const std::vector<double>& fine, int n_cells) {
    const int nf = static_cast<int>(fine.size());
    if (n_cells < 1 || nf % n_cells != 0) throw Error("restrict_averages: grids do not align");
    const int r = nf / n_cells;
    std::vector<double> out(n_cells, 0.0);
    for (int c = 0; c < n_cells; ++c) {
        double sum = 0.0;
        for (int j = 0; j < r; ++j) sum += fine[c * r + j];
        out[c] = sum / r;
    }
    return out;
}

std::vector<double> cell_averages(const Grid& grid, const std::function<double(double)>& f) {
    static const double xg[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                 0.9061798459386640};
    static const double wg[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                 0.4786286704993665, 0.2369268850561891};
    std::vector<double> out(grid.n_cells);
    for (int i = 0; i < grid.n_cells; ++i) {
        double sum = 0.0;
        for (int q = 0; q < 5; ++q) sum += wg[q] * f(grid.cell_centers[i] + 0.5 * grid.dx * xg[q]);
        out[i] = 0.5 * sum;
    }
    return out;
}

double l2_error(const std::vector<double>& a, const std::vector<double>& b, double dx) {
    if (a.size() != b.size()) throw Error("l2_error: size mismatch");
    double sum = 0.0;
    for (size_t i = 0; i < a.size(); ++i) sum += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(sum * dx);
}

double l2_error(const FieldState& solution, int var, const std::vector<double>& reference,
                const Grid& grid) {
    std::vector<double> a(solution.n_cells);
    for (int i = 0; i < solution.n_cells; ++i) a[i] = solution.avg(i, var);
    return l2_error(a, reference, grid.dx);
}

ConvergenceReport convergence_order(const std::vector<double>& errors,
                                    const std::vector<int>& grid_sizes) {
    if (errors.size() != grid_sizes.size()) throw Error("convergence_order: size mismatch");
    if (errors.size() < 3) throw Error("convergence_order: at least three levels required");
    for (size_t k = 1; k < grid_sizes.size(); ++k)
        if (grid_sizes[k] != 2 * grid_sizes[k - 1]) throw Error("convergence_order: grid sizes must double");
    for (double e : errors)
        if (!(e > 0.0)) throw Error("convergence_order: errors must be positive");
    ConvergenceReport r;
    r.grid_sizes = grid_sizes;
    r.errors = errors;
    for (size_t k = 1; k < errors.size(); ++k) r.pairwise_orders.push_back(std::log2(errors[k - 1] / errors[k]));
    const double n = static_cast<double>(errors.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t k = 0; k < errors.size(); ++k) {
        const double x = std::log(static_cast<double>(grid_sizes[k])), y = std::log(errors[k]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    r.fitted_order = -(n * sxy - sx * sy) / (n * sxx - sx * sx);
    return r;
}

void write_reference(const std::string& path, const std::string& provenance,
                     const std::vector<double>& x, const std::vector<double>& values) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << "# " << provenance << "\n" << "x,value\n" << std::setprecision(17);
    for (size_t i = 0; i < x.size(); ++i) out << x[i] << "," << values[i] << "\n";
}

bool read_reference(const std::string& path, const std::string& provenance,
                    std::vector<double>& values) {
    std::ifstream in(path);
    if (!in) return false;
    std::string line;
    if (!std::getline(in, line) || line != "# " + provenance) return false;
    std::getline(in, line);
    values.clear();
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto comma = line.find(',');
        values.push_back(std::stod(line.substr(comma + 1)));
    }
    return true;
}

}  // namespace af
