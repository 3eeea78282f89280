#include "af/models.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

namespace af {

namespace {

EigenSystem sorted(const Vec& values, const Mat& right, const Mat& left) {
    const int m = static_cast<int>(values.size());
    std::array<int, kMaxVars> idx{};
    for (int k = 0; k < m; ++k) idx[k] = k;
    std::stable_sort(idx.begin(), idx.begin() + m, [&](int a, int b) { return values[a] < values[b]; });
    EigenSystem e;
    e.values.resize(m);
    e.right.resize(m, m);
    e.left.resize(m, m);
    for (int k = 0; k < m; ++k) {
        e.values[k] = values[idx[k]];
        e.right.col(k) = right.col(idx[k]);
        e.left.row(k) = left.row(idx[k]);
    }
    return e;
}

Vec sorted_values(Vec values) {
    std::sort(values.data(), values.data() + values.size());
    return values;
}

struct GasState {
    double rho, u, e, p, a, h;
};

GasState gas_state(const Vec& u, double gamma) {
    GasState s;
    s.rho = u[0];
    if (!(s.rho > 0.0) || !std::isfinite(s.rho)) throw Error("inadmissible state: non-positive density");
    s.u = u[1] / s.rho;
    s.e = u[2] / s.rho;
    s.p = (gamma - 1.0) * (u[2] - 0.5 * u[1] * s.u);
    if (!(s.p > 0.0) || !std::isfinite(s.p)) throw Error("inadmissible state: non-positive pressure");
    s.a = std::sqrt(gamma * s.p / s.rho);
    s.h = (u[2] + s.p) / s.rho;
    return s;
}

void euler_blocks(const GasState& s, double gamma, Mat& r, Mat& l) {
    const double u = s.u, a = s.a, h = s.h;
    r(0, 0) = 1.0;         r(0, 1) = 1.0;           r(0, 2) = 1.0;
    r(1, 0) = u - a;       r(1, 1) = u;             r(1, 2) = u + a;
    r(2, 0) = h - u * a;   r(2, 1) = 0.5 * u * u;   r(2, 2) = h + u * a;
    const double b1 = (gamma - 1.0) / (a * a);
    const double b2 = 0.5 * b1 * u * u;
    l(0, 0) = 0.5 * (b2 + u / a);  l(0, 1) = -0.5 * (b1 * u + 1.0 / a);  l(0, 2) = 0.5 * b1;
    l(1, 0) = 1.0 - b2;            l(1, 1) = b1 * u;                     l(1, 2) = -b1;
    l(2, 0) = 0.5 * (b2 - u / a);  l(2, 1) = -0.5 * (b1 * u - 1.0 / a);  l(2, 2) = 0.5 * b1;
}

Vec euler_flux(const Vec& u, double gamma) {
    GasState s = gas_state(u, gamma);
    Vec f(u.size());
    f.setZero();
    f[0] = u[1];
    f[1] = u[1] * s.u + s.p;
    f[2] = (u[2] + s.p) * s.u;
    return f;
}

double euler_speed(const Vec& u, double gamma) {
    GasState s = gas_state(u, gamma);
    return std::abs(s.u) + s.a;
}

struct ViscousCoeffs {
    double av, ah;
};

ViscousCoeffs viscous_speeds(double rho, const GasParams& gas) {
    if (!(rho > 0.0)) throw Error("inadmissible state: non-positive density");
    ViscousCoeffs c;
    c.av = std::sqrt(gas.mu_v() / rho / gas.relax_v);
    c.ah = std::sqrt(gas.mu_h() / rho / gas.relax_h);
    return c;
}

}  // namespace

GasParams make_gas_params(double mu, double rho_ref, double length, double gamma, double prandtl) {
    GasParams g;
    g.gamma = gamma;
    g.prandtl = prandtl;
    g.mu = mu;
    if (mu > 0.0) {
        g.relax_v = length * length / (g.mu_v() / rho_ref);
        g.relax_h = length * length / (g.mu_h() / rho_ref);
    }
    return g;
}

DiffusionParams make_diffusion_params(double nu, double relax, SourceFn s1) {
    if (!(nu > 0.0) || !(relax > 0.0)) throw Error("diffusion parameters must be positive");
    DiffusionParams p;
    p.nu = nu;
    p.relax = relax;
    p.a_nu = std::sqrt(nu / relax);
    p.ext_source = std::move(s1);
    return p;
}

Vec ModelDescriptor::external_source(double x, double t) const {
    if (external) return external(x, t);
    Vec z(n_vars);
    z.setZero();
    return z;
}

Vec ModelDescriptor::precond_source(const Vec& u, double x, double t) const {
    Vec s(n_vars);
    if (source_matrix.size() > 0)
        s.noalias() = source_matrix * u;
    else
        s.setZero();
    if (external) s += external(x, t);
    return s;
}

ModelDescriptor burgers_model() {
    ModelDescriptor m;
    m.name = "burgers";
    m.n_vars = 1;
    m.var_names = {"u"};
    m.flux = [](const Vec& u) {
        Vec f(1);
        f[0] = 0.5 * u[0] * u[0];
        return f;
    };
    m.eigen = [](const Vec& u) {
        EigenSystem e;
        e.values = u;
        e.right = Mat::Identity(1, 1);
        e.left = Mat::Identity(1, 1);
        return e;
    };
    m.eigenvalues = [](const Vec& u) { return u; };
    m.wave_speed = [](const Vec& u) { return std::abs(u[0]); };
    return m;
}

double euler_pressure(const Vec& u, double gamma) {
    return (gamma - 1.0) * (u[2] - 0.5 * u[1] * u[1] / u[0]);
}

EigenSystem euler_eigen(const Vec& u, const GasParams& gas) {
    GasState s = gas_state(u, gas.gamma);
    EigenSystem e;
    e.values.resize(3);
    e.values << s.u - s.a, s.u, s.u + s.a;
    e.right.resize(3, 3);
    e.left.resize(3, 3);
    euler_blocks(s, gas.gamma, e.right, e.left);
    return e;
}

ModelDescriptor euler_model(const GasParams& gas) {
    ModelDescriptor m;
    m.name = "euler";
    m.n_vars = 3;
    m.var_names = {"rho", "rho_u", "rho_E"};
    double g = gas.gamma;
    m.flux = [g](const Vec& u) { return euler_flux(u, g); };
    m.eigen = [gas](const Vec& u) { return euler_eigen(u, gas); };
    m.eigenvalues = [g](const Vec& u) {
        GasState s = gas_state(u, g);
        Vec v(3);
        v << s.u - s.a, s.u, s.u + s.a;
        return v;
    };
    m.wave_speed = [g](const Vec& u) { return euler_speed(u, g); };
    return m;
}

EigenSystem diffusion_eigen(const DiffusionParams& params) {
    const double a = params.a_nu;
    EigenSystem e;
    e.values.resize(2);
    e.values << -a, a;
    e.right.resize(2, 2);
    e.right << 1.0, 1.0,
               a, -a;
    e.left.resize(2, 2);
    e.left << 0.5, 0.5 / a,
              0.5, -0.5 / a;
    return e;
}

ModelDescriptor diffusion_model(const DiffusionParams& params) {
    ModelDescriptor m;
    m.name = "diffusion";
    m.n_vars = 2;
    m.var_names = {"U", "P"};
    const double k = params.nu / params.relax;
    m.flux = [k](const Vec& u) {
        Vec f(2);
        f << -u[1], -k * u[0];
        return f;
    };
    EigenSystem fixed = diffusion_eigen(params);
    m.eigen = [fixed](const Vec&) { return fixed; };
    m.eigenvalues = [fixed](const Vec&) { return fixed.values; };
    const double a = params.a_nu;
    m.wave_speed = [a](const Vec&) { return a; };
    m.has_source = true;
    m.source_matrix = Mat::Zero(2, 2);
    m.source_matrix(1, 1) = -1.0 / params.relax;
    if (params.ext_source) {
        SourceFn s1 = params.ext_source;
        m.external = [s1](double x, double) {
            Vec s(2);
            s << s1(x), 0.0;
            return s;
        };
    }
    m.relaxation_vars = {1};
    return m;
}

EigenSystem ns_inviscid_eigen(const Vec& u, const GasParams& gas) {
    GasState s = gas_state(u, gas.gamma);
    Vec values(5);
    values << s.u - s.a, s.u, s.u + s.a, 0.0, 0.0;
    Mat r = Mat::Zero(5, 5);
    Mat l = Mat::Zero(5, 5);
    Mat r3(3, 3), l3(3, 3);
    euler_blocks(s, gas.gamma, r3, l3);
    r.topLeftCorner(3, 3) = r3;
    l.topLeftCorner(3, 3) = l3;
    r(3, 3) = r(4, 4) = 1.0;
    l(3, 3) = l(4, 4) = 1.0;
    return sorted(values, r, l);
}

ModelDescriptor ns_inviscid_model(const GasParams& gas) {
    ModelDescriptor m;
    m.name = "ns_inviscid";
    m.n_vars = 5;
    m.var_names = {"rho", "rho_u", "rho_E", "tau", "q"};
    double g = gas.gamma;
    m.flux = [g](const Vec& u) { return euler_flux(u, g); };
    m.eigen = [gas](const Vec& u) { return ns_inviscid_eigen(u, gas); };
    m.eigenvalues = [g](const Vec& u) {
        GasState s = gas_state(u, g);
        Vec v(5);
        v << s.u - s.a, s.u, s.u + s.a, 0.0, 0.0;
        return sorted_values(v);
    };
    m.wave_speed = [g](const Vec& u) { return euler_speed(u, g); };
    m.family_eigen = [gas](const Vec& u) {
        GasState s = gas_state(u, gas.gamma);
        EigenSystem e;
        e.values.resize(5);
        e.values << s.u - s.a, s.u, s.u + s.a, 0.0, 0.0;
        e.right = Mat::Zero(5, 5);
        e.left = Mat::Zero(5, 5);
        Mat r3(3, 3), l3(3, 3);
        euler_blocks(s, gas.gamma, r3, l3);
        e.right.topLeftCorner(3, 3) = r3;
        e.left.topLeftCorner(3, 3) = l3;
        e.right(3, 3) = e.right(4, 4) = 1.0;
        e.left(3, 3) = e.left(4, 4) = 1.0;
        return e;
    };
    m.family_eigenvalues = [g](const Vec& u) {
        GasState s = gas_state(u, g);
        Vec v(5);
        v << s.u - s.a, s.u, s.u + s.a, 0.0, 0.0;
        return v;
    };
    return m;
}

Vec ns_viscous_eigenvalues_natural(double rho, const GasParams& gas) {
    ViscousCoeffs c = viscous_speeds(rho, gas);
    Vec v(5);
    v << -c.av, c.av, -c.ah, c.ah, 0.0;
    return v;
}

Mat ns_viscous_jacobian(const Vec& u, const GasParams& gas) {
    const double rho = u[0], vel = u[1] / u[0], e = u[2] / u[0], tau = u[3];
    ViscousCoeffs c = viscous_speeds(rho, gas);
    const double av2 = c.av * c.av, ah2 = c.ah * c.ah;
    Mat a = Mat::Zero(5, 5);
    a(1, 3) = -1.0;
    a(2, 0) = vel * tau / rho;
    a(2, 1) = -tau / rho;
    a(2, 3) = -vel;
    a(2, 4) = 1.0;
    a(3, 0) = av2 * vel;
    a(3, 1) = -av2;
    a(4, 0) = ah2 * (vel * vel - e);
    a(4, 1) = -ah2 * vel;
    a(4, 2) = ah2;
    return a;
}

EigenSystem ns_viscous_eigen(const Vec& u, const GasParams& gas) {
    const double rho = u[0];
    if (!(rho > 0.0)) throw Error("inadmissible state: non-positive density");
    const double vel = u[1] / rho, e = u[2] / rho, tau = u[3];
    ViscousCoeffs c = viscous_speeds(rho, gas);
    const double prn = (c.av * c.av) / (c.ah * c.ah);
    if (!std::isfinite(prn) || std::abs(prn - 1.0) < 1e-12) throw Error("degenerate Prandtl ratio");
    const double gm1 = gas.gamma - 1.0;
    const double tn = tau / (prn - 1.0);
    const double ap = tau * prn / (c.av * (prn - 1.0));
    Mat r(5, 5);
    r << 0.0,          0.0,          0.0,           0.0,          1.0,
         rho,          rho,          0.0,           0.0,          vel,
         rho * vel + ap, rho * vel - ap, 1.0 / gm1,  1.0 / gm1,    e,
         rho * c.av,   -rho * c.av,  0.0,           0.0,          0.0,
         -tn,          -tn,          -c.ah / gm1,   c.ah / gm1,   0.0;
    Mat l = r.fullPivLu().inverse();
    Vec values(5);
    values << -c.av, c.av, -c.ah, c.ah, 0.0;
    return sorted(values, r, l);
}

ModelDescriptor ns_viscous_model(const GasParams& gas, std::function<Vec(double, double)> external) {
    ModelDescriptor m;
    m.name = "ns_viscous";
    m.n_vars = 5;
    m.var_names = {"rho", "rho_u", "rho_E", "tau", "q"};
    const double g = gas.gamma;
    const double kv = gas.mu_v() / gas.relax_v;
    const double kh = gas.mu_h() / gas.relax_h;
    m.flux = [g, kv, kh](const Vec& u) {
        const double rho = u[0], vel = u[1] / u[0];
        const double p = (g - 1.0) * (u[2] - 0.5 * u[1] * vel);
        Vec f(5);
        f << 0.0, -u[3], -u[3] * vel + u[4], -kv * vel, kh * p / ((g - 1.0) * rho);
        return f;
    };
    m.eigen = [gas](const Vec& u) { return ns_viscous_eigen(u, gas); };
    m.eigenvalues = [gas](const Vec& u) { return sorted_values(ns_viscous_eigenvalues_natural(u[0], gas)); };
    m.wave_speed = [gas](const Vec& u) {
        ViscousCoeffs c = viscous_speeds(u[0], gas);
        return std::max(c.av, c.ah);
    };
    m.has_source = true;
    m.source_matrix = Mat::Zero(5, 5);
    m.source_matrix(3, 3) = -1.0 / gas.relax_v;
    m.source_matrix(4, 4) = -1.0 / gas.relax_h;
    m.external = std::move(external);
    m.relaxation_vars = {3, 4};
    return m;
}

Mat ns_primitive_jacobian(const Vec& q, const GasParams& gas) {
    const double rho = q[0], u = q[1], p = q[2], tau = q[3];
    const double g = gas.gamma;
    const double a2 = g * p / rho;
    ViscousCoeffs c = viscous_speeds(rho, gas);
    const double av2 = c.av * c.av, ah2 = c.ah * c.ah;
    Mat b = Mat::Zero(5, 5);
    b(0, 0) = u;
    b(0, 1) = rho;
    b(1, 1) = u;
    b(1, 2) = 1.0 / rho;
    b(1, 3) = -1.0 / rho;
    b(2, 1) = rho * a2 - (g - 1.0) * tau;
    b(2, 2) = u;
    b(2, 4) = g - 1.0;
    b(3, 1) = -rho * av2;
    b(4, 0) = -ah2 * a2 / (g * (g - 1.0));
    b(4, 2) = ah2 / (g - 1.0);
    return b;
}

Vec prim_to_cons(const Vec& q, const GasParams& gas) {
    if (!(q[0] > 0.0) || !(q[2] > 0.0)) throw Error("inadmissible state");
    Vec u = q;
    u[1] = q[0] * q[1];
    u[2] = q[2] / (gas.gamma - 1.0) + 0.5 * q[0] * q[1] * q[1];
    return u;
}

Vec cons_to_prim(const Vec& u, const GasParams& gas) {
    GasState s = gas_state(u, gas.gamma);
    Vec q = u;
    q[1] = s.u;
    q[2] = s.p;
    return q;
}

namespace {

struct PolyCoeffs {
    double c1, c2, c3, c4;
};

PolyCoeffs char_poly_terms(const Vec& q, const GasParams& gas) {
    const double rho = q[0], p = q[2], tau = q[3];
    const double g = gas.gamma;
    const double a2 = g * p / rho;
    ViscousCoeffs c = viscous_speeds(rho, gas);
    const double av2 = c.av * c.av, ah2 = c.ah * c.ah;
    return {av2 * ah2, ah2 + av2, -ah2 * a2 / g, a2 - (g - 1.0) * tau / rho};
}

std::vector<double> monomials(double u, const PolyCoeffs& c) {
    return {c.c1 * u,
            -c.c1 + c.c2 * u * u + c.c3,
            -2.0 * c.c2 * u + u * u * u - c.c4 * u,
            c.c2 - 3.0 * u * u + c.c4,
            3.0 * u,
            -1.0};
}

}  // namespace

double ns_char_poly(const Vec& q, const GasParams& gas, double lambda) {
    PolyCoeffs c = char_poly_terms(q, gas);
    const double u = q[1];
    const double d = u - lambda;
    return d * c.c1 + lambda * d * d * c.c2 + lambda * c.c3 + lambda * lambda * d * d * d -
           lambda * lambda * d * c.c4;
}

std::vector<double> ns_char_poly_coeffs(const Vec& q, const GasParams& gas) {
    return monomials(q[1], char_poly_terms(q, gas));
}

std::vector<SweepRange> default_root_ranges() {
    return {{0.0, 5.0}, {0.1, 10.0}, {0.1, 10.0}, {0.1, 20.0}, {-3.0, 3.0}};
}

RootsReport real_roots_sweep(const std::vector<SweepRange>& ranges, int samples_per_var,
                             double gamma, double rel_tol, double stress_scale) {
    if (samples_per_var < 2) throw Error("real_roots_sweep: need at least two samples per variable");
    if (ranges.size() != 5) throw Error("real_roots_sweep: five ranges expected");
    auto sample = [&](int var, int i) {
        return ranges[var].lo + (ranges[var].hi - ranges[var].lo) * i / (samples_per_var - 1);
    };
    // Reference state: rho_inf = 1, a_inf = 1, p = rho_inf a_inf^2 / gamma.
    const double p_ref = 1.0 / gamma;
    RootsReport rep;
    const int s = samples_per_var;
    for (int i0 = 0; i0 < s; ++i0)
        for (int i1 = 0; i1 < s; ++i1)
            for (int i2 = 0; i2 < s; ++i2)
                for (int i3 = 0; i3 < s; ++i3)
                    for (int i4 = 0; i4 < s; ++i4) {
                        const double u = sample(0, i0);
                        const double nu_v = sample(1, i1);
                        const double nu_h = sample(2, i2);
                        const double rho = sample(3, i3);
                        const double tau = stress_scale * sample(4, i4);
                        const double a2 = gamma * p_ref / rho;
                        const double av2 = nu_v / rho, ah2 = nu_h / rho;
                        PolyCoeffs c{av2 * ah2, ah2 + av2, -ah2 * a2 / gamma, a2 - (gamma - 1.0) * tau / rho};
                        std::vector<double> mono = monomials(u, c);
                        Eigen::Matrix<double, 5, 5> comp = Eigen::Matrix<double, 5, 5>::Zero();
                        for (int k = 1; k < 5; ++k) comp(k, k - 1) = 1.0;
                        for (int k = 0; k < 5; ++k) comp(k, 4) = -mono[k] / mono[5];
                        Eigen::EigenSolver<Eigen::Matrix<double, 5, 5>> es(comp, false);
                        auto roots = es.eigenvalues();
                        double im = 0.0, re = 0.0;
                        for (int k = 0; k < 5; ++k) {
                            im = std::max(im, std::abs(roots[k].imag()));
                            re = std::max(re, std::abs(roots[k].real()));
                        }
                        rep.cases++;
                        rep.max_imag = std::max(rep.max_imag, im);
                        const double rel = re > 0.0 ? im / re : im;
                        rep.max_rel_imag = std::max(rep.max_rel_imag, rel);
                        if (rel >= rel_tol) rep.all_real = false;
                    }
    return rep;
}

}  // namespace af
