#pragma once

#include <functional>
#include <string>
#include <vector>

#include "af/types.hpp"

namespace af {

struct EigenSystem {
    Vec values;  // ascending
    Mat right;   // columns R_k
    Mat left;    // rows L_k
};

struct GasParams {
    double gamma = 1.4;
    double prandtl = 0.72;
    double mu = 0.0;
    double relax_v = 1.0;
    double relax_h = 1.0;

    double mu_v() const { return 4.0 * mu / 3.0; }
    double mu_h() const { return gamma * mu / prandtl; }
};

// Relaxation times T = L^2 / nu evaluated at a reference density.
GasParams make_gas_params(double mu, double rho_ref = 1.0, double length = 1.0 / (2.0 * 3.14159265358979323846),
                          double gamma = 1.4, double prandtl = 0.72);

using SourceFn = std::function<double(double x)>;

struct DiffusionParams {
    double nu = 1.0;
    double relax = 1.0;
    double a_nu = 1.0;
    SourceFn ext_source;
};

DiffusionParams make_diffusion_params(double nu, double relax, SourceFn s1 = {});

struct ModelDescriptor {
    std::string name;
    int n_vars = 1;
    std::vector<std::string> var_names;
    std::function<Vec(const Vec&)> flux;
    std::function<EigenSystem(const Vec&)> eigen;
    std::function<Vec(const Vec&)> eigenvalues;
    std::function<double(const Vec&)> wave_speed;
    // Optional family-ordered eigen data for the evolution operators; needed when the
    // ascending order of two families can swap between nearby states.
    std::function<EigenSystem(const Vec&)> family_eigen;
    std::function<Vec(const Vec&)> family_eigenvalues;

    // P*S = K*U + external(x, t)
    bool has_source = false;
    Mat source_matrix;
    std::function<Vec(double x, double t)> external;
    // Components whose equations are pure relaxation (no physical time derivative
    // in the parent parabolic model).
    std::vector<int> relaxation_vars;

    Vec precond_source(const Vec& u, double x, double t) const;
    EigenSystem evolution_eigen(const Vec& u) const { return family_eigen ? family_eigen(u) : eigen(u); }
    Vec evolution_eigenvalues(const Vec& u) const {
        return family_eigenvalues ? family_eigenvalues(u) : eigenvalues(u);
    }
    Vec external_source(double x, double t) const;
};

ModelDescriptor burgers_model();
ModelDescriptor euler_model(const GasParams& gas);
ModelDescriptor diffusion_model(const DiffusionParams& params);
ModelDescriptor ns_inviscid_model(const GasParams& gas);
ModelDescriptor ns_viscous_model(const GasParams& gas,
                                 std::function<Vec(double, double)> external = {});

double euler_pressure(const Vec& u, double gamma);
EigenSystem euler_eigen(const Vec& u, const GasParams& gas);
EigenSystem ns_inviscid_eigen(const Vec& u, const GasParams& gas);
EigenSystem ns_viscous_eigen(const Vec& u, const GasParams& gas);
EigenSystem diffusion_eigen(const DiffusionParams& params);

// Viscous eigenvalues in family order (-a_v, +a_v, -a_h, +a_h, 0).
Vec ns_viscous_eigenvalues_natural(double rho, const GasParams& gas);
// P dF^V/dU assembled entry by entry.
Mat ns_viscous_jacobian(const Vec& u, const GasParams& gas);
// Full primitive Jacobian B for Q = (rho, u, p, tau, q).
Mat ns_primitive_jacobian(const Vec& q, const GasParams& gas);

// Primitive (rho, u, p[, tau, q]) <-> conservative (rho, rho u, rho E[, tau, q]).
Vec prim_to_cons(const Vec& q, const GasParams& gas);
Vec cons_to_prim(const Vec& u, const GasParams& gas);

double ns_char_poly(const Vec& q, const GasParams& gas, double lambda);
// Monomial coefficients c[0..5] of the characteristic polynomial, c[d] * lambda^d.
std::vector<double> ns_char_poly_coeffs(const Vec& q, const GasParams& gas);

struct SweepRange {
    double lo;
    double hi;
};

struct RootsReport {
    long long cases = 0;
    bool all_real = true;
    double max_imag = 0.0;
    double max_rel_imag = 0.0;  // max over cases of max|Im| / max|Re|
};

std::vector<SweepRange> default_root_ranges();
// The fifth range is tau in units of mu_inf a_inf / L_inf; stress_scale is that unit
// relative to rho_inf a_inf^2, i.e. 1/Re_inf.
RootsReport real_roots_sweep(const std::vector<SweepRange>& ranges, int samples_per_var,
                             double gamma = 1.4, double rel_tol = 1e-8, double stress_scale = 0.01);

}  // namespace af
