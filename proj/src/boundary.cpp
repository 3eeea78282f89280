#include "af/boundary.hpp"

#include <cmath>

namespace af {

BoundarySpec periodic_bc() {
    return {{GhostKind::periodic, {}}, {GhostKind::periodic, {}}};
}

BoundarySpec transmissive_bc() {
    return {{GhostKind::transmissive, {}}, {GhostKind::transmissive, {}}};
}

GhostCells fill_ghosts(const FieldState& state, const BoundarySpec& bc) {
    const int n = state.n_cells;
    GhostCells g;
    switch (bc.left.kind) {
        case GhostKind::periodic:
            g.left_avg = state.avg_vec(n - 1);
            g.left_outer_face = state.face_vec(n - 1);
            break;
        case GhostKind::transmissive:
            g.left_avg = state.avg_vec(0);
            g.left_outer_face = state.face_vec(1);
            break;
        case GhostKind::dirichlet:
            g.left_avg = bc.left.dirichlet_state;
            g.left_outer_face = bc.left.dirichlet_state;
            break;
    }
    switch (bc.right.kind) {
        case GhostKind::periodic:
            g.right_avg = state.avg_vec(0);
            g.right_outer_face = state.face_vec(1);
            break;
        case GhostKind::transmissive:
            g.right_avg = state.avg_vec(n - 1);
            g.right_outer_face = state.face_vec(n - 1);
            break;
        case GhostKind::dirichlet:
            g.right_avg = bc.right.dirichlet_state;
            g.right_outer_face = bc.right.dirichlet_state;
            break;
    }
    return g;
}

namespace {

bool incoming(Side side, double lam) {
    return side == Side::left ? lam > 0.0 : lam < 0.0;
}

double boundary_x(Side side, const Reconstruction& recon) {
    const Grid& g = recon.grid();
    return side == Side::left ? g.x_min : g.x_max;
}

// Face state from characteristic increments about u_ref; `zero_family` optionally
// replaces the increment of a family with a prescribed value.
Vec assemble_face(Side side, double dt, const Reconstruction& recon, const ModelDescriptor& model,
                  const Vec& ghost_state, double t_n, const Vec& u_ref, int zero_family = -1,
                  double zero_increment = 0.0) {
    const double x = boundary_x(side, recon);
    EigenSystem es = model.eigen(u_ref);
    const int m = static_cast<int>(es.values.size());
    Vec out = u_ref;
    for (int k = 0; k < m; ++k) {
        double dw;
        if (k == zero_family) {
            dw = zero_increment;
        } else if (incoming(side, es.values[k])) {
            dw = es.left.row(k).dot(ghost_state - u_ref);
        } else {
            Vec uf = recon.eval(x - es.values[k] * dt);
            dw = es.left.row(k).dot(uf - u_ref) +
                 characteristic_source_integral(x, dt, k, es, recon, model, t_n);
        }
        out += es.right.col(k) * dw;
    }
    return out;
}

}  // namespace

Vec characteristic_face(Side side, double dt, const Reconstruction& recon,
                        const ModelDescriptor& model, const Vec& ghost_state, double t_n) {
    Vec u_ref = recon.eval(boundary_x(side, recon));
    return assemble_face(side, dt, recon, model, ghost_state, t_n, u_ref);
}

Vec diffusion_boundary_face(Side side, double dt, const Reconstruction& recon,
                            const DiffusionParams& params, const ModelDescriptor& model,
                            double u0, double p0, double t_n) {
    (void)params;
    Vec ghost(2);
    ghost << u0, p0;
    return characteristic_face(side, dt, recon, model, ghost, t_n);
}

BoundaryFace diffusion_boundary_faces(Side side, double dt, const Reconstruction& recon,
                                      const DiffusionParams& params,
                                      const ModelDescriptor& model, double u0, double p0,
                                      double t_n) {
    return {diffusion_boundary_face(side, 0.5 * dt, recon, params, model, u0, p0, t_n),
            diffusion_boundary_face(side, dt, recon, params, model, u0, p0, t_n)};
}

BoundaryFace euler_characteristic_bc(Side side, const Reconstruction& recon,
                                     const ModelDescriptor& model, const Vec& ghost_state,
                                     double dt) {
    return {characteristic_face(side, 0.5 * dt, recon, model, ghost_state, 0.0),
            characteristic_face(side, dt, recon, model, ghost_state, 0.0)};
}

ViscousFaceValues ns_viscous_boundary(Side side, const Reconstruction& recon,
                                      const ModelDescriptor& model, const GasParams& gas,
                                      const Vec& ghost_prim, double rho_face, double dt,
                                      double t_n) {
    const double x = boundary_x(side, recon);
    Vec ghost = prim_to_cons(ghost_prim, gas);
    // Reference state at interior point d, the foot of the outgoing a_v characteristic.
    Vec here = recon.eval(x);
    const double av = ns_viscous_eigenvalues_natural(here[0], gas)[1];
    Vec u_ref = recon.eval(side == Side::left ? x + av * dt : x - av * dt);
    EigenSystem es = model.eigen(u_ref);
    int zero = 0;
    for (int k = 1; k < 5; ++k)
        if (std::abs(es.values[k]) < std::abs(es.values[zero])) zero = k;
    // The zero-speed family carries density alone.
    Vec face = assemble_face(side, dt, recon, model, ghost, t_n, u_ref, zero, rho_face - u_ref[0]);
    ViscousFaceValues out;
    out.u = face[1] / face[0];
    out.tau = face[3];
    out.q = face[4];
    out.p = (gas.gamma - 1.0) * (face[2] - 0.5 * face[1] * out.u);
    return out;
}

ViscousFaceValues ns_viscous_boundary_printed(const ViscousBoundaryInputs& in,
                                              const GasParams& gas, const Vec& ref_prim) {
    const double g = gas.gamma, gm1 = g - 1.0;
    const double rho = ref_prim[0], u = ref_prim[1], p = ref_prim[2], tau = ref_prim[3];
    const Vec nat = ns_viscous_eigenvalues_natural(rho, gas);
    const double av = nat[1], ah = nat[3];
    const double prn = av * av / (ah * ah);
    const double a2 = g * p / rho;
    const double tn = tau / (prn - 1.0);
    const double bh = gm1 / (2.0 * rho * ah);
    const double bv = gm1 / (2.0 * rho * av);
    const double ap = tau * prn / (av * (prn - 1.0));
    const double kin = u * u / 2.0 - a2 / (g * gm1);
    const double cp = u * tn + rho * ah * kin;
    const double cm = u * tn - rho * ah * kin;
    const double tp = tn + rho * ah * u;
    const double tm = tn - rho * ah * u;

    ViscousFaceValues f;
    f.u = 0.5 * (in.ud + in.u0) + 0.5 * u * (2.0 * in.rho_face - in.rho0 - in.rhod) +
          rho * bv / gm1 * (in.taud - in.tau0) + rho * in.i1;
    f.tau = in.tau0 + gm1 * u / (2.0 * rho * bv) * (in.rho0 - in.rho_face) +
            gm1 / (2.0 * rho * bv) * (f.u - in.u0);
    f.q = 0.5 * (in.q0 + in.qd) + cp * bh / (2.0 * rho * bv) * (in.rho_face - in.rhod) -
          cm * bh / (2.0 * rho * bv) * in.rho0 + gm1 / (4.0 * rho * bv) * (in.p0 - in.pd) -
          tp * bh / (2.0 * rho * bv) * (f.u - in.ud) - tm * bh / (2.0 * rho * bv) * (f.u - in.u0) +
          ap / (2.0 * rho) * (in.taud - in.tau0) - in.i3 / (2.0 * rho * bv);
    f.p = in.p0 + 2.0 * cm * bh / gm1 * (in.rho_face - in.rho0) - 2.0 * tm * bh / gm1 * (f.u - in.u0) +
          2.0 * ap * bv / gm1 * (f.tau - in.tau0);
    return f;
}

}  // namespace af
