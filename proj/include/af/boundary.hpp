#pragma once

#include "af/evolution.hpp"
#include "af/mesh.hpp"
#include "af/models.hpp"
#include "af/reconstruction.hpp"

namespace af {

enum class GhostKind { periodic, transmissive, dirichlet };
enum class Side { left, right };

struct GhostSpec {
    GhostKind kind = GhostKind::periodic;
    Vec dirichlet_state;
};

struct BoundarySpec {
    GhostSpec left;
    GhostSpec right;
};

BoundarySpec periodic_bc();
BoundarySpec transmissive_bc();

GhostCells fill_ghosts(const FieldState& state, const BoundarySpec& bc);

struct BoundaryFace {
    Vec half;
    Vec full;
};

// (U, P) at one Dirichlet face from the incoming ghost characteristic and the outgoing
// interior characteristic; `model` supplies the source used for I_1 / I_2.
Vec diffusion_boundary_face(Side side, double dt, const Reconstruction& recon,
                            const DiffusionParams& params, const ModelDescriptor& model,
                            double u0, double p0, double t_n);

BoundaryFace diffusion_boundary_faces(Side side, double dt, const Reconstruction& recon,
                                      const DiffusionParams& params,
                                      const ModelDescriptor& model, double u0, double p0,
                                      double t_n);

// Characteristic face state: incoming increments from the ghost state, outgoing ones
// from the interior foot (plus the source integral when the model has one).
Vec characteristic_face(Side side, double dt, const Reconstruction& recon,
                        const ModelDescriptor& model, const Vec& ghost_state, double t_n);

BoundaryFace euler_characteristic_bc(Side side, const Reconstruction& recon,
                                     const ModelDescriptor& model, const Vec& ghost_state,
                                     double dt);

struct ViscousFaceValues {
    double u = 0.0;
    double tau = 0.0;
    double q = 0.0;
    double p = 0.0;
};

// Ghost primitive state is (rho0, u0, p0, tau0, q0); rho_face comes from the inviscid
// boundary treatment.
ViscousFaceValues ns_viscous_boundary(Side side, const Reconstruction& recon,
                                      const ModelDescriptor& model, const GasParams& gas,
                                      const Vec& ghost_prim, double rho_face, double dt,
                                      double t_n = 0.0);

// The four closed-form left-boundary relations in their printed arrangement.
struct ViscousBoundaryInputs {
    double rho0, u0, p0, tau0, q0;
    double rhod, ud, pd, taud, qd;
    double rho_face;
    double i1, i3;
};
ViscousFaceValues ns_viscous_boundary_printed(const ViscousBoundaryInputs& in,
                                              const GasParams& gas, const Vec& ref_prim);

}  // namespace af
