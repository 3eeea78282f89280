#pragma once

#include <functional>

#include "af/models.hpp"
#include "af/reconstruction.hpp"

namespace af {

struct FootTrace {
    double foot = 0.0;
    int iterations_used = 0;
    bool converged = false;
};

constexpr int kFootIterations = 3;

FootTrace trace_foot_scalar(double x_face, double dt, const Reconstruction& recon,
                            const std::function<double(double)>& speed,
                            int k_max = kFootIterations);

double evolve_scalar(double x_face, double dt, const Reconstruction& recon,
                     const ModelDescriptor& model, int k_max = kFootIterations);

Vec evolve_system(double x_face, double dt, const Reconstruction& recon,
                  const ModelDescriptor& model);

// t_n is the time level of the frozen reconstruction; the external part of the
// source is sampled at the time each quadrature node is visited.
Vec evolve_system_with_source(double x_face, double dt, const Reconstruction& recon,
                              const ModelDescriptor& model, double t_n = 0.0);

Vec evolve_diffusion_exact(double x_face, double dt, const Reconstruction& recon,
                           const DiffusionParams& params);

// Integral over one characteristic of S^w_k / lambda_k, Simpson in space along the
// path from the foot to x_face (I_k in the boundary relations).
double characteristic_source_integral(double x_face, double dt, int k, const EigenSystem& frozen,
                                      const Reconstruction& recon, const ModelDescriptor& model,
                                      double t_n);

// Evolve every face j = 0..N to t + dt and t + dt/2.
struct FaceEvolution {
    std::vector<double> half;  // (N+1) x m
    std::vector<double> full;
};

FaceEvolution evolve_faces(const Reconstruction& recon, const ModelDescriptor& model, double dt,
                           double t_n, Exec exec);

}  // namespace af
