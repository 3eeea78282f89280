#include "af/evolution.hpp"

#include <cmath>
#include <mutex>
#include <string>

namespace af {

FootTrace trace_foot_scalar(double x_face, double dt, const Reconstruction& recon,
                            const std::function<double(double)>& speed, int k_max) {
    FootTrace tr;
    tr.foot = x_face;
    double tol = 1e-12 * recon.grid().dx;
    double u;
    for (int k = 0; k < k_max; ++k) {
        recon.eval_into(tr.foot, &u);
        double next = x_face - speed(u) * dt;
        double change = std::abs(next - tr.foot);
        tr.foot = next;
        tr.iterations_used = k + 1;
        if (change < tol) {
            tr.converged = true;
            break;
        }
    }
    // Validate the final foot against the stencil.
    recon.eval_into(tr.foot, &u);
    return tr;
}

double evolve_scalar(double x_face, double dt, const Reconstruction& recon,
                     const ModelDescriptor& model, int k_max) {
    Vec tmp(1);
    auto speed = [&](double u) {
        tmp[0] = u;
        return model.evolution_eigenvalues(tmp)[0];
    };
    FootTrace tr = trace_foot_scalar(x_face, dt, recon, speed, k_max);
    double u;
    recon.eval_into(tr.foot, &u);
    return u;
}

namespace {

using RowVec = Eigen::Matrix<double, 1, Eigen::Dynamic, Eigen::RowMajor, 1, kMaxVars>;

// S^w_k / lambda_k at one point, with the ratio lambda_k / lambda_k(pt) taken as 1 when
// the local eigenvalue vanishes.
struct SourceQuad {
    const Reconstruction& recon;
    const ModelDescriptor& model;
    double eps;

    // L_k . PS(pt) * lam / lam_k(pt)
    double scaled(const RowVec& lk,
                  double lam, int k, double x, double t) const {
        Vec u = recon.eval(x);
        Vec ps = model.precond_source(u, x, t);
        double s = lk.dot(ps);
        double lam_pt = model.evolution_eigenvalues(u)[k];
        if (std::abs(lam_pt) < eps) return s;
        return s * lam / lam_pt;
    }
};

double eps_scale(const ModelDescriptor& model, const Vec& u) {
    double a = model.wave_speed(u);
    return 1e-8 * (a > 0.0 ? a : 1.0);
}

// Simpson source term of one characteristic family over a path whose displacement over
// dt is `shift`; lam is the family eigenvalue used in the prefactor.
double family_source(const SourceQuad& q,
                     const RowVec& lk,
                     double lam, int k, double x, double shift, double dt, double t_n) {
    if (std::abs(lam) < q.eps) {
        Vec u = q.recon.eval(x);
        return dt * lk.dot(q.model.precond_source(u, x, t_n));
    }
    double foot = x - shift;
    double half = x - 0.5 * shift;
    double s0 = q.scaled(lk, lam, k, foot, t_n);
    double s1 = q.scaled(lk, lam, k, half, t_n + 0.5 * dt);
    double s2 = q.scaled(lk, lam, k, x, t_n + dt);
    return dt / 6.0 * (s0 + 4.0 * s1 + s2);
}

Vec evolve_pc(double x, double dt, const Reconstruction& recon, const ModelDescriptor& model,
              bool with_source, double t_n) {
    const int m = recon.n_vars();
    Vec u_face = recon.eval(x);
    EigenSystem es = model.evolution_eigen(u_face);
    SourceQuad q{recon, model, eps_scale(model, u_face)};
    with_source = with_source && model.has_source;

    // Predictors.
    std::array<Vec, kMaxVars> pred;
    for (int l = 0; l < m; ++l) {
        Vec acc = Vec::Zero(m);
        for (int k = 0; k < m; ++k) {
            double shift = 0.5 * (es.values[l] + es.values[k]) * dt;
            Vec uf = recon.eval(x - shift);
            double w = es.left.row(k).dot(uf);
            if (with_source) w += family_source(q, es.left.row(k), es.values[k], k, x, shift, dt, t_n);
            acc += es.right.col(k) * w;
        }
        pred[l] = acc;
    }

    // Corrector: each family's left eigenvector comes from its own predictor, and the new
    // state solves L*_k U = L*_k U(foot_k) (+ source) for all k, i.e. R* = (L*)^-1.
    Mat lstar(m, m);
    Vec rhs(m);
    for (int k = 0; k < m; ++k) {
        EigenSystem ek = model.evolution_eigen(pred[k]);
        double lam = ek.values[k];
        double shift = lam * dt;
        Vec uf = recon.eval(x - shift);
        lstar.row(k) = ek.left.row(k);
        double w = ek.left.row(k).dot(uf);
        if (with_source) w += family_source(q, ek.left.row(k), lam, k, x, shift, dt, t_n);
        rhs[k] = w;
    }
    Vec out = lstar.partialPivLu().solve(rhs);
    return out;
}

}  // namespace

Vec evolve_system(double x_face, double dt, const Reconstruction& recon,
                  const ModelDescriptor& model) {
    return evolve_pc(x_face, dt, recon, model, false, 0.0);
}

Vec evolve_system_with_source(double x_face, double dt, const Reconstruction& recon,
                              const ModelDescriptor& model, double t_n) {
    return evolve_pc(x_face, dt, recon, model, true, t_n);
}

double characteristic_source_integral(double x_face, double dt, int k, const EigenSystem& frozen,
                                      const Reconstruction& recon, const ModelDescriptor& model,
                                      double t_n) {
    if (!model.has_source) return 0.0;
    Vec u = recon.eval(x_face);
    SourceQuad q{recon, model, eps_scale(model, u)};
    double lam = frozen.values[k];
    return family_source(q, frozen.left.row(k), lam, k, x_face, lam * dt, dt, t_n);
}

Vec evolve_diffusion_exact(double x_face, double dt, const Reconstruction& recon,
                           const DiffusionParams& params) {
    const double a = params.a_nu;
    const double t = params.relax;
    const double s1 = params.ext_source ? params.ext_source(x_face) : 0.0;
    auto w1 = [&](const Vec& u) { return 0.5 * u[0] - 0.5 * u[1] / a; };
    auto w2 = [&](const Vec& u) { return 0.5 * u[0] + 0.5 * u[1] / a; };
    Vec here = recon.eval(x_face);
    Vec foot1 = recon.eval(x_face - a * dt);
    Vec foot2 = recon.eval(x_face + a * dt);
    const double e = std::exp(-dt / (2.0 * t));
    double w1n = w1(foot1) * e + (1.0 - e) * (w2(here) + s1 * t);
    double w2n = w2(foot2) * e + (1.0 - e) * (w1(here) + s1 * t);
    Vec out(2);
    out << w1n + w2n, a * (w2n - w1n);
    return out;
}

FaceEvolution evolve_faces(const Reconstruction& recon, const ModelDescriptor& model, double dt,
                           double t_n, Exec exec) {
    const Grid& g = recon.grid();
    const int m = recon.n_vars();
    const int nf = g.n_cells + 1;
    FaceEvolution fe;
    fe.half.assign(static_cast<size_t>(nf) * m, 0.0);
    fe.full.assign(static_cast<size_t>(nf) * m, 0.0);

    auto one = [&](int j) {
        const double x = g.face_coords[j];
        if (m == 1 && !model.has_source) {
            fe.half[j] = evolve_scalar(x, 0.5 * dt, recon, model);
            fe.full[j] = evolve_scalar(x, dt, recon, model);
            return;
        }
        Vec h = evolve_pc(x, 0.5 * dt, recon, model, true, t_n);
        Vec f = evolve_pc(x, dt, recon, model, true, t_n);
        for (int v = 0; v < m; ++v) {
            fe.half[static_cast<size_t>(j) * m + v] = h[v];
            fe.full[static_cast<size_t>(j) * m + v] = f[v];
        }
    };
    auto wrap = [&](int j, const Error& e) {
        return Error("face " + std::to_string(j) + " at x=" + std::to_string(g.face_coords[j]) + ": " + e.what());
    };

    if (exec == Exec::serial) {
        for (int j = 0; j < nf; ++j) {
            try {
                one(j);
            } catch (const Error& e) {
                throw wrap(j, e);
            }
        }
        return fe;
    }

    std::mutex mu;
    int bad = -1;
    std::string msg;
#pragma omp parallel for schedule(static)
    for (int j = 0; j < nf; ++j) {
        try {
            one(j);
        } catch (const Error& e) {
            std::lock_guard<std::mutex> lock(mu);
            if (bad < 0 || j < bad) {
                bad = j;
                msg = wrap(j, e).what();
            }
        }
    }
    if (bad >= 0) throw Error(msg);
    return fe;
}

}  // namespace af
