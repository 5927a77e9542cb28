#ifndef NKS3_MINIMAL_SURFACE_HPP
#define NKS3_MINIMAL_SURFACE_HPP

#include <array>
#include <vector>

#include "nks3/quat.hpp"
#include "nks3/sinh_gordon.hpp"

namespace nks3 {

// Adapted orthonormal frame (p, t1, t2, N) of a conformal minimal surface in
// S^3, as a 4x4 row block in R^4.
struct SurfaceFrame {
    Quat p, t1, t2, N;
};

// Frame convention: the surface associated to a sinh-Gordon solution carries
// the conformal factor |p_u|^2 = |p_v|^2 = 2 e^w, a diagonal second
// fundamental form II = diag(-2, +2) relative to N = p ((conj(p) p_u) x
// (conj(p) p_v)) / (2 e^w), and a vanishing mixed component. The structure
// equations below integrate exactly to Delta w = -8 sinh w.
inline std::array<Quat, 4> surface_rhs_u(const SurfaceFrame& F, double w, double wv) {
    const double lam = std::sqrt(2.0) * std::exp(0.5 * w);
    const double k = std::sqrt(2.0) * std::exp(-0.5 * w);
    return {F.t1 * lam, -1.0 * (F.p * lam) - F.t2 * (0.5 * wv) - F.N * k, F.t1 * (0.5 * wv),
            F.t1 * k};
}

inline std::array<Quat, 4> surface_rhs_v(const SurfaceFrame& F, double w, double wu) {
    const double lam = std::sqrt(2.0) * std::exp(0.5 * w);
    const double k = std::sqrt(2.0) * std::exp(-0.5 * w);
    return {F.t2 * lam, F.t2 * (0.5 * wu), -1.0 * (F.p * lam) - F.t1 * (0.5 * wu) + F.N * k,
            -1.0 * (F.t2 * k)};
}

namespace detail {

inline double orthonormalize_frame(SurfaceFrame& F) {
    // modified Gram-Schmidt; returns the largest pre-correction Gram deviation
    Quat* v[4] = {&F.p, &F.t1, &F.t2, &F.N};
    double drift = 0;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < i; ++j) {
            const double d = dot(*v[i], *v[j]);
            drift = std::max(drift, std::abs(d));
            *v[i] -= *v[j] * d;
        }
        const double n = norm(*v[i]);
        drift = std::max(drift, std::abs(n - 1.0));
        *v[i] = *v[i] / n;
    }
    return drift;
}

template <typename Rhs>
inline SurfaceFrame rk4_frame_step(const SurfaceFrame& F0, double s0, double h, const Rhs& rhs) {
    const auto add = [](const SurfaceFrame& F, const std::array<Quat, 4>& k, double c) {
        SurfaceFrame r;
        r.p = F.p + k[0] * c;
        r.t1 = F.t1 + k[1] * c;
        r.t2 = F.t2 + k[2] * c;
        r.N = F.N + k[3] * c;
        return r;
    };
    const auto k1 = rhs(F0, s0);
    const auto k2 = rhs(add(F0, k1, h / 2), s0 + h / 2);
    const auto k3 = rhs(add(F0, k2, h / 2), s0 + h / 2);
    const auto k4 = rhs(add(F0, k3, h), s0 + h);
    SurfaceFrame out = F0;
    out.p = F0.p + (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]) * (h / 6.0);
    out.t1 = F0.t1 + (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]) * (h / 6.0);
    out.t2 = F0.t2 + (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]) * (h / 6.0);
    out.N = F0.N + (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3]) * (h / 6.0);
    return out;
}

}  // namespace detail

// Surface samples on the half-step refinement of an (nu x nv, du x dv) grid,
// so that RK4 midpoints of grid-step integrations land on stored nodes.
// p_u, p_v come from the frame relation p_u = lambda t1, p_v = lambda t2.
struct MinimalSurfaceData {
    int nu = 0, nv = 0;   // coarse grid
    double du = 0, dv = 0;
    std::vector<SurfaceFrame> frames;  // refined (2nu-1) x (2nv-1)
    std::vector<double> lambda;        // conformal speed at refined nodes
    double max_frame_drift = 0;        // pre-orthonormalization drift per step

    int ru() const { return 2 * nu - 1; }
    int rv() const { return 2 * nv - 1; }
    const SurfaceFrame& frame_r(int i, int j) const { return frames[static_cast<size_t>(i) * rv() + j]; }
    SurfaceFrame& frame_r(int i, int j) { return frames[static_cast<size_t>(i) * rv() + j]; }
    double lambda_r(int i, int j) const { return lambda[static_cast<size_t>(i) * rv() + j]; }

    UnitQuat p_at(int i, int j) const { return renormalize(frame_r(2 * i, 2 * j).p); }
    Quat pu_at(int i, int j) const {
        return frame_r(2 * i, 2 * j).t1 * lambda_r(2 * i, 2 * j);
    }
    Quat pv_at(int i, int j) const {
        return frame_r(2 * i, 2 * j).t2 * lambda_r(2 * i, 2 * j);
    }
    Quat pu_r(int i, int j) const { return frame_r(i, j).t1 * lambda_r(i, j); }
    Quat pv_r(int i, int j) const { return frame_r(i, j).t2 * lambda_r(i, j); }
};

// Frame at the chart origin built from a point and two orthonormal tangent
// directions; the normal is oriented so the structure equations above apply.
inline SurfaceFrame adapted_frame(const Quat& p, const Quat& t1, const Quat& t2) {
    SurfaceFrame F;
    F.p = p;
    F.t1 = t1;
    F.t2 = t2;
    const ImQuat a2 = as_imaginary(conj(p) * t1, 1e-6);
    const ImQuat a3 = as_imaginary(conj(p) * t2, 1e-6);
    F.N = p * im_cross(a2, a3).quat();
    return F;
}

// Closed-form reference: the unit-speed Clifford torus p(u, v) = exp(v i)
// exp(u j), p_u = p j, p_v = i p. Conformal, |p_u| = |p_v| = 1, minimal
// (p_uu + p_vv = -2 p).
inline Quat clifford_p(double u, double v) {
    return exp_im(ImQuat{v, 0, 0}).q * exp_im(ImQuat{0, u, 0}).q;
}

inline MinimalSurfaceData clifford_torus_surface(int nu, int nv, double du, double dv) {
    MinimalSurfaceData s;
    s.nu = nu;
    s.nv = nv;
    s.du = du;
    s.dv = dv;
    s.frames.resize(static_cast<size_t>(s.ru()) * s.rv());
    s.lambda.assign(static_cast<size_t>(s.ru()) * s.rv(), 1.0);
    static const Quat qi{0, 1, 0, 0}, qj{0, 0, 1, 0};
    for (int i = 0; i < s.ru(); ++i)
        for (int j = 0; j < s.rv(); ++j) {
            const double u = 0.5 * i * du, v = 0.5 * j * dv;
            const Quat p = clifford_p(u, v);
            SurfaceFrame F;
            F.p = p;
            F.t1 = p * qj;
            F.t2 = qi * p;
            const ImQuat a2 = as_imaginary(conj(p) * F.t1, 1e-9);
            const ImQuat a3 = as_imaginary(conj(p) * F.t2, 1e-9);
            F.N = p * im_cross(a2, a3).quat();
            s.frame_r(i, j) = F;
        }
    return s;
}

// Integrates the adapted frame over the grid of the sinh-Gordon field:
// u-line at v = 0 first, then v-lines, at half the grid step, with
// re-orthonormalization after every step.
inline MinimalSurfaceData reconstruct_minimal_surface(const SinhGordonField& field,
                                                      const SurfaceFrame& init,
                                                      double drift_gate = 1e-6) {
    if (sinh_gordon_residual(field) > 1e-8)
        throw std::invalid_argument("sinh-Gordon residual too large for reconstruction");
    MinimalSurfaceData s;
    s.nu = field.nu;
    s.nv = field.nv;
    s.du = field.du;
    s.dv = field.dv;
    s.frames.resize(static_cast<size_t>(s.ru()) * s.rv());
    s.lambda.resize(static_cast<size_t>(s.ru()) * s.rv());

    const double hu = 0.5 * field.du, hv = 0.5 * field.dv;
    const auto rhs_u = [&field](const SurfaceFrame& F, double u, double v) {
        return surface_rhs_u(F, field.omega(u, v), field.omega_v(u, v));
    };
    const auto rhs_v = [&field](const SurfaceFrame& F, double u, double v) {
        return surface_rhs_v(F, field.omega(u, v), field.omega_u(u, v));
    };

    SurfaceFrame Fu = init;
    double drift = detail::orthonormalize_frame(Fu);
    for (int i = 0; i < s.ru(); ++i) {
        const double u = 0.5 * i * field.du;
        SurfaceFrame Fv = Fu;
        for (int j = 0; j < s.rv(); ++j) {
            const double v = 0.5 * j * field.dv;
            s.frame_r(i, j) = Fv;
            s.lambda[static_cast<size_t>(i) * s.rv() + j] =
                std::sqrt(2.0) * std::exp(0.5 * field.omega(u, v));
            if (j + 1 < s.rv()) {
                Fv = detail::rk4_frame_step(
                    Fv, v, hv,
                    [&](const SurfaceFrame& F, double vv) { return rhs_v(F, u, vv); });
                drift = std::max(drift, detail::orthonormalize_frame(Fv));
            }
        }
        if (i + 1 < s.ru()) {
            Fu = detail::rk4_frame_step(
                Fu, u, hu, [&](const SurfaceFrame& F, double uu) { return rhs_u(F, uu, 0.0); });
            drift = std::max(drift, detail::orthonormalize_frame(Fu));
        }
    }
    if (drift > drift_gate)
        throw std::runtime_error("frame drift beyond the per-step gate during reconstruction");
    s.max_frame_drift = drift;
    return s;
}

inline SurfaceFrame default_surface_init() {
    static const Quat qi{0, 1, 0, 0}, qj{0, 0, 1, 0};
    return adapted_frame(Quat{1, 0, 0, 0}, qj, qi);
}

}  // namespace nks3

#endif
