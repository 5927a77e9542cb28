#ifndef NKS3_BUILDER_HPP
#define NKS3_BUILDER_HPP

#include <memory>
#include <vector>

#include "nks3/immersion.hpp"
#include "nks3/invariants.hpp"
#include "nks3/minimal_surface.hpp"
#include "nks3/sinh_gordon.hpp"

namespace nks3 {

// Left-logarithmic coefficients of the q system: dq = q (A_u du + A_v dv +
// A_t dt), assembled from alpha2 = conj(p) p_u, alpha3 = conj(p) p_v and the
// sinh-Gordon data.
inline ImQuat t3_coeff_u(const ImQuat& a2, const ImQuat& a3, double w, double wv) {
    const ImQuat x = im_cross(a2, a3);
    return (std::exp(-w) / 8.0) * (4.0 * std::exp(w) * a2 - 4.0 * a3 + wv * x);
}

inline ImQuat t3_coeff_v(const ImQuat& a2, const ImQuat& a3, double w, double wu) {
    const ImQuat x = im_cross(a2, a3);
    return (-std::exp(-w) / 8.0) * (4.0 * a2 - 4.0 * std::exp(w) * a3 + wu * x);
}

inline ImQuat t3_coeff_t(const ImQuat& a2, const ImQuat& a3, double w) {
    const ImQuat x = im_cross(a2, a3);
    return (-std::sqrt(3.0) * std::exp(-w) / 4.0) * x;
}

namespace detail {

inline ImQuat alpha2_of(const SurfaceFrame& F, double lambda) {
    return im_part(conj(F.p) * (F.t1 * lambda));
}
inline ImQuat alpha3_of(const SurfaceFrame& F, double lambda) {
    return im_part(conj(F.p) * (F.t2 * lambda));
}

// one RK4 step of q' = q A(s) with A available at s0, s0 + h/2, s0 + h;
// returns the pre-renormalization norm drift
inline double q_rk4_step(Quat& q, const ImQuat& a0, const ImQuat& ah, const ImQuat& a1,
                         double h) {
    const Quat k1 = q * a0.quat();
    const Quat k2 = (q + k1 * (h / 2)) * ah.quat();
    const Quat k3 = (q + k2 * (h / 2)) * ah.quat();
    const Quat k4 = (q + k3 * h) * a1.quat();
    q = q + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    const double drift = std::abs(norm(q) - 1.0);
    q = renormalize(q).q;
    return drift;
}

}  // namespace detail

// q samples over the (nu x nv x nt) grid plus integration diagnostics.
struct T3Solution {
    int nu = 0, nv = 0, nt = 0;
    double du = 0, dv = 0, dt = 0, t0 = 0;
    std::vector<Quat> q;  // index ((i nv) + j) nt + k
    double max_step_drift = 0;
    double compat_residual = 0;  // two-path corner gap at t = t0

    const Quat& at(int i, int j, int k) const {
        return q[(static_cast<size_t>(i) * nv + j) * nt + k];
    }
    Quat& at(int i, int j, int k) { return q[(static_cast<size_t>(i) * nv + j) * nt + k]; }
};

// RK4 integration of the q system over the grid: along u at (v=0, t=t0),
// then along v at t = t0, then along t. Coefficients come from the refined
// surface nodes, so all RK4 stages sit on stored data.
inline T3Solution t3_integrate(const MinimalSurfaceData& surf, const SinhGordonField& field,
                               const UnitQuat& q0, double t0, int nt, double dt,
                               double drift_gate = 1e-6) {
    if (surf.nu != field.nu || surf.nv != field.nv)
        throw std::invalid_argument("surface and field grids disagree");
    T3Solution sol;
    sol.nu = surf.nu;
    sol.nv = surf.nv;
    sol.nt = nt;
    sol.du = surf.du;
    sol.dv = surf.dv;
    sol.dt = dt;
    sol.t0 = t0;
    sol.q.assign(static_cast<size_t>(surf.nu) * surf.nv * nt, Quat{});

    const auto coeff = [&](int ri, int rj, int which) {  // refined indices
        const SurfaceFrame& F = surf.frame_r(ri, rj);
        const double lam = surf.lambda_r(ri, rj);
        const ImQuat a2 = detail::alpha2_of(F, lam);
        const ImQuat a3 = detail::alpha3_of(F, lam);
        const double u = 0.5 * ri * surf.du, v = 0.5 * rj * surf.dv;
        const double w = field.omega(u, v);
        if (which == 0) return t3_coeff_u(a2, a3, w, field.omega_v(u, v));
        if (which == 1) return t3_coeff_v(a2, a3, w, field.omega_u(u, v));
        return t3_coeff_t(a2, a3, w);
    };

    double drift = 0;
    // u-line at v = 0
    Quat qu = q0.q;
    for (int i = 0; i < surf.nu; ++i) {
        sol.at(i, 0, 0) = qu;
        if (i + 1 < surf.nu)
            drift = std::max(drift,
                             detail::q_rk4_step(qu, coeff(2 * i, 0, 0), coeff(2 * i + 1, 0, 0),
                                                coeff(2 * i + 2, 0, 0), surf.du));
    }
    // v-lines at t = t0
    for (int i = 0; i < surf.nu; ++i) {
        Quat qv = sol.at(i, 0, 0);
        for (int j = 0; j < surf.nv; ++j) {
            sol.at(i, j, 0) = qv;
            if (j + 1 < surf.nv)
                drift = std::max(drift, detail::q_rk4_step(qv, coeff(2 * i, 2 * j, 1),
                                                           coeff(2 * i, 2 * j + 1, 1),
                                                           coeff(2 * i, 2 * j + 2, 1), surf.dv));
        }
    }
    // t-lines; the coefficient is constant along t
    for (int i = 0; i < surf.nu; ++i)
        for (int j = 0; j < surf.nv; ++j) {
            const ImQuat at_c = coeff(2 * i, 2 * j, 2);
            Quat qt = sol.at(i, j, 0);
            for (int k = 0; k < nt; ++k) {
                sol.at(i, j, k) = qt;
                if (k + 1 < nt)
                    drift = std::max(drift, detail::q_rk4_step(qt, at_c, at_c, at_c, dt));
            }
        }
    if (drift > drift_gate)
        throw std::runtime_error("q-norm drift beyond the per-step gate during integration");
    sol.max_step_drift = drift;

    // two-path diagnostic: v-then-u to the far corner versus the stored value
    {
        Quat qc = q0.q;
        for (int j = 0; j + 1 < surf.nv; ++j)
            detail::q_rk4_step(qc, coeff(0, 2 * j, 1), coeff(0, 2 * j + 1, 1),
                               coeff(0, 2 * j + 2, 1), surf.dv);
        const int rj = 2 * (surf.nv - 1);
        for (int i = 0; i + 1 < surf.nu; ++i)
            detail::q_rk4_step(qc, coeff(2 * i, rj, 0), coeff(2 * i + 1, rj, 0),
                               coeff(2 * i + 2, rj, 0), surf.du);
        sol.compat_residual = norm(qc - sol.at(surf.nu - 1, surf.nv - 1, 0));
    }
    return sol;
}

// FD mixed-partial residual max_ij |d_u(q A_v) - d_v(q A_u)| on the t = t0
// sheet; O(step^2) for an integrable system.
inline double t3_mixed_partial_residual(const T3Solution& sol, const MinimalSurfaceData& surf,
                                        const SinhGordonField& field) {
    const auto coeff = [&](int i, int j, int which) {
        const SurfaceFrame& F = surf.frame_r(2 * i, 2 * j);
        const double lam = surf.lambda_r(2 * i, 2 * j);
        const ImQuat a2 = detail::alpha2_of(F, lam);
        const ImQuat a3 = detail::alpha3_of(F, lam);
        const double u = i * surf.du, v = j * surf.dv;
        const double w = field.omega(u, v);
        return which == 0 ? t3_coeff_u(a2, a3, w, field.omega_v(u, v))
                          : t3_coeff_v(a2, a3, w, field.omega_u(u, v));
    };
    double res = 0;
    for (int i = 1; i + 1 < sol.nu; ++i)
        for (int j = 1; j + 1 < sol.nv; ++j) {
            const Quat dv_qau = (sol.at(i, j + 1, 0) * coeff(i, j + 1, 0).quat() -
                                 sol.at(i, j - 1, 0) * coeff(i, j - 1, 0).quat()) /
                                (2.0 * sol.dv);
            const Quat du_qav = (sol.at(i + 1, j, 0) * coeff(i + 1, j, 1).quat() -
                                 sol.at(i - 1, j, 0) * coeff(i - 1, j, 1).quat()) /
                                (2.0 * sol.du);
            res = std::max(res, norm(du_qav - dv_qau));
        }
    return res;
}

struct T3VerifyReport {
    int samples = 0;
    double max_lagrangian = 0;
    double max_pi3_gap = 0;     // distance of the closest angle to pi/3
    double max_angle_sum = 0;   // angle-sum residual mod pi
    double max_rank_ratio = 0;  // sigma3/sigma1 of dp
    int rank_failures = 0;      // nodes where rank(dp) != 2
    int angle_failures = 0;     // nodes where the angles could not be extracted
    double max_step_drift = 0;
    double compat_residual = 0;

    bool pass(double lag_tol = 1e-5, double pi3_tol = 1e-3) const {
        return max_lagrangian < lag_tol && max_pi3_gap < pi3_tol && rank_failures == 0 &&
               angle_failures == 0;
    }
};

// Verification of the built immersion from the stored grids alone. The
// differentials are Richardson-extrapolated central differences of the p and
// q samples, so the check is independent of the structure equations that
// produced them: a wrong integrator cannot pass it.
inline T3VerifyReport t3_verify(const T3Solution& sol, const MinimalSurfaceData& surf,
                                const SinhGordonField& field, int stride = 4) {
    (void)field;
    T3VerifyReport rep;
    rep.max_step_drift = sol.max_step_drift;
    rep.compat_residual = sol.compat_residual;
    if (sol.nu < 5 || sol.nv < 5 || sol.nt < 5)
        throw std::invalid_argument("grid too small for the FD verification stencil");

    // 4th-order stencil over +-1, +-2 grid offsets
    const auto fd4 = [](const Quat& m2, const Quat& m1, const Quat& p1, const Quat& p2,
                        double h) {
        return ((p1 - m1) * (2.0 / 3.0) - (p2 - m2) * (1.0 / 12.0)) / h;
    };

    for (int i = 2; i + 2 < sol.nu; i += stride)
        for (int j = 2; j + 2 < sol.nv; j += stride)
            for (int k = 2; k + 2 < sol.nt; k += stride) {
                const auto pg = [&](int a, int b) { return surf.frame_r(2 * a, 2 * b).p; };
                const Quat pu = fd4(pg(i - 2, j), pg(i - 1, j), pg(i + 1, j), pg(i + 2, j),
                                    sol.du);
                const Quat pv = fd4(pg(i, j - 2), pg(i, j - 1), pg(i, j + 1), pg(i, j + 2),
                                    sol.dv);
                const Quat qu = fd4(sol.at(i - 2, j, k), sol.at(i - 1, j, k),
                                    sol.at(i + 1, j, k), sol.at(i + 2, j, k), sol.du);
                const Quat qv = fd4(sol.at(i, j - 2, k), sol.at(i, j - 1, k),
                                    sol.at(i, j + 1, k), sol.at(i, j + 2, k), sol.dv);
                const Quat qt = fd4(sol.at(i, j, k - 2), sol.at(i, j, k - 1),
                                    sol.at(i, j, k + 1), sol.at(i, j, k + 2), sol.dt);
                const SurfacePoint base{renormalize(pg(i, j)), renormalize(sol.at(i, j, k))};
                const TangentVec df[3] = {euclid_project(base, pu, qu),
                                          euclid_project(base, pv, qv),
                                          euclid_project(base, Quat{}, qt)};

                // rank of dp from the first components
                Mat3 gram;
                for (int a = 0; a < 3; ++a)
                    for (int b = 0; b < 3; ++b) gram(a, b) = dot(df[a].u, df[b].u);
                const SymEigen3 ge = sym_eigen(gram);
                const double s1 = std::sqrt(std::max(0.0, ge.values[2]));
                const double s2 = std::sqrt(std::max(0.0, ge.values[1]));
                const double s3 = std::sqrt(std::max(0.0, ge.values[0]));
                rep.max_rank_ratio = std::max(rep.max_rank_ratio, s3 / s1);
                if (s3 / s1 > 1e-6 || s2 / s1 < 1e-6) ++rep.rank_failures;

                // g-orthonormalize and evaluate the Lagrangian residual
                TangentVec e[3] = {df[0], df[1], df[2]};
                for (int a = 0; a < 3; ++a) {
                    for (int b = 0; b < a; ++b) e[a] = e[a] - metric_g(e[a], e[b]) * e[b];
                    e[a] = e[a] * (1.0 / g_norm(e[a]));
                }
                TangentVec je[3];
                for (int a = 0; a < 3; ++a) je[a] = apply_J(e[a]);
                double lag = 0;
                Mat3 A, B;
                for (int a = 0; a < 3; ++a) {
                    const TangentVec pe = apply_P(e[a]);
                    for (int b = 0; b < 3; ++b) {
                        lag = std::max(lag, std::abs(metric_g(e[b], je[a])));
                        A(b, a) = metric_g(pe, e[b]);
                        B(b, a) = metric_g(pe, je[b]);
                    }
                }
                rep.max_lagrangian = std::max(rep.max_lagrangian, lag);

                // commutation tolerance matched to the FD quality of A and B;
                // nodes whose data is too rough to diagonalize are counted
                // as failures rather than aborting the report
                try {
                    ProbeOptions ab_opt;
                    ab_opt.commute_tol = 0.02;
                    const Vec3 theta = angles_from_ab(A, B, ab_opt);
                    rep.max_angle_sum = std::max(rep.max_angle_sum, angle_sum_mod_pi(theta));
                    double gap = 1e300;
                    for (int a = 0; a < 3; ++a) {
                        double d = std::fmod(std::abs(theta[a] - M_PI / 3.0), M_PI);
                        d = std::min(d, M_PI - d);
                        gap = std::min(gap, d);
                    }
                    rep.max_pi3_gap = std::max(rep.max_pi3_gap, gap);
                } catch (const std::domain_error&) {
                    ++rep.angle_failures;
                }
                ++rep.samples;
            }
    return rep;
}

// The built immersion as a chart map (u, v, t): evaluation integrates the
// joint frame-and-q system from the origin along the canonical path (u-line
// at v=0, then the v-line, then t); differentials come from the structure
// equations, so no FD is involved.
inline ImmersionMap make_t3_immersion(const SinhGordonField& field, const SurfaceFrame& init,
                                      const UnitQuat& q0, const std::string& label = "t3-built") {
    struct State {
        SurfaceFrame F;
        Quat q;
    };
    const auto fieldp = std::make_shared<SinhGordonField>(field);
    SurfaceFrame init_on = init;
    detail::orthonormalize_frame(init_on);
    const State s0{init_on, q0.q};

    // joint derivative of (F, q) along one axis; (u, v) is the surface point
    const auto rhs = [fieldp](const State& st, int axis, double u, double v) {
        const SinhGordonField& fld = *fieldp;
        const double w = fld.omega(u, v);
        const double lam = std::sqrt(2.0) * std::exp(0.5 * w);
        const ImQuat a2 = detail::alpha2_of(st.F, lam);
        const ImQuat a3 = detail::alpha3_of(st.F, lam);
        State d;
        if (axis == 0) {
            const auto fr = surface_rhs_u(st.F, w, fld.omega_v(u, v));
            d.F = {fr[0], fr[1], fr[2], fr[3]};
            d.q = st.q * t3_coeff_u(a2, a3, w, fld.omega_v(u, v)).quat();
        } else if (axis == 1) {
            const auto fr = surface_rhs_v(st.F, w, fld.omega_u(u, v));
            d.F = {fr[0], fr[1], fr[2], fr[3]};
            d.q = st.q * t3_coeff_v(a2, a3, w, fld.omega_u(u, v)).quat();
        } else {
            d.F = {Quat{}, Quat{}, Quat{}, Quat{}};
            d.q = st.q * t3_coeff_t(a2, a3, w).quat();
        }
        return d;
    };

    // fixed-step RK4 march from coordinate 0 to `target` along `axis`
    const auto march = [rhs, fieldp](State s, int axis, double target, double u0, double v0) {
        const SinhGordonField& fld = *fieldp;
        const double hbase =
            0.5 * (axis == 0 ? fld.du : (axis == 1 ? fld.dv : std::min(fld.du, fld.dv)));
        const double sgn = target >= 0 ? 1.0 : -1.0;
        double remaining = std::abs(target), pos = 0.0;
        const auto uv_at = [&](double sp) {
            return std::pair<double, double>{axis == 0 ? sp : u0, axis == 1 ? sp : v0};
        };
        const auto add = [](const State& a, const State& d, double c) {
            State r;
            r.F.p = a.F.p + d.F.p * c;
            r.F.t1 = a.F.t1 + d.F.t1 * c;
            r.F.t2 = a.F.t2 + d.F.t2 * c;
            r.F.N = a.F.N + d.F.N * c;
            r.q = a.q + d.q * c;
            return r;
        };
        while (remaining > 1e-14) {
            const double h = sgn * std::min(hbase, remaining);
            const auto [ua, va] = uv_at(pos);
            const auto [um, vm] = uv_at(pos + h / 2);
            const auto [ub, vb] = uv_at(pos + h);
            const State k1 = rhs(s, axis, ua, va);
            const State k2 = rhs(add(s, k1, h / 2), axis, um, vm);
            const State k3 = rhs(add(s, k2, h / 2), axis, um, vm);
            const State k4 = rhs(add(s, k3, h), axis, ub, vb);
            s = add(add(add(add(s, k1, h / 6), k2, h / 3), k3, h / 3), k4, h / 6);
            if (axis != 2) detail::orthonormalize_frame(s.F);
            s.q = renormalize(s.q).q;
            pos += h;
            remaining -= std::abs(h);
        }
        return s;
    };

    const auto state_at = [s0, march](const Vec3& x) {
        State s = march(s0, 0, x[0], 0.0, 0.0);
        s = march(s, 1, x[1], x[0], 0.0);
        s = march(s, 2, x[2], x[0], x[1]);
        return s;
    };

    ImmersionMap m;
    m.dim = 3;
    m.label = label;
    m.lo = {0.0, 0.0, 0.0};
    m.hi = {fieldp->u_max(), fieldp->v_max(), std::min(fieldp->u_max(), fieldp->v_max())};
    m.eval = [state_at](const Vec3& x) {
        const State s = state_at(x);
        return SurfacePoint{renormalize(s.F.p), renormalize(s.q)};
    };
    m.dform = [state_at, fieldp](const Vec3& x, const Vec3& X) {
        const State s = state_at(x);
        const SinhGordonField& fld = *fieldp;
        const double w = fld.omega(x[0], x[1]);
        const double lam = std::sqrt(2.0) * std::exp(0.5 * w);
        const ImQuat a2 = detail::alpha2_of(s.F, lam);
        const ImQuat a3 = detail::alpha3_of(s.F, lam);
        const SurfacePoint base{renormalize(s.F.p), renormalize(s.q)};
        const Quat pu = s.F.t1 * lam, pv = s.F.t2 * lam;
        const Quat qu = s.q * t3_coeff_u(a2, a3, w, fld.omega_v(x[0], x[1])).quat();
        const Quat qv = s.q * t3_coeff_v(a2, a3, w, fld.omega_u(x[0], x[1])).quat();
        const Quat qt = s.q * t3_coeff_t(a2, a3, w).quat();
        return TangentVec(base, pu * X[0] + pv * X[1], qu * X[0] + qv * X[1] + qt * X[2], 1e-4);
    };
    return m;
}

}  // namespace nks3

#endif
