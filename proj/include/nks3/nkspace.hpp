#ifndef NKS3_NKSPACE_HPP
#define NKS3_NKSPACE_HPP

#include <array>
#include <cmath>
#include <stdexcept>

#include "nks3/quat.hpp"

namespace nks3 {

// Point (p, q) of S^3 x S^3.
struct SurfacePoint {
    UnitQuat p, q;

    SurfacePoint() = default;
    SurfacePoint(const UnitQuat& p_, const UnitQuat& q_) : p(p_), q(q_) {}
};

inline double point_distance(const SurfacePoint& a, const SurfacePoint& b) {
    return norm(a.p.q - b.p.q) + norm(a.q.q - b.q.q);
}

// Basis of imaginary quaternions carried by the global frame: the third
// element is -k, so that E3(p) = -p k matches the frame convention.
inline const std::array<ImQuat, 3>& frame_alphas() {
    static const std::array<ImQuat, 3> alphas = {ImQuat{1, 0, 0}, ImQuat{0, 1, 0},
                                                 ImQuat{0, 0, -1}};
    return alphas;
}

// Tangent vector Z = (U, V) at (p, q), with U = p a and V = q b for imaginary a, b.
// Construction projects away small normal components and rejects large ones.
struct TangentVec {
    SurfacePoint base;
    Quat u, v;

    TangentVec() = default;

    TangentVec(const SurfacePoint& at, const Quat& u_raw, const Quat& v_raw,
               double project_tol = 1e-6) : base(at) {
        const double su = dot(u_raw, at.p.q);
        const double sv = dot(v_raw, at.q.q);
        const double scale_u = std::max(1.0, norm(u_raw));
        const double scale_v = std::max(1.0, norm(v_raw));
        if (std::abs(su) > project_tol * scale_u || std::abs(sv) > project_tol * scale_v)
            throw std::domain_error("vector is not tangent to S^3 x S^3 at the base point");
        u = u_raw - at.p.q * su;
        v = v_raw - at.q.q * sv;
    }

    TangentVec operator+(const TangentVec& b) const {
        TangentVec r;
        r.base = base;
        r.u = u + b.u;
        r.v = v + b.v;
        return r;
    }
    TangentVec operator-(const TangentVec& b) const {
        TangentVec r;
        r.base = base;
        r.u = u - b.u;
        r.v = v - b.v;
        return r;
    }
    TangentVec operator*(double s) const {
        TangentVec r;
        r.base = base;
        r.u = u * s;
        r.v = v * s;
        return r;
    }
    TangentVec operator-() const { return (*this) * -1.0; }

    // left-translated components: U = p alpha, V = q beta
    ImQuat alpha() const { return as_imaginary(conj(base.p.q) * u, 1e-6); }
    ImQuat beta() const { return as_imaginary(conj(base.q.q) * v, 1e-6); }
};

inline TangentVec operator*(double s, const TangentVec& z) { return z * s; }

// Unconditional tangent projection of an ambient (R^4 x R^4) vector.
inline TangentVec euclid_project(const SurfacePoint& at, const Quat& u, const Quat& v) {
    TangentVec z;
    z.base = at;
    z.u = u - at.p.q * dot(u, at.p.q);
    z.v = v - at.q.q * dot(v, at.q.q);
    return z;
}

// Coefficients in the global frame E1..E3, F1..F3 at a point.
struct FrameCoeffs {
    std::array<double, 3> e{0, 0, 0};
    std::array<double, 3> f{0, 0, 0};

    double& operator[](int i) { return i < 3 ? e[i] : f[i - 3]; }
    double operator[](int i) const { return i < 3 ? e[i] : f[i - 3]; }
};

inline TangentVec frame_E(const SurfacePoint& at, int i) {
    TangentVec z;
    z.base = at;
    z.u = at.p.q * frame_alphas()[i].quat();
    return z;
}

inline TangentVec frame_F(const SurfacePoint& at, int i) {
    TangentVec z;
    z.base = at;
    z.v = at.q.q * frame_alphas()[i].quat();
    return z;
}

inline FrameCoeffs frame_coeffs(const TangentVec& z) {
    const ImQuat a = z.alpha(), b = z.beta();
    FrameCoeffs c;
    for (int i = 0; i < 3; ++i) {
        c.e[i] = dot(a, frame_alphas()[i]);
        c.f[i] = dot(b, frame_alphas()[i]);
    }
    return c;
}

inline TangentVec from_coeffs(const SurfacePoint& at, const FrameCoeffs& c) {
    ImQuat a{0, 0, 0}, b{0, 0, 0};
    for (int i = 0; i < 3; ++i) {
        a = a + c.e[i] * frame_alphas()[i];
        b = b + c.f[i] * frame_alphas()[i];
    }
    TangentVec z;
    z.base = at;
    z.u = at.p.q * a.quat();
    z.v = at.q.q * b.quat();
    return z;
}

// Almost complex structure J(U,V) = (2 p q^-1 V - U, -2 q p^-1 U + V)/sqrt(3).
inline TangentVec apply_J(const TangentVec& z) {
    static const double inv_sqrt3 = 1.0 / std::sqrt(3.0);
    const Quat pq = z.base.p.q * conj(z.base.q.q);  // p q^-1
    const Quat qp = z.base.q.q * conj(z.base.p.q);  // q p^-1
    TangentVec r;
    r.base = z.base;
    r.u = (pq * z.v * 2.0 - z.u) * inv_sqrt3;
    r.v = (qp * z.u * -2.0 + z.v) * inv_sqrt3;
    return r;
}

// Almost product structure P(U,V) = (p q^-1 V, q p^-1 U).
inline TangentVec apply_P(const TangentVec& z) {
    TangentVec r;
    r.base = z.base;
    r.u = z.base.p.q * conj(z.base.q.q) * z.v;
    r.v = z.base.q.q * conj(z.base.p.q) * z.u;
    return r;
}

inline void require_same_base(const TangentVec& a, const TangentVec& b) {
    if (point_distance(a.base, b.base) > 1e-9)
        throw std::invalid_argument("tangent vectors live at different base points");
}

// Nearly Kaehler metric g.
inline double metric_g(const TangentVec& z, const TangentVec& z2) {
    require_same_base(z, z2);
    const Quat a = conj(z.base.p.q) * z.u;    // p^-1 U
    const Quat b = conj(z.base.q.q) * z.v;    // q^-1 V
    const Quat a2 = conj(z.base.p.q) * z2.u;  // p^-1 U'
    const Quat b2 = conj(z.base.q.q) * z2.v;  // q^-1 V'
    return (4.0 / 3.0) * (dot(z.u, z2.u) + dot(z.v, z2.v)) -
           (2.0 / 3.0) * (dot(a, b2) + dot(a2, b));
}

inline double g_norm(const TangentVec& z) { return std::sqrt(std::max(0.0, metric_g(z, z))); }

inline int epsilon_sym(int i, int j, int k) {
    if (i == j || j == k || i == k) return 0;
    return ((j - i + 3) % 3 == 1) ? 1 : -1;  // cyclic (i,j,k) of (0,1,2) -> +1
}

// G = (nabla J) on frame pairs, from the structure table. Indices 0..2 are E_i,
// 3..5 are F_i. Coefficients returned in the frame basis.
inline FrameCoeffs G_table(int a, int b) {
    static const double c = 2.0 / (3.0 * std::sqrt(3.0));
    FrameCoeffs out;
    const int i = a % 3, j = b % 3;
    for (int k = 0; k < 3; ++k) {
        const double eps = static_cast<double>(epsilon_sym(i, j, k));
        if (eps == 0.0) continue;
        if (a < 3 && b < 3) {          // G(E_i, E_j) = -c eps (E_k + 2 F_k)
            out.e[k] = -c * eps;
            out.f[k] = -2.0 * c * eps;
        } else if (a < 3 && b >= 3) {  // G(E_i, F_j) = -c eps (E_k - F_k)
            out.e[k] = -c * eps;
            out.f[k] = c * eps;
        } else if (a >= 3 && b < 3) {  // G(F_i, E_j) = -c eps (E_k - F_k)
            out.e[k] = -c * eps;
            out.f[k] = c * eps;
        } else {                       // G(F_i, F_j) = +c eps (2 E_k + F_k)
            out.e[k] = 2.0 * c * eps;
            out.f[k] = c * eps;
        }
    }
    return out;
}

// G(X, Y) by bilinear expansion over the frame; G is a tensor, so this is exact.
inline TangentVec apply_G(const TangentVec& x, const TangentVec& y) {
    require_same_base(x, y);
    const FrameCoeffs cx = frame_coeffs(x), cy = frame_coeffs(y);
    FrameCoeffs out;
    for (int a = 0; a < 6; ++a) {
        if (cx[a] == 0.0) continue;
        for (int b = 0; b < 6; ++b) {
            if (cy[b] == 0.0) continue;
            const FrameCoeffs gab = G_table(a, b);
            const double w = cx[a] * cy[b];
            for (int k = 0; k < 3; ++k) {
                out.e[k] += w * gab.e[k];
                out.f[k] += w * gab.f[k];
            }
        }
    }
    return from_coeffs(x.base, out);
}

}  // namespace nks3

#endif
