#ifndef NKS3_QUAT_HPP
#define NKS3_QUAT_HPP

#include <array>
#include <utility>
#include <cmath>
#include <stdexcept>

namespace nks3 {

// Quaternion w + x i + y j + z k, Hamilton convention i*j = k.
struct Quat {
    double w = 0.0, x = 0.0, y = 0.0, z = 0.0;

    Quat() = default;
    Quat(double w_, double x_, double y_, double z_) : w(w_), x(x_), y(y_), z(z_) {}

    Quat operator+(const Quat& b) const { return {w + b.w, x + b.x, y + b.y, z + b.z}; }
    Quat operator-(const Quat& b) const { return {w - b.w, x - b.x, y - b.y, z - b.z}; }
    Quat operator-() const { return {-w, -x, -y, -z}; }
    Quat operator*(double s) const { return {w * s, x * s, y * s, z * s}; }
    Quat operator/(double s) const { return {w / s, x / s, y / s, z / s}; }
    Quat& operator+=(const Quat& b) { w += b.w; x += b.x; y += b.y; z += b.z; return *this; }
    Quat& operator-=(const Quat& b) { w -= b.w; x -= b.x; y -= b.y; z -= b.z; return *this; }
    Quat& operator*=(double s) { w *= s; x *= s; y *= s; z *= s; return *this; }

    Quat operator*(const Quat& b) const {
        return {w * b.w - x * b.x - y * b.y - z * b.z,
                w * b.x + x * b.w + y * b.z - z * b.y,
                w * b.y - x * b.z + y * b.w + z * b.x,
                w * b.z + x * b.y - y * b.x + z * b.w};
    }

    std::array<double, 4> coords() const { return {w, x, y, z}; }
};

inline Quat operator*(double s, const Quat& q) { return q * s; }

inline double dot(const Quat& a, const Quat& b) {
    return a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z;
}
inline double norm_sq(const Quat& a) { return dot(a, a); }
inline double norm(const Quat& a) { return std::sqrt(norm_sq(a)); }

inline Quat conj(const Quat& a) { return {a.w, -a.x, -a.y, -a.z}; }

inline Quat inverse(const Quat& a) {
    const double n2 = norm_sq(a);
    if (n2 <= 0.0) throw std::domain_error("inverse of zero quaternion is undefined");
    return conj(a) / n2;
}

// conjugate and multiplicative inverse together; they coincide on S^3
inline std::pair<Quat, Quat> conj_inv(const Quat& a) { return {conj(a), inverse(a)}; }

constexpr double kUnitNormTol = 1e-9;  // type admission tolerance for unit quaternions

// Imaginary quaternion x i + y j + z k.
struct ImQuat {
    double x = 0.0, y = 0.0, z = 0.0;

    ImQuat() = default;
    ImQuat(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    Quat quat() const { return {0.0, x, y, z}; }
    ImQuat operator+(const ImQuat& b) const { return {x + b.x, y + b.y, z + b.z}; }
    ImQuat operator-(const ImQuat& b) const { return {x - b.x, y - b.y, z - b.z}; }
    ImQuat operator-() const { return {-x, -y, -z}; }
    ImQuat operator*(double s) const { return {x * s, y * s, z * s}; }
};

inline ImQuat operator*(double s, const ImQuat& v) { return v * s; }

inline double dot(const ImQuat& a, const ImQuat& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(const ImQuat& a) { return std::sqrt(dot(a, a)); }

// Checked projection Quat -> ImQuat.
inline ImQuat as_imaginary(const Quat& q, double tol = 1e-8) {
    if (std::abs(q.w) > tol * std::max(1.0, norm(q)))
        throw std::domain_error("quaternion has a non-negligible real part");
    return {q.x, q.y, q.z};
}

// Unchecked imaginary part, for integrator stages where the real component
// is a controlled truncation term.
inline ImQuat im_part(const Quat& q) { return {q.x, q.y, q.z}; }

// Commutator cross product (ab - ba)/2; coincides with the R^3 cross product
// under the (x, y, z) identification.
inline ImQuat im_cross(const ImQuat& a, const ImQuat& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

struct UnitQuat {
    Quat q{1.0, 0.0, 0.0, 0.0};

    UnitQuat() = default;
    explicit UnitQuat(const Quat& v, double tol = kUnitNormTol) : q(v) {
        if (std::abs(norm(v) - 1.0) > tol)
            throw std::domain_error("quaternion norm deviates from 1 beyond tolerance");
    }

    operator const Quat&() const { return q; }
    UnitQuat conjugate() const { UnitQuat r; r.q = conj(q); return r; }
    UnitQuat inverse() const { return conjugate(); }
};

inline UnitQuat renormalize(const Quat& a) {
    const double n = norm(a);
    if (n <= 1e-12) throw std::domain_error("cannot renormalize a near-zero quaternion");
    UnitQuat r;
    r.q = a / n;
    return r;
}

// exp of an imaginary quaternion: cos|v| + sin|v| v/|v|, a point of S^3.
inline UnitQuat exp_im(const ImQuat& v) {
    const double r = norm(v);
    double s;  // sin(r)/r
    if (r < 1e-6) {
        const double r2 = r * r;
        s = 1.0 - r2 / 6.0 + r2 * r2 / 120.0;
    } else {
        s = std::sin(r) / r;
    }
    UnitQuat u;
    u.q = Quat{std::cos(r), s * v.x, s * v.y, s * v.z};
    return u;
}

// Differential of exp_im at v applied to w: d/dt exp(v + t w) at t = 0.
inline Quat dexp_im(const ImQuat& v, const ImQuat& w) {
    const double r = norm(v);
    const double vw = dot(v, w);
    double s, c;  // sinc(r), (cos r - sinc r)/r^2
    if (r < 1e-4) {
        const double r2 = r * r;
        s = 1.0 - r2 / 6.0 + r2 * r2 / 120.0;
        c = -1.0 / 3.0 + r2 / 30.0;
    } else {
        s = std::sin(r) / r;
        c = (std::cos(r) - s) / (r * r);
    }
    return Quat{-s * vw, s * w.x + c * vw * v.x, s * w.y + c * vw * v.y, s * w.z + c * vw * v.z};
}

}  // namespace nks3

#endif
