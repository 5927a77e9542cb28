#ifndef NKS3_LINALG_HPP
#define NKS3_LINALG_HPP

#include <array>
#include <cmath>
#include <stdexcept>

namespace nks3 {

using Vec3 = std::array<double, 3>;

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(const Vec3& a, double s) { return {a[0] * s, a[1] * s, a[2] * s}; }
inline Vec3 operator*(double s, const Vec3& a) { return a * s; }
inline Vec3 operator-(const Vec3& a) { return {-a[0], -a[1], -a[2]}; }
inline double vdot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double vnorm(const Vec3& a) { return std::sqrt(vdot(a, a)); }

struct Mat3 {
    double a[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};

    double& operator()(int i, int j) { return a[i][j]; }
    double operator()(int i, int j) const { return a[i][j]; }

    static Mat3 identity() {
        Mat3 m;
        m.a[0][0] = m.a[1][1] = m.a[2][2] = 1.0;
        return m;
    }

    Vec3 col(int j) const { return {a[0][j], a[1][j], a[2][j]}; }
    void set_col(int j, const Vec3& v) { a[0][j] = v[0]; a[1][j] = v[1]; a[2][j] = v[2]; }

    Vec3 operator*(const Vec3& v) const {
        return {a[0][0] * v[0] + a[0][1] * v[1] + a[0][2] * v[2],
                a[1][0] * v[0] + a[1][1] * v[1] + a[1][2] * v[2],
                a[2][0] * v[0] + a[2][1] * v[1] + a[2][2] * v[2]};
    }

    Mat3 operator*(const Mat3& b) const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double s = 0;
                for (int k = 0; k < 3; ++k) s += a[i][k] * b.a[k][j];
                r.a[i][j] = s;
            }
        return r;
    }

    Mat3 operator+(const Mat3& b) const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r.a[i][j] = a[i][j] + b.a[i][j];
        return r;
    }

    Mat3 operator-(const Mat3& b) const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r.a[i][j] = a[i][j] - b.a[i][j];
        return r;
    }

    Mat3 operator*(double s) const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r.a[i][j] = a[i][j] * s;
        return r;
    }

    Mat3 transposed() const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r.a[i][j] = a[j][i];
        return r;
    }
};

inline double max_abs(const Mat3& m) {
    double r = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r = std::max(r, std::abs(m.a[i][j]));
    return r;
}

struct SymEigen3 {
    Vec3 values;   // ascending
    Mat3 vectors;  // columns
};

// Cyclic Jacobi for a symmetric 3x3; deterministic, eigenvalues ascending.
inline SymEigen3 sym_eigen(const Mat3& m_in) {
    Mat3 m = m_in;
    Mat3 v = Mat3::identity();
    for (int sweep = 0; sweep < 50; ++sweep) {
        double off = std::abs(m(0, 1)) + std::abs(m(0, 2)) + std::abs(m(1, 2));
        if (off < 1e-15 * (1.0 + std::abs(m(0, 0)) + std::abs(m(1, 1)) + std::abs(m(2, 2)))) break;
        for (int p = 0; p < 2; ++p)
            for (int q = p + 1; q < 3; ++q) {
                if (std::abs(m(p, q)) < 1e-300) continue;
                const double theta = 0.5 * std::atan2(2.0 * m(p, q), m(q, q) - m(p, p));
                const double c = std::cos(theta), s = std::sin(theta);
                for (int k = 0; k < 3; ++k) {
                    const double mkp = m(k, p), mkq = m(k, q);
                    m(k, p) = c * mkp - s * mkq;
                    m(k, q) = s * mkp + c * mkq;
                }
                for (int k = 0; k < 3; ++k) {
                    const double mpk = m(p, k), mqk = m(q, k);
                    m(p, k) = c * mpk - s * mqk;
                    m(q, k) = s * mpk + c * mqk;
                }
                for (int k = 0; k < 3; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
    }
    // sort ascending
    int order[3] = {0, 1, 2};
    for (int i = 0; i < 2; ++i)
        for (int j = i + 1; j < 3; ++j)
            if (m(order[j], order[j]) < m(order[i], order[i])) std::swap(order[i], order[j]);
    SymEigen3 out;
    for (int i = 0; i < 3; ++i) {
        out.values[i] = m(order[i], order[i]);
        out.vectors.set_col(i, v.col(order[i]));
    }
    return out;
}

inline Mat3 inverse(const Mat3& m) {
    const double c00 = m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
    const double c01 = m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2);
    const double c02 = m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0);
    const double det = m(0, 0) * c00 + m(0, 1) * c01 + m(0, 2) * c02;
    if (std::abs(det) < 1e-300) throw std::domain_error("singular 3x3 matrix");
    Mat3 r;
    r(0, 0) = c00 / det;
    r(1, 0) = c01 / det;
    r(2, 0) = c02 / det;
    r(0, 1) = (m(0, 2) * m(2, 1) - m(0, 1) * m(2, 2)) / det;
    r(1, 1) = (m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0)) / det;
    r(2, 1) = (m(0, 1) * m(2, 0) - m(0, 0) * m(2, 1)) / det;
    r(0, 2) = (m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1)) / det;
    r(1, 2) = (m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2)) / det;
    r(2, 2) = (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)) / det;
    return r;
}

}  // namespace nks3

#endif
