#ifndef NKS3_IMMERSION_HPP
#define NKS3_IMMERSION_HPP

#include <functional>
#include <string>

#include "nks3/linalg.hpp"
#include "nks3/nkspace.hpp"

namespace nks3 {

// Chart-parametrized map M -> S^3 x S^3 with an evaluator and an optional
// closed-form differential. FD charts are 2- or 3-dimensional boxes.
struct ImmersionMap {
    int dim = 3;
    std::string label;
    std::function<SurfacePoint(const Vec3&)> eval;
    std::function<TangentVec(const Vec3&, const Vec3&)> dform;  // closed form, may be empty
    Vec3 lo{-0.8, -0.8, -0.8}, hi{0.8, 0.8, 0.8};               // sampling box

    bool has_closed_form() const { return static_cast<bool>(dform); }
};

// df(X) at x: closed form when available, else a Richardson-extrapolated
// central difference, tangency-projected.
inline TangentVec differential(const ImmersionMap& f, const Vec3& x, const Vec3& X,
                               double h = 1e-4) {
    if (f.dform) return f.dform(x, X);
    const auto central = [&](double step) {
        const SurfacePoint fp = f.eval(x + step * X), fm = f.eval(x - step * X);
        return std::pair<Quat, Quat>{(fp.p.q - fm.p.q) / (2.0 * step),
                                     (fp.q.q - fm.q.q) / (2.0 * step)};
    };
    auto [du, dv] = central(h);
    auto [du2, dv2] = central(h / 2.0);
    du = (du2 * 4.0 - du) / 3.0;
    dv = (dv2 * 4.0 - dv) / 3.0;
    const SurfacePoint base = f.eval(x);
    return euclid_project(base, du, dv);
}

inline Mat3 induced_metric(const ImmersionMap& f, const Vec3& x) {
    Mat3 g;
    TangentVec d[3];
    for (int i = 0; i < f.dim; ++i) {
        Vec3 dir{0, 0, 0};
        dir[i] = 1.0;
        d[i] = differential(f, x, dir);
    }
    for (int i = 0; i < f.dim; ++i)
        for (int j = i; j < f.dim; ++j) g(i, j) = g(j, i) = metric_g(d[i], d[j]);
    return g;
}

// Gram-Schmidt under the induced metric, starting from the chart axes.
// Fails on singular or badly conditioned metrics (non-immersion points).
inline std::array<Vec3, 3> orthonormal_basis(const ImmersionMap& f, const Vec3& x) {
    if (f.dim != 3) throw std::invalid_argument("orthonormal_basis requires a 3d chart");
    const Mat3 g = induced_metric(f, x);
    const SymEigen3 eig = sym_eigen(g);
    if (eig.values[0] <= 0.0 || eig.values[2] / eig.values[0] > 1e8)
        throw std::domain_error("induced metric is singular or near-degenerate");

    std::array<Vec3, 3> e{Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}};
    const auto ip = [&](const Vec3& a, const Vec3& b) { return vdot(a, g * b); };
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < i; ++j) e[i] = e[i] - ip(e[i], e[j]) * e[j];
        const double n = std::sqrt(ip(e[i], e[i]));
        e[i] = e[i] * (1.0 / n);
    }
    return e;
}

// max_ij |g(df e_i, J df e_j)| over a g-orthonormal tangent basis; zero iff
// the map is Lagrangian at x.
inline double is_lagrangian(const ImmersionMap& f, const Vec3& x) {
    const auto basis = orthonormal_basis(f, x);
    TangentVec d[3], jd[3];
    for (int i = 0; i < 3; ++i) {
        d[i] = differential(f, x, basis[i]);
        jd[i] = apply_J(d[i]);
    }
    double r = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r = std::max(r, std::abs(metric_g(d[i], jd[j])));
    return r;
}

// Exponential-type chart on S^3 centered at a configurable base point:
// x -> b exp(x1 i + x2 j + x3 k). Injective for |x| < pi.
inline ImQuat chart_vec(const Vec3& x) { return {x[0], x[1], x[2]}; }

inline UnitQuat exp_chart(const UnitQuat& base, const Vec3& x) {
    return renormalize(base.q * exp_im(chart_vec(x)).q);
}

inline Quat exp_chart_diff(const UnitQuat& base, const Vec3& x, const Vec3& X) {
    return base.q * dexp_im(chart_vec(x), chart_vec(X));
}

// Singular values of the 4x3 differential of one S^3 component; used for
// rank decisions (threshold 1e-6 relative to the largest).
inline Vec3 component_singular_values(const ImmersionMap& f, const Vec3& x, bool first) {
    Quat cols[3];
    for (int i = 0; i < f.dim; ++i) {
        Vec3 dir{0, 0, 0};
        dir[i] = 1.0;
        const TangentVec d = differential(f, x, dir);
        cols[i] = first ? d.u : d.v;
    }
    Mat3 gram;
    for (int i = 0; i < f.dim; ++i)
        for (int j = 0; j < f.dim; ++j) gram(i, j) = dot(cols[i], cols[j]);
    const SymEigen3 eig = sym_eigen(gram);
    return {std::sqrt(std::max(0.0, eig.values[2])), std::sqrt(std::max(0.0, eig.values[1])),
            std::sqrt(std::max(0.0, eig.values[0]))};  // descending
}

inline int component_rank(const ImmersionMap& f, const Vec3& x, bool first,
                          double rel_tol = 1e-6) {
    const Vec3 s = component_singular_values(f, x, first);
    int r = 0;
    for (int i = 0; i < 3; ++i)
        if (s[i] > rel_tol * s[0]) ++r;
    return r;
}

}  // namespace nks3

#endif
