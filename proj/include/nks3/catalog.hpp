#ifndef NKS3_CATALOG_HPP
#define NKS3_CATALOG_HPP

#include <cmath>
#include <stdexcept>
#include <string>

#include "nks3/immersion.hpp"

namespace nks3 {

// The eight constant-angle Lagrangian immersions of the classification.
// Items 1-7 use the exponential chart on S^3 (configurable base point);
// item 8 is the torus map on R^3. 4-tuples encode as a + b i + c j + d k.
struct CatalogEntry {
    int id = 0;
    ImmersionMap map;
};

namespace detail {

struct ChartedPair {
    UnitQuat base;
    UnitQuat u;
    Quat du;  // derivative of u along the requested chart direction
};

inline ChartedPair charted(const UnitQuat& base, const Vec3& x, const Vec3& X) {
    return {base, exp_chart(base, x), exp_chart_diff(base, x, X)};
}

}  // namespace detail

inline CatalogEntry catalog_example(int k, const UnitQuat& base = UnitQuat{}) {
    if (k < 1 || k > 8) throw std::out_of_range("catalog id must be in 1..8");
    static const Quat qi{0, 1, 0, 0}, qj{0, 0, 1, 0}, one{1, 0, 0, 0};
    CatalogEntry entry;
    entry.id = k;
    ImmersionMap& m = entry.map;
    m.dim = 3;
    m.label = "example-" + std::to_string(k);

    switch (k) {
        case 1:  // u -> (u, 1)
            m.eval = [base](const Vec3& x) {
                return SurfacePoint{exp_chart(base, x), UnitQuat{}};
            };
            m.dform = [base](const Vec3& x, const Vec3& X) {
                const auto c = detail::charted(base, x, X);
                return TangentVec({c.u, UnitQuat{}}, c.du, Quat{});
            };
            break;
        case 2:  // u -> (1, u)
            m.eval = [base](const Vec3& x) {
                return SurfacePoint{UnitQuat{}, exp_chart(base, x)};
            };
            m.dform = [base](const Vec3& x, const Vec3& X) {
                const auto c = detail::charted(base, x, X);
                return TangentVec({UnitQuat{}, c.u}, Quat{}, c.du);
            };
            break;
        case 3:  // u -> (u, u)
            m.eval = [base](const Vec3& x) {
                const UnitQuat u = exp_chart(base, x);
                return SurfacePoint{u, u};
            };
            m.dform = [base](const Vec3& x, const Vec3& X) {
                const auto c = detail::charted(base, x, X);
                return TangentVec({c.u, c.u}, c.du, c.du);
            };
            break;
        case 4:  // u -> (u, u i)
            m.eval = [base](const Vec3& x) {
                const UnitQuat u = exp_chart(base, x);
                return SurfacePoint{u, renormalize(u.q * qi)};
            };
            m.dform = [base](const Vec3& x, const Vec3& X) {
                const auto c = detail::charted(base, x, X);
                return TangentVec({c.u, renormalize(c.u.q * qi)}, c.du, c.du * qi);
            };
            break;
        case 5:  // u -> (u^-1, u i u^-1)
            m.eval = [base](const Vec3& x) {
                const UnitQuat u = exp_chart(base, x);
                const Quat ui = conj(u.q);
                return SurfacePoint{renormalize(ui), renormalize(u.q * qi * ui)};
            };
            m.dform = [base](const Vec3& x, const Vec3& X) {
                const auto c = detail::charted(base, x, X);
                const Quat ui = conj(c.u.q);
                const Quat dui = -1.0 * (ui * c.du * ui);
                const Quat dq = c.du * qi * ui + c.u.q * qi * dui;
                return TangentVec({renormalize(ui), renormalize(c.u.q * qi * ui)}, dui, dq);
            };
            break;
        case 6:  // u -> (u i u^-1, u^-1)
            m.eval = [base](const Vec3& x) {
                const UnitQuat u = exp_chart(base, x);
                const Quat ui = conj(u.q);
                return SurfacePoint{renormalize(u.q * qi * ui), renormalize(ui)};
            };
            m.dform = [base](const Vec3& x, const Vec3& X) {
                const auto c = detail::charted(base, x, X);
                const Quat ui = conj(c.u.q);
                const Quat dui = -1.0 * (ui * c.du * ui);
                const Quat dp = c.du * qi * ui + c.u.q * qi * dui;
                return TangentVec({renormalize(c.u.q * qi * ui), renormalize(ui)}, dp, dui);
            };
            break;
        case 7:  // u -> (u i u^-1, u j u^-1)
            m.eval = [base](const Vec3& x) {
                const UnitQuat u = exp_chart(base, x);
                const Quat ui = conj(u.q);
                return SurfacePoint{renormalize(u.q * qi * ui), renormalize(u.q * qj * ui)};
            };
            m.dform = [base](const Vec3& x, const Vec3& X) {
                const auto c = detail::charted(base, x, X);
                const Quat ui = conj(c.u.q);
                const Quat dui = -1.0 * (ui * c.du * ui);
                const Quat dp = c.du * qi * ui + c.u.q * qi * dui;
                const Quat dq = c.du * qj * ui + c.u.q * qj * dui;
                return TangentVec(
                    {renormalize(c.u.q * qi * ui), renormalize(c.u.q * qj * ui)}, dp, dq);
            };
            break;
        case 8: {  // (u, v, w) -> (p(u, w), q(u, v)), constant mean curvature tori
            const auto p_of = [](double u, double w) {
                return Quat{std::cos(u) * std::cos(w), std::cos(u) * std::sin(w),
                            std::sin(u) * std::cos(w), std::sin(u) * std::sin(w)};
            };
            const auto q_of = [](double u, double v) {
                const double s = std::sin(u), c = std::cos(u), r = 1.0 / std::sqrt(2.0);
                return Quat{r * std::cos(v) * (s + c), r * std::sin(v) * (s + c),
                            r * std::cos(v) * (s - c), r * std::sin(v) * (s - c)};
            };
            m.eval = [p_of, q_of](const Vec3& x) {
                return SurfacePoint{UnitQuat(p_of(x[0], x[2])), UnitQuat(q_of(x[0], x[1]))};
            };
            m.dform = [p_of, q_of](const Vec3& x, const Vec3& X) {
                const double u = x[0], v = x[1], w = x[2];
                const Quat pu{-std::sin(u) * std::cos(w), -std::sin(u) * std::sin(w),
                              std::cos(u) * std::cos(w), std::cos(u) * std::sin(w)};
                const Quat pw{-std::cos(u) * std::sin(w), std::cos(u) * std::cos(w),
                              -std::sin(u) * std::sin(w), std::sin(u) * std::cos(w)};
                const double s = std::sin(u), c = std::cos(u), r = 1.0 / std::sqrt(2.0);
                const Quat qu{r * std::cos(v) * (c - s), r * std::sin(v) * (c - s),
                              r * std::cos(v) * (c + s), r * std::sin(v) * (c + s)};
                const Quat qv{-r * std::sin(v) * (s + c), r * std::cos(v) * (s + c),
                              -r * std::sin(v) * (s - c), r * std::cos(v) * (s - c)};
                return TangentVec({UnitQuat(p_of(u, w)), UnitQuat(q_of(u, v))},
                                  pu * X[0] + pw * X[2], qu * X[0] + qv * X[1]);
            };
            m.lo = {-1.2, -1.2, -1.2};
            m.hi = {1.2, 1.2, 1.2};
            break;
        }
    }
    return entry;
}

}  // namespace nks3

#endif
