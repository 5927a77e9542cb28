#ifndef NKS3_CONNECTION_HPP
#define NKS3_CONNECTION_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <optional>

#include "nks3/linalg.hpp"
#include "nks3/nkspace.hpp"

namespace nks3 {

// Ambient Levi-Civita connection of (S^3 x S^3, g) as a structure-constant
// table over the global frame (E1,E2,E3,F1,F2,F3). All coefficients are
// multiples of 1/3; the table is kept 12-scaled in integers so the Koszul
// cross-check runs in exact arithmetic.

using FrameIndex = int;  // 0..2 -> E_{i+1}, 3..5 -> F_{i-2}

namespace detail {

// 12 * Gamma[a][b][m]: coefficients of nabla_{basis a} basis_b in the frame.
inline const std::array<std::array<std::array<std::int64_t, 6>, 6>, 6>& gamma12() {
    static const auto table = [] {
        std::array<std::array<std::array<std::int64_t, 6>, 6>, 6> t{};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k) {
                    const std::int64_t eps = epsilon_sym(i, j, k);
                    if (eps == 0) continue;
                    t[i][j][k] = -12 * eps;                 // nabla_Ei Ej = -eps Ek
                    t[i][3 + j][k] = 4 * eps;               // nabla_Ei Fj = eps/3 (Ek - Fk)
                    t[i][3 + j][3 + k] = -4 * eps;
                    t[3 + i][j][3 + k] = 4 * eps;           // nabla_Fi Ej = eps/3 (Fk - Ek)
                    t[3 + i][j][k] = -4 * eps;
                    t[3 + i][3 + j][3 + k] = -12 * eps;     // nabla_Fi Fj = -eps Fk
                }
        return t;
    }();
    return table;
}

// Lie bracket coefficients: [basis a, basis b] in the frame (integers).
inline std::array<std::int64_t, 6> bracket(int a, int b) {
    std::array<std::int64_t, 6> c{};
    const int i = a % 3, j = b % 3;
    if (a < 3 && b < 3) {
        for (int k = 0; k < 3; ++k) c[k] = -2 * epsilon_sym(i, j, k);
    } else if (a >= 3 && b >= 3) {
        for (int k = 0; k < 3; ++k) c[3 + k] = -2 * epsilon_sym(i, j, k);
    }
    // [E_i, F_j] = 0
    return c;
}

// 3 * ghat applied to an integer coefficient vector; ghat(E_i,E_j) = 4/3 d_ij,
// ghat(E_i,F_j) = -2/3 d_ij, ghat(F_i,F_j) = 4/3 d_ij.
inline std::array<std::int64_t, 6> apply_G3(const std::array<std::int64_t, 6>& v) {
    std::array<std::int64_t, 6> r{};
    for (int m = 0; m < 3; ++m) {
        r[m] = 4 * v[m] - 2 * v[m + 3];
        r[m + 3] = 4 * v[m + 3] - 2 * v[m];
    }
    return r;
}

}  // namespace detail

inline double gamma_coeff(int a, int b, int m) {
    return static_cast<double>(detail::gamma12()[a][b][m]) / 12.0;
}

// Table lookup: nabla_{basis a} basis_b expressed in the frame.
inline FrameCoeffs nabla_frame(FrameIndex a, FrameIndex b) {
    FrameCoeffs out;
    for (int m = 0; m < 6; ++m) out[m] = gamma_coeff(a, b, m);
    return out;
}

struct KoszulReport {
    std::int64_t max_table_dev = 0;   // 12-scaled |table - Koszul|
    std::int64_t max_torsion_dev = 0; // 12-scaled torsion identity deviation
    std::int64_t max_metric_dev = 0;  // 36-scaled metric-compatibility deviation
    double max_residual() const {
        return static_cast<double>(std::max({max_table_dev, max_torsion_dev, max_metric_dev}));
    }
};

// Recomputes all 216 coefficients from the Koszul formula over the constant
// frame metric and bracket relations, in exact integer arithmetic.
inline KoszulReport koszul_check() {
    using detail::apply_G3;
    using detail::bracket;
    KoszulReport rep;
    for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b) {
            // 2 ghat(gamma, e_m) = ghat([a,b],e_m) - ghat([b,m],e_a) + ghat([m,a],e_b)
            std::array<std::int64_t, 6> rhs{};
            for (int m = 0; m < 6; ++m) {
                std::array<std::int64_t, 6> em{};
                em[m] = 1;
                const auto g_ab = apply_G3(bracket(a, b));
                const auto g_bm = apply_G3(bracket(b, m));
                const auto g_ma = apply_G3(bracket(m, a));
                rhs[m] = g_ab[m] - g_bm[a] + g_ma[b];
            }
            // gamma12 = [[2I, I],[I, 2I]] rhs  (inverse of 2*ghat, 12-scaled)
            for (int m = 0; m < 3; ++m) {
                const std::int64_t k12_e = 2 * rhs[m] + rhs[m + 3];
                const std::int64_t k12_f = rhs[m] + 2 * rhs[m + 3];
                rep.max_table_dev = std::max(
                    rep.max_table_dev, std::abs(k12_e - detail::gamma12()[a][b][m]));
                rep.max_table_dev = std::max(
                    rep.max_table_dev, std::abs(k12_f - detail::gamma12()[a][b][m + 3]));
            }
            // torsion: gamma[a][b] - gamma[b][a] = [a,b]
            const auto br = bracket(a, b);
            for (int m = 0; m < 6; ++m) {
                const std::int64_t t =
                    detail::gamma12()[a][b][m] - detail::gamma12()[b][a][m] - 12 * br[m];
                rep.max_torsion_dev = std::max(rep.max_torsion_dev, std::abs(t));
            }
            // metric compatibility: ghat(nabla_a b, c) + ghat(b, nabla_a c) = 0
            for (int c = 0; c < 6; ++c) {
                const auto gb = apply_G3(detail::gamma12()[a][b]);
                const auto gc = apply_G3(detail::gamma12()[a][c]);
                rep.max_metric_dev = std::max(rep.max_metric_dev, std::abs(gb[c] + gc[b]));
            }
        }
    return rep;
}

// Great-circle flow of a frame field: exact integral curves on S^3 x S^3.
inline SurfacePoint frame_flow(const SurfacePoint& at, FrameIndex a, double t) {
    const ImQuat al = frame_alphas()[a % 3];
    if (a < 3) return {renormalize(at.p.q * exp_im(al * t).q), at.q};
    return {at.p, renormalize(at.q.q * exp_im(al * t).q)};
}

using TangentField = std::function<TangentVec(const Vec3&)>;

namespace detail {

inline std::array<double, 6> coeff_array(const TangentVec& z) {
    const FrameCoeffs c = frame_coeffs(z);
    return {c.e[0], c.e[1], c.e[2], c.f[0], c.f[1], c.f[2]};
}

}  // namespace detail

// Ambient covariant derivative of a tangent field W along a map, in a chart
// direction X at chart point `at`. Central differences with one Richardson
// step on the frame coefficients; the connection term uses the Gamma table.
// If the differential of the underlying map along X is known it can be passed
// in; otherwise it is recovered from the base points of W by the same stencil.
inline TangentVec covariant_derivative(const TangentField& W, const Vec3& X, const Vec3& at,
                                       double h,
                                       const std::optional<TangentVec>& df_x = std::nullopt,
                                       bool richardson = true) {
    if (!(h >= 1e-6 && h <= 1e-2)) throw std::invalid_argument("step h outside [1e-6, 1e-2]");
    const TangentVec w0 = W(at);
    const SurfacePoint base = w0.base;

    const auto coeffs_at = [&](double t) { return detail::coeff_array(W(at + t * X)); };
    const auto central = [&](double step) {
        const auto cp = coeffs_at(step), cm = coeffs_at(-step);
        std::array<double, 6> d{};
        for (int m = 0; m < 6; ++m) d[m] = (cp[m] - cm[m]) / (2.0 * step);
        return d;
    };
    std::array<double, 6> dw = central(h);
    if (richardson) {
        const auto dh = central(h / 2.0);
        for (int m = 0; m < 6; ++m) dw[m] = (4.0 * dh[m] - dw[m]) / 3.0;
    }

    TangentVec dfx_val;
    if (df_x) {
        dfx_val = *df_x;
    } else {
        const auto base_at = [&](double t) { return W(at + t * X).base; };
        const auto central_base = [&](double step) {
            const SurfacePoint bp = base_at(step), bm = base_at(-step);
            return std::pair<Quat, Quat>{(bp.p.q - bm.p.q) / (2.0 * step),
                                         (bp.q.q - bm.q.q) / (2.0 * step)};
        };
        auto [du, dv] = central_base(h);
        if (richardson) {
            auto [du2, dv2] = central_base(h / 2.0);
            du = (du2 * 4.0 - du) / 3.0;
            dv = (dv2 * 4.0 - dv) / 3.0;
        }
        dfx_val = TangentVec(base, du, dv, 1e-3);
    }
    const auto a = detail::coeff_array(dfx_val);
    const auto w = detail::coeff_array(w0);

    FrameCoeffs out;
    for (int m = 0; m < 6; ++m) {
        double s = dw[m];
        for (int ai = 0; ai < 6; ++ai) {
            if (a[ai] == 0.0) continue;
            for (int k = 0; k < 6; ++k) s += a[ai] * w[k] * gamma_coeff(ai, k, m);
        }
        out[m] = s;
    }
    return from_coeffs(base, out);
}

namespace detail {

// Difference tensor between the nearly Kaehler connection and the Levi-Civita
// connection D of the Euclidean product metric (D = project o d/dt). The two
// agree on the pure E-E and F-F sectors; only the mixed sectors differ.
inline double diff_tensor_coeff(int a, int k, int m) {
    const int i = a % 3, j = k % 3;
    if (a < 3 && k >= 3) {  // C(E_i, F_j) = eps/3 (E_m - F_m)
        const double eps = epsilon_sym(i, j, m % 3);
        return (m < 3 ? eps : -eps) / 3.0;
    }
    if (a >= 3 && k < 3) {  // C(F_i, E_j) = eps/3 (F_m - E_m)
        const double eps = epsilon_sym(i, j, m % 3);
        return (m < 3 ? -eps : eps) / 3.0;
    }
    return 0.0;
}

}  // namespace detail

// Finite-difference evaluation of (nabla_X J) Y along great-circle frame
// flows, compared against the G table. The differentiation runs on ambient
// R^8 components, where J genuinely varies from point to point; Euclidean
// derivatives are converted to nabla with the difference tensor. Y is
// extended off the point by Euclidean translation plus projection. Plain
// central differences, so the O(h^2) convergence is observable. Returns the
// g-norm of the deviation.
inline double nablaJ_check(const SurfacePoint& at, const TangentVec& X, const TangentVec& Y,
                           double h) {
    const auto cx = detail::coeff_array(X);

    const auto nabla_along = [&](int a, const std::function<TangentVec(double)>& W) {
        const TangentVec w0 = W(0.0);
        const TangentVec wp = W(h), wm = W(-h);
        const TangentVec euclid =
            euclid_project(at, (wp.u - wm.u) / (2.0 * h), (wp.v - wm.v) / (2.0 * h));
        const auto wc = detail::coeff_array(w0);
        FrameCoeffs corr;
        for (int m = 0; m < 6; ++m) {
            double s = 0;
            for (int k = 0; k < 6; ++k) s += wc[k] * detail::diff_tensor_coeff(a, k, m);
            corr[m] = s;
        }
        return euclid + from_coeffs(at, corr);
    };

    TangentVec total;
    total.base = at;
    for (int a = 0; a < 6; ++a) {
        if (cx[a] == 0.0) continue;
        const auto y_ext = [&](double t) {
            return euclid_project(frame_flow(at, a, t), Y.u, Y.v);
        };
        const TangentVec cov_jy = nabla_along(a, [&](double t) { return apply_J(y_ext(t)); });
        const TangentVec j_cov_y = apply_J(nabla_along(a, y_ext));
        total = total + cx[a] * (cov_jy - j_cov_y);
    }

    const TangentVec table_G = apply_G(X, Y);
    return g_norm(total - table_G);
}

}  // namespace nks3

#endif
