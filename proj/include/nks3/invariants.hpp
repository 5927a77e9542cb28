#ifndef NKS3_INVARIANTS_HPP
#define NKS3_INVARIANTS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <optional>

#include "nks3/connection.hpp"
#include "nks3/immersion.hpp"

namespace nks3 {

// A/B operators, angle functions and eigenbasis of a Lagrangian immersion at
// a chart point. Angles are reported in [0, pi), ascending; the eigenbasis
// orientation is fixed by requiring a positive E3-component of JG(E1, E2).
struct AngleData {
    Mat3 A, B;                // in the g-orthonormal eigenbasis representation
    Vec3 theta{0, 0, 0};      // ascending, in [0, pi)
    std::array<Vec3, 3> E{};  // chart vectors of the eigenbasis
};

// Cubic form h_ij^k, connection coefficients w_ij^k, and the sectional
// curvatures of the three eigenplanes (12), (13), (23).
struct SffData {
    double h[3][3][3] = {};
    double omega[3][3][3] = {};
    Vec3 K{0, 0, 0};
};

struct ProbeOptions {
    double fd_step = 1e-4;     // step for ambient covariant derivatives
    double field_step = 1e-3;  // step for derivatives of invariant fields
    double lagrangian_tol = 1e-6;
    double cluster_gap = 1e-7;     // eigenvalue clustering for the A/B pair
    double commute_tol = 1e-6;     // allowed off-diagonal of B after joint diag
    double alignment_floor = 0.7;  // smallest acceptable frame overlap
};

struct ABData {
    Mat3 A, B;
    std::array<Vec3, 3> basis;  // g-orthonormal chart basis the matrices refer to
};

// A_ij = g(P df(e_j), df(e_i)), B_ij = g(P df(e_j), J df(e_i)) over a
// g-orthonormal tangent basis. Requires the map to be Lagrangian at x.
inline ABData ab_matrices(const ImmersionMap& f, const Vec3& x,
                          const ProbeOptions& opt = {}) {
    const double res = is_lagrangian(f, x);
    if (res > opt.lagrangian_tol)
        throw std::domain_error("map is not Lagrangian at this point (residual too large)");
    ABData out;
    out.basis = orthonormal_basis(f, x);
    TangentVec d[3], jd[3], pd[3];
    for (int i = 0; i < 3; ++i) {
        d[i] = differential(f, x, out.basis[i]);
        jd[i] = apply_J(d[i]);
        pd[i] = apply_P(d[i]);
    }
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            out.A(i, j) = metric_g(pd[j], d[i]);
            out.B(i, j) = metric_g(pd[j], jd[i]);
        }
    // symmetrize: P is g-symmetric, so A and B are symmetric up to rounding
    out.A = (out.A + out.A.transposed()) * 0.5;
    out.B = (out.B + out.B.transposed()) * 0.5;
    return out;
}

namespace detail {

// Joint diagonalization of the commuting symmetric pair (A, B): diagonalize
// A, then re-diagonalize the restriction of B inside eigenvalue clusters.
inline void joint_diagonalize(const Mat3& A, const Mat3& B, const ProbeOptions& opt,
                              Vec3& a_diag, Vec3& b_diag, Mat3& V) {
    const SymEigen3 ea = sym_eigen(A);
    V = ea.vectors;
    Mat3 Bv = V.transposed() * (B * V);
    int start = 0;
    while (start < 3) {
        int end = start + 1;
        while (end < 3 && ea.values[end] - ea.values[end - 1] < opt.cluster_gap) ++end;
        if (end - start > 1) {
            // rotate the cluster block to diagonalize B there
            Mat3 block = Mat3::identity();
            Mat3 sub;
            for (int i = start; i < end; ++i)
                for (int j = start; j < end; ++j) sub(i - start, j - start) = Bv(i, j);
            // embed the block eigen decomposition
            if (end - start == 2) {
                // skip noise-level rotations so jointly degenerate pairs keep
                // the incoming basis
                if (std::abs(sub(0, 1)) < 1e-12 * (1 + std::abs(sub(0, 0)) + std::abs(sub(1, 1)))) {
                    start = end;
                    continue;
                }
                const double theta =
                    0.5 * std::atan2(2.0 * sub(0, 1), sub(1, 1) - sub(0, 0));
                const double c = std::cos(theta), s = std::sin(theta);
                block(start, start) = c;
                block(start, end - 1) = s;
                block(end - 1, start) = -s;
                block(end - 1, end - 1) = c;
                // order the rotated pair by the B eigenvalue
                Mat3 Vb = V * block;
                Mat3 Bb = Vb.transposed() * (B * Vb);
                if (Bb(start, start) > Bb(end - 1, end - 1)) {
                    Mat3 swap = Mat3::identity();
                    swap(start, start) = 0;
                    swap(end - 1, end - 1) = 0;
                    swap(start, end - 1) = 1;
                    swap(end - 1, start) = -1;
                    block = block * swap;
                }
            } else {  // full 3-cluster: A is scalar, diagonalize B outright
                const SymEigen3 eb = sym_eigen(sub);
                block = eb.vectors;
            }
            V = V * block;
            Bv = V.transposed() * (B * V);
        }
        start = end;
    }
    double offdiag = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (i != j) offdiag = std::max(offdiag, std::abs(Bv(i, j)));
    if (offdiag > opt.commute_tol)
        throw std::domain_error("A and B do not commute within tolerance");
    const Mat3 Av = V.transposed() * (A * V);
    for (int i = 0; i < 3; ++i) {
        a_diag[i] = Av(i, i);
        b_diag[i] = Bv(i, i);
    }
}

inline double theta_of(double cos2t, double sin2t) {
    double t = 0.5 * std::atan2(sin2t, cos2t);
    if (t < 0) t += M_PI;
    if (t >= M_PI) t -= M_PI;
    return t;
}

// raw angle data: joint diagonalization and ascending-angle ordering, no
// sign canonicalization (fields align to a base frame instead).
inline AngleData raw_angles(const ImmersionMap& f, const Vec3& x, const ProbeOptions& opt) {
    const ABData ab = ab_matrices(f, x, opt);
    Vec3 ad, bd;
    Mat3 V;
    joint_diagonalize(ab.A, ab.B, opt, ad, bd, V);

    AngleData out;
    Vec3 theta;
    for (int i = 0; i < 3; ++i) theta[i] = theta_of(ad[i], bd[i]);
    int order[3] = {0, 1, 2};
    for (int i = 0; i < 2; ++i)
        for (int j = i + 1; j < 3; ++j)
            if (theta[order[j]] < theta[order[i]]) std::swap(order[i], order[j]);
    for (int i = 0; i < 3; ++i) {
        const int oi = order[i];
        out.theta[i] = theta[oi];
        Vec3 e{0, 0, 0};
        for (int m = 0; m < 3; ++m) e = e + V(m, oi) * ab.basis[m];
        out.E[i] = e;
        out.A(i, i) = ad[oi];
        out.B(i, i) = bd[oi];
    }
    return out;
}

}  // namespace detail

// Sorted angle triple from A/B matrices over any g-orthonormal tangent basis.
inline Vec3 angles_from_ab(const Mat3& A, const Mat3& B, const ProbeOptions& opt = {}) {
    Vec3 ad, bd;
    Mat3 V;
    const Mat3 As = (A + A.transposed()) * 0.5;
    const Mat3 Bs = (B + B.transposed()) * 0.5;
    detail::joint_diagonalize(As, Bs, opt, ad, bd, V);
    Vec3 th;
    for (int i = 0; i < 3; ++i) th[i] = detail::theta_of(ad[i], bd[i]);
    std::sort(th.begin(), th.end());
    return th;
}

// Canonical angle data at a point: angles ascending, E1/E2 signs fixed by the
// largest chart component, E3 sign fixed by the JG orientation rule.
inline AngleData angle_functions(const ImmersionMap& f, const Vec3& x,
                                 const ProbeOptions& opt = {}) {
    AngleData out = detail::raw_angles(f, x, opt);
    for (int i = 0; i < 2; ++i) {
        int big = 0;
        for (int m = 1; m < 3; ++m)
            if (std::abs(out.E[i][m]) > std::abs(out.E[i][big])) big = m;
        if (out.E[i][big] < 0) out.E[i] = -out.E[i];
    }
    const TangentVec d1 = differential(f, x, out.E[0]);
    const TangentVec d2 = differential(f, x, out.E[1]);
    const TangentVec d3 = differential(f, x, out.E[2]);
    const double s = metric_g(apply_J(apply_G(d1, d2)), d3);
    if (s < 0) out.E[2] = -out.E[2];
    return out;
}

// Smooth eigenframe field near a base point. Joint eigenvalue clusters of
// (A, B) are tracked by their spectral projectors, which vary smoothly even
// through exact degeneracies; the base frame is projected onto the cluster
// subspaces and re-orthonormalized. Per-point eigenvector extraction is never
// used off the anchor, so no sign or ordering jitter enters derivative
// stencils. Throws when a cluster projection degrades (angle crossing).
class EigenframeField {
  public:
    EigenframeField(const ImmersionMap& f, const Vec3& x0, const ProbeOptions& opt = {})
        : f_(&f), opt_(opt), base_(angle_functions(f, x0, opt)) {
        // cluster structure from the base (cos 2t, sin 2t) pairs
        int assigned[3] = {-1, -1, -1};
        for (int i = 0; i < 3; ++i) {
            if (assigned[i] >= 0) continue;
            assigned[i] = n_clusters_;
            for (int j = i + 1; j < 3; ++j) {
                if (assigned[j] >= 0) continue;
                const double d = std::hypot(base_.A(i, i) - base_.A(j, j),
                                            base_.B(i, i) - base_.B(j, j));
                if (d < 1e-6) assigned[j] = n_clusters_;
            }
            ++n_clusters_;
        }
        for (int i = 0; i < 3; ++i) cluster_of_[i] = assigned[i];
        for (int c = 0; c < n_clusters_; ++c) {
            double a = 0, b = 0;
            int n = 0;
            for (int i = 0; i < 3; ++i)
                if (cluster_of_[i] == c) {
                    a += base_.A(i, i);
                    b += base_.B(i, i);
                    ++n;
                }
            cluster_a_[c] = a / n;
            cluster_b_[c] = b / n;
        }
    }

    const AngleData& base() const { return base_; }

    AngleData at(const Vec3& y) const {
        const ABData ab = ab_matrices(*f_, y, opt_);

        // spectral projector of each cluster, as a polynomial in (A, B)
        Mat3 proj[3];
        for (int c = 0; c < n_clusters_; ++c) {
            Mat3 P = Mat3::identity();
            for (int c2 = 0; c2 < n_clusters_; ++c2) {
                if (c2 == c) continue;
                const double da = cluster_a_[c] - cluster_a_[c2];
                const double db = cluster_b_[c] - cluster_b_[c2];
                const double d2 = da * da + db * db;
                Mat3 factor = (ab.A - Mat3::identity() * cluster_a_[c2]) * (da / d2) +
                              (ab.B - Mat3::identity() * cluster_b_[c2]) * (db / d2);
                P = P * factor;
            }
            proj[c] = P;
        }

        // base frame in the g-orthonormal coordinates at y
        TangentVec dgs[3];
        for (int m = 0; m < 3; ++m) dgs[m] = differential(*f_, y, ab.basis[m]);
        Vec3 base_coords[3];
        for (int i = 0; i < 3; ++i) {
            const TangentVec dbi = differential(*f_, y, base_.E[i]);
            for (int m = 0; m < 3; ++m) base_coords[i][m] = metric_g(dbi, dgs[m]);
        }

        // project onto the cluster subspaces, then orthonormalize in order
        Vec3 v[3];
        for (int i = 0; i < 3; ++i) {
            v[i] = proj[cluster_of_[i]] * base_coords[i];
            for (int j = 0; j < i; ++j)
                if (cluster_of_[j] == cluster_of_[i]) v[i] = v[i] - vdot(v[i], v[j]) * v[j];
            const double n = vnorm(v[i]);
            if (n < opt_.alignment_floor)
                throw std::domain_error(
                    "eigenframe alignment failed (angle crossing near the probe point)");
            v[i] = v[i] * (1.0 / n);
        }

        AngleData out;
        for (int i = 0; i < 3; ++i) {
            const double a_i = vdot(v[i], ab.A * v[i]);
            const double b_i = vdot(v[i], ab.B * v[i]);
            out.A(i, i) = a_i;
            out.B(i, i) = b_i;
            out.theta[i] = detail::theta_of(a_i, b_i);
            // unwrap against the base angle: theta is defined mod pi
            const double t0 = base_.theta[i];
            if (out.theta[i] - t0 > M_PI / 2) out.theta[i] -= M_PI;
            if (t0 - out.theta[i] > M_PI / 2) out.theta[i] += M_PI;
            Vec3 e{0, 0, 0};
            for (int m = 0; m < 3; ++m) e = e + v[i][m] * ab.basis[m];
            out.E[i] = e;
        }
        return out;
    }

    const ImmersionMap& map() const { return *f_; }
    const ProbeOptions& options() const { return opt_; }

  private:
    const ImmersionMap* f_;
    ProbeOptions opt_;
    AngleData base_;
    int n_clusters_ = 0;
    int cluster_of_[3] = {0, 0, 0};
    double cluster_a_[3] = {0, 0, 0};
    double cluster_b_[3] = {0, 0, 0};
};

inline double gauss_sectional_curvature(const Vec3& theta, const double h[3][3][3], int i,
                                        int j) {
    double commutator = 0;
    for (int m = 0; m < 3; ++m)
        commutator += h[i][m][i] * h[m][j][j] - h[i][m][j] * h[m][j][i];
    return 5.0 / 12.0 + std::cos(2.0 * (theta[i] - theta[j])) / 3.0 + commutator;
}

// h_ij^k and w_ij^k at y from ambient covariant derivatives of the aligned
// eigenframe field; sectional curvatures from the Gauss equation.
inline SffData sff_at(const EigenframeField& field, const Vec3& y) {
    const ImmersionMap& f = field.map();
    const ProbeOptions& opt = field.options();
    const AngleData ang = field.at(y);

    TangentVec d[3], jd[3];
    for (int k = 0; k < 3; ++k) {
        d[k] = differential(f, y, ang.E[k]);
        jd[k] = apply_J(d[k]);
    }

    double omega_raw[3][3][3];
    SffData out;
    for (int j = 0; j < 3; ++j) {
        const TangentField Wj = [&field, &f, j](const Vec3& z) {
            return differential(f, z, field.at(z).E[j]);
        };
        for (int i = 0; i < 3; ++i) {
            const TangentVec Dij =
                covariant_derivative(Wj, ang.E[i], y, opt.fd_step, d[i]);
            for (int k = 0; k < 3; ++k) {
                out.h[i][j][k] = metric_g(Dij, jd[k]);
                omega_raw[i][j][k] = metric_g(Dij, d[k]);
            }
        }
    }
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                out.omega[i][j][k] = 0.5 * (omega_raw[i][j][k] - omega_raw[i][k][j]);

    out.K = {gauss_sectional_curvature(ang.theta, out.h, 0, 1),
             gauss_sectional_curvature(ang.theta, out.h, 0, 2),
             gauss_sectional_curvature(ang.theta, out.h, 1, 2)};
    return out;
}

inline SffData second_fundamental_form(const ImmersionMap& f, const Vec3& x,
                                       const ProbeOptions& opt = {}) {
    return sff_at(EigenframeField(f, x, opt), x);
}

inline double sectional_curvature(const ImmersionMap& f, const Vec3& x, int i, int j,
                                  const ProbeOptions& opt = {}) {
    const EigenframeField field(f, x, opt);
    const SffData s = sff_at(field, x);
    return gauss_sectional_curvature(field.base().theta, s.h, i, j);
}

inline double h_total_symmetry_residual(const SffData& s) {
    double r = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) {
                r = std::max(r, std::abs(s.h[i][j][k] - s.h[j][i][k]));
                r = std::max(r, std::abs(s.h[i][j][k] - s.h[i][k][j]));
            }
    return r;
}

inline double h_max_abs(const SffData& s) {
    double r = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) r = std::max(r, std::abs(s.h[i][j][k]));
    return r;
}

inline double omega_max_abs(const SffData& s) {
    double r = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) r = std::max(r, std::abs(s.omega[i][j][k]));
    return r;
}

// Intrinsic sectional curvature of the induced metric by nested finite
// differences of the Christoffel symbols; the independent cross-check of the
// Gauss-equation path.
inline double intrinsic_sectional_curvature(const ImmersionMap& f, const Vec3& x,
                                            const Vec3& Xc, const Vec3& Yc,
                                            double h = 1e-3) {
    const auto christoffel = [&](const Vec3& y) {
        Mat3 dg[3];
        for (int a = 0; a < 3; ++a) {
            Vec3 dir{0, 0, 0};
            dir[a] = 1.0;
            const Mat3 gp = induced_metric(f, y + h * dir);
            const Mat3 gm = induced_metric(f, y - h * dir);
            dg[a] = (gp - gm) * (0.5 / h);
        }
        const Mat3 ginv = inverse(induced_metric(f, y));
        std::array<Mat3, 3> gamma;  // gamma[k](a, b)
        for (int k = 0; k < 3; ++k)
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) {
                    double s = 0;
                    for (int l = 0; l < 3; ++l)
                        s += ginv(k, l) * (dg[a](b, l) + dg[b](a, l) - dg[l](a, b));
                    gamma[k](a, b) = 0.5 * s;
                }
        return gamma;
    };

    std::array<Mat3, 3> dgamma[3];  // d_a gamma[k]
    for (int a = 0; a < 3; ++a) {
        Vec3 dir{0, 0, 0};
        dir[a] = 1.0;
        const auto gp = christoffel(x + h * dir);
        const auto gm = christoffel(x - h * dir);
        for (int k = 0; k < 3; ++k) dgamma[a][k] = (gp[k] - gm[k]) * (0.5 / h);
    }
    const auto gamma = christoffel(x);
    const Mat3 g = induced_metric(f, x);

    // R(X, Y) Y components, then lower with g and contract with X
    Vec3 ryy{0, 0, 0};
    for (int l = 0; l < 3; ++l) {
        double s = 0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k) {
                    double term = dgamma[i][l](j, k) - dgamma[j][l](i, k);
                    for (int m = 0; m < 3; ++m)
                        term += gamma[l](i, m) * gamma[m](j, k) -
                                gamma[l](j, m) * gamma[m](i, k);
                    s += Xc[i] * Yc[j] * Yc[k] * term;
                }
        ryy[l] = s;
    }
    const double num = vdot(Xc, g * ryy);
    const double xx = vdot(Xc, g * Xc), yy = vdot(Yc, g * Yc), xy = vdot(Xc, g * Yc);
    return num / (xx * yy - xy * xy);
}

struct GaussCodazziReport {
    Vec3 gauss_vs_intrinsic{0, 0, 0};  // per eigenplane
    double codazzi_residual = 0;       // general Codazzi components
    bool constant_angle = false;
    bool totally_geodesic = false;
    double consconn_residual = 0;  // constant-angle connection forms
    double conscod_residual = 0;   // constant-angle Codazzi system
    double consgauss_residual = 0; // constant-angle Gauss system
    double max_residual() const {
        double r = std::max({gauss_vs_intrinsic[0], gauss_vs_intrinsic[1],
                             gauss_vs_intrinsic[2], codazzi_residual});
        if (constant_angle && !totally_geodesic)
            r = std::max({r, consconn_residual, conscod_residual, consgauss_residual});
        return r;
    }
};

namespace detail {

// (nabla h)(E_i, E_j, E_k) component along J E_l, given the FD derivative of
// the h field and the connection data at the point.
inline double nabla_h_component(const SffData& s, const double dh[3][3][3][3], int i, int j,
                                int k, int l) {
    static const double c = 1.0 / std::sqrt(3.0);
    double r = dh[i][j][k][l];
    for (int m = 0; m < 3; ++m) {
        r += s.h[j][k][m] * (s.omega[i][m][l] - c * epsilon_sym(i, m, l));
        r -= s.omega[i][j][m] * s.h[m][k][l];
        r -= s.omega[i][k][m] * s.h[j][m][l];
    }
    return r;
}

}  // namespace detail

// Residuals of the Gauss equation against intrinsic FD curvature, of the
// general Codazzi equation, and (for constant angles) of the constant-angle
// connection/Codazzi/Gauss systems.
inline GaussCodazziReport gauss_codazzi_residuals(const ImmersionMap& f, const Vec3& x,
                                                  const ProbeOptions& opt = {}) {
    const EigenframeField field(f, x, opt);
    const AngleData& ang = field.base();
    const SffData s = sff_at(field, x);
    GaussCodazziReport rep;

    // Gauss vs intrinsic curvature
    const int planes[3][2] = {{0, 1}, {0, 2}, {1, 2}};
    for (int pl = 0; pl < 3; ++pl) {
        const double kg = gauss_sectional_curvature(ang.theta, s.h, planes[pl][0], planes[pl][1]);
        const double ki = intrinsic_sectional_curvature(f, x, ang.E[planes[pl][0]],
                                                        ang.E[planes[pl][1]]);
        rep.gauss_vs_intrinsic[pl] = std::abs(kg - ki);
    }

    // FD of the h field along the eigen-directions
    double dh[3][3][3][3];
    double theta_spread = 0;
    const double h2 = opt.field_step;
    for (int i = 0; i < 3; ++i) {
        const Vec3 dir = ang.E[i];
        const SffData sp = sff_at(field, x + h2 * dir);
        const SffData sm = sff_at(field, x - h2 * dir);
        const AngleData ap = field.at(x + h2 * dir), am = field.at(x - h2 * dir);
        for (int m = 0; m < 3; ++m)
            theta_spread = std::max({theta_spread, std::abs(ap.theta[m] - ang.theta[m]),
                                     std::abs(am.theta[m] - ang.theta[m])});
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l)
                    dh[i][j][k][l] = (sp.h[j][k][l] - sm.h[j][k][l]) / (2.0 * h2);
    }

    // general Codazzi residual
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            if (i == j) continue;
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l) {
                    const double lhs = detail::nabla_h_component(s, dh, i, j, k, l) -
                                       detail::nabla_h_component(s, dh, j, i, k, l);
                    const double a_i = std::cos(2 * ang.theta[i]),
                                 b_i = std::sin(2 * ang.theta[i]);
                    const double a_j = std::cos(2 * ang.theta[j]),
                                 b_j = std::sin(2 * ang.theta[j]);
                    double rhs = 0;
                    if (j == k && i == l) rhs += a_j * b_i;
                    if (i == k && j == l) rhs -= a_i * b_j;
                    if (j == k && i == l) rhs -= b_j * a_i;
                    if (i == k && j == l) rhs += b_i * a_j;
                    rhs /= 3.0;
                    rep.codazzi_residual = std::max(rep.codazzi_residual, std::abs(lhs - rhs));
                }
        }

    rep.constant_angle = theta_spread < 1e-5;
    rep.totally_geodesic = h_max_abs(s) < 1e-4;
    if (rep.constant_angle && !rep.totally_geodesic) {
        const double h123 = s.h[0][1][2];
        const double t1 = ang.theta[0], t2 = ang.theta[1], t3 = ang.theta[2];
        const double s6 = std::sqrt(3.0) / 6.0, is3 = 1.0 / std::sqrt(3.0);
        const auto cot = [](double a) { return std::cos(a) / std::sin(a); };
        rep.consconn_residual =
            std::max({std::abs(s.omega[0][1][2] - (s6 - cot(t2 - t3) * h123)),
                      std::abs(s.omega[1][2][0] - (s6 + cot(t1 - t3) * h123)),
                      std::abs(s.omega[2][0][1] - (s6 - cot(t1 - t2) * h123))});
        // E_i(h_12^3) = 0 plus the three displayed Codazzi combinations
        double cod = std::max({std::abs(dh[0][0][1][2]), std::abs(dh[1][0][1][2]),
                               std::abs(dh[2][0][1][2])});
        cod = std::max(cod, std::abs(h123 * (2 * (s.omega[0][2][1] + s.omega[1][0][2]) + is3) -
                                     std::sin(2 * (t1 - t2)) / 3.0));
        cod = std::max(cod, std::abs(h123 * (2 * (s.omega[0][1][2] + s.omega[2][0][1]) - is3) -
                                     std::sin(2 * (t1 - t3)) / 3.0));
        cod = std::max(cod, std::abs(h123 * (2 * (s.omega[1][0][2] + s.omega[2][1][0]) + is3) -
                                     std::sin(2 * (t2 - t3)) / 3.0));
        rep.conscod_residual = cod;
        const double h2v = h123 * h123;
        rep.consgauss_residual = std::max(
            {std::abs(5.0 / 12.0 + std::cos(2 * (t1 - t2)) / 3.0 - h2v -
                      (-s.omega[1][0][2] * s.omega[0][2][1] + s.omega[0][1][2] * s.omega[2][0][1] -
                       s.omega[1][0][2] * s.omega[2][0][1])),
             std::abs(5.0 / 12.0 + std::cos(2 * (t1 - t3)) / 3.0 - h2v -
                      (-s.omega[2][0][1] * s.omega[0][1][2] + s.omega[0][2][1] * s.omega[1][0][2] -
                       s.omega[2][0][1] * s.omega[1][0][2])),
             std::abs(5.0 / 12.0 + std::cos(2 * (t2 - t3)) / 3.0 - h2v -
                      (-s.omega[2][1][0] * s.omega[1][0][2] + s.omega[1][2][0] * s.omega[0][1][2] -
                       s.omega[2][1][0] * s.omega[0][1][2]))});
    }
    return rep;
}

struct AngleDerivativeReport {
    double derv1 = 0;  // max |E_i(theta_j) + h_jj^i|
    double derv2 = 0;  // residual of the h/omega angle-difference relation
};

// FD check of the angle-derivative laws.
inline AngleDerivativeReport angle_derivative_check(const ImmersionMap& f, const Vec3& x,
                                                    const ProbeOptions& opt = {}) {
    const EigenframeField field(f, x, opt);
    const AngleData& ang = field.base();
    const SffData s = sff_at(field, x);
    AngleDerivativeReport rep;
    const double h2 = opt.field_step;
    for (int i = 0; i < 3; ++i) {
        const AngleData ap = field.at(x + h2 * ang.E[i]);
        const AngleData am = field.at(x - h2 * ang.E[i]);
        for (int j = 0; j < 3; ++j) {
            const double dtheta = (ap.theta[j] - am.theta[j]) / (2.0 * h2);
            rep.derv1 = std::max(rep.derv1, std::abs(dtheta + s.h[j][j][i]));
        }
    }
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) {
                if (i == j || j == k || i == k) continue;
                const double dt = ang.theta[j] - ang.theta[k];
                const double lhs = s.h[i][j][k] * std::cos(dt);
                const double rhs =
                    (std::sqrt(3.0) / 6.0 * epsilon_sym(i, j, k) - s.omega[i][j][k]) *
                    std::sin(dt);
                rep.derv2 = std::max(rep.derv2, std::abs(lhs - rhs));
            }
    return rep;
}

// FD check of the covariant-derivative laws for the A and B operators.
inline double nabla_ab_residual(const ImmersionMap& f, const Vec3& x,
                                const ProbeOptions& opt = {}) {
    const EigenframeField field(f, x, opt);
    const AngleData& ang = field.base();
    const SffData s = sff_at(field, x);
    const double h2 = opt.field_step;

    // A, B entries in the aligned frame as fields over the chart
    const auto ab_entries = [&](const Vec3& y, Mat3& Am, Mat3& Bm) {
        const AngleData a = field.at(y);
        TangentVec d[3], jd[3], pd[3];
        for (int i = 0; i < 3; ++i) {
            d[i] = differential(f, y, a.E[i]);
            jd[i] = apply_J(d[i]);
            pd[i] = apply_P(d[i]);
        }
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                Am(i, j) = metric_g(pd[j], d[i]);
                Bm(i, j) = metric_g(pd[j], jd[i]);
            }
    };

    double res = 0;
    const double c = 0.5 / std::sqrt(3.0);
    for (int a = 0; a < 3; ++a) {
        Mat3 Ap, Bp, Am_, Bm_;
        ab_entries(x + h2 * ang.E[a], Ap, Bp);
        ab_entries(x - h2 * ang.E[a], Am_, Bm_);
        const Mat3 dA = (Ap - Am_) * (0.5 / h2);
        const Mat3 dB = (Bp - Bm_) * (0.5 / h2);
        for (int b = 0; b < 3; ++b)
            for (int cc = 0; cc < 3; ++cc) {
                const double cos_b = std::cos(2 * ang.theta[b]),
                             sin_b = std::sin(2 * ang.theta[b]);
                const double cos_c = std::cos(2 * ang.theta[cc]),
                             sin_c = std::sin(2 * ang.theta[cc]);
                // covariant derivative entries (diagonal A, B at the point)
                double lhsA = dA(cc, b), lhsB = dB(cc, b);
                for (int m = 0; m < 3; ++m) {
                    const double Amb = (m == b) ? std::cos(2 * ang.theta[m]) : 0.0;
                    const double Acm = (cc == m) ? std::cos(2 * ang.theta[m]) : 0.0;
                    const double Bmb = (m == b) ? std::sin(2 * ang.theta[m]) : 0.0;
                    const double Bcm = (cc == m) ? std::sin(2 * ang.theta[m]) : 0.0;
                    lhsA += Amb * s.omega[a][m][cc] - s.omega[a][b][m] * Acm;
                    lhsB += Bmb * s.omega[a][m][cc] - s.omega[a][b][m] * Bcm;
                }
                const double eps = epsilon_sym(a, b, cc);
                const double rhsA = s.h[cc][b][a] * sin_c + sin_b * s.h[a][b][cc] +
                                    c * eps * (cos_b - cos_c);
                const double rhsB = -cos_b * s.h[a][b][cc] - s.h[cc][b][a] * cos_c +
                                    c * eps * (sin_b - sin_c);
                res = std::max({res, std::abs(lhsA - rhsA), std::abs(lhsB - rhsB)});
            }
    }
    return res;
}

inline double angle_sum_mod_pi(const Vec3& theta) {
    double s = std::fmod(theta[0] + theta[1] + theta[2], M_PI);
    if (s < 0) s += M_PI;
    return std::min(s, M_PI - s);
}

}  // namespace nks3

#endif
