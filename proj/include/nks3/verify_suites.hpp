#ifndef NKS3_VERIFY_SUITES_HPP
#define NKS3_VERIFY_SUITES_HPP

#include <map>
#include <string>

#include "nks3/catalog.hpp"
#include "nks3/connection.hpp"
#include "nks3/invariants.hpp"
#include "nks3/io.hpp"
#include "nks3/rng.hpp"
#include "nks3/transforms.hpp"

namespace nks3 {

using TolOverrides = std::map<std::string, double>;

namespace detail {

inline void add_check(VerifyReport& rep, const TolOverrides& tol, const std::string& name,
                      double residual, double default_tol) {
    CheckResult c;
    c.name = name;
    c.max_residual = residual;
    const auto it = tol.find(name);
    c.tolerance = it != tol.end() ? it->second : default_tol;
    c.pass = residual < c.tolerance;
    rep.checks.push_back(c);
}

inline TangentVec random_tangent_at(SplitMix64& rng, const SurfacePoint& at) {
    FrameCoeffs c;
    for (int i = 0; i < 3; ++i) {
        c.e[i] = rng.uniform(-1, 1);
        c.f[i] = rng.uniform(-1, 1);
    }
    return from_coeffs(at, c);
}

inline Vec3 sample_box(SplitMix64& rng, const ImmersionMap& f, double shrink = 0.8) {
    return {shrink * rng.uniform(f.lo[0], f.hi[0]), shrink * rng.uniform(f.lo[1], f.hi[1]),
            shrink * rng.uniform(f.lo[2], f.hi[2])};
}

}  // namespace detail

// J/P/g/G identities at seeded random points and tangent vectors.
inline VerifyReport suite_structure(int n, std::uint64_t seed, const TolOverrides& tol = {}) {
    VerifyReport rep;
    rep.suite = "structure";
    rep.seed = seed;
    rep.n = n;
    SplitMix64 rng(seed);
    double r_jj = 0, r_gj = 0, r_pp = 0, r_pj = 0, r_gp = 0, r_psym = 0;
    double r_gskew = 0, r_gjlin = 0, r_gorth = 0;
    for (int it = 0; it < n; ++it) {
        const SurfacePoint pt{rng.unit_quat(), rng.unit_quat()};
        const TangentVec x = detail::random_tangent_at(rng, pt);
        const TangentVec y = detail::random_tangent_at(rng, pt);
        const TangentVec jx = apply_J(x), jy = apply_J(y);
        const TangentVec px = apply_P(x), py = apply_P(y);
        r_jj = std::max(r_jj, g_norm(apply_J(jx) + x));
        r_gj = std::max(r_gj, std::abs(metric_g(jx, jy) - metric_g(x, y)));
        r_pp = std::max(r_pp, g_norm(apply_P(px) - x));
        r_pj = std::max(r_pj, g_norm(apply_P(jx) + apply_J(px)));
        r_gp = std::max(r_gp, std::abs(metric_g(px, py) - metric_g(x, y)));
        r_psym = std::max(r_psym, std::abs(metric_g(px, y) - metric_g(x, py)));
        const TangentVec gxy = apply_G(x, y);
        r_gskew = std::max(r_gskew, g_norm(apply_G(y, x) + gxy));
        r_gskew = std::max(r_gskew, g_norm(apply_G(x, x)));
        r_gjlin = std::max(r_gjlin, g_norm(apply_G(x, jy) + apply_J(gxy)));
        r_gorth = std::max({r_gorth, std::abs(metric_g(gxy, x)), std::abs(metric_g(gxy, y))});
    }
    detail::add_check(rep, tol, "J_squared_plus_id", r_jj, 1e-10);
    detail::add_check(rep, tol, "g_J_compatible", r_gj, 1e-10);
    detail::add_check(rep, tol, "P_involutive", r_pp, 1e-10);
    detail::add_check(rep, tol, "PJ_anticommute", r_pj, 1e-10);
    detail::add_check(rep, tol, "g_P_compatible", r_gp, 1e-10);
    detail::add_check(rep, tol, "P_symmetric", r_psym, 1e-10);
    detail::add_check(rep, tol, "G_skew", r_gskew, 1e-10);
    detail::add_check(rep, tol, "G_J_antilinear", r_gjlin, 1e-10);
    detail::add_check(rep, tol, "G_g_orthogonal", r_gorth, 1e-10);
    return rep;
}

// Koszul reconstruction (exact), FD nabla-J against the G table, covariant
// derivative sanity.
inline VerifyReport suite_connection(int n, std::uint64_t seed, const TolOverrides& tol = {}) {
    VerifyReport rep;
    rep.suite = "connection";
    rep.seed = seed;
    rep.n = n;
    const KoszulReport kz = koszul_check();
    detail::add_check(rep, tol, "koszul_table", kz.max_residual(), 1e-14);

    SplitMix64 rng(seed);
    double r_h = 0, r_big = 0, r_half = 0;
    const int probes = std::max(4, std::min(n, 32));
    for (int it = 0; it < probes; ++it) {
        const SurfacePoint pt{rng.unit_quat(), rng.unit_quat()};
        const TangentVec x = detail::random_tangent_at(rng, pt);
        const TangentVec y = detail::random_tangent_at(rng, pt);
        r_h = std::max(r_h, nablaJ_check(pt, x, y, 1e-4));
        r_big = std::max(r_big, nablaJ_check(pt, x, y, 2e-3));
        r_half = std::max(r_half, nablaJ_check(pt, x, y, 1e-3));
    }
    detail::add_check(rep, tol, "nablaJ_fd_vs_table", r_h, 1e-6);
    const double ratio = r_big / std::max(r_half, 1e-300);
    detail::add_check(rep, tol, "nablaJ_order2_ratio_deficit", std::max(0.0, 3.5 - ratio),
                      1e-9);
    return rep;
}

// Catalog Lagrangian residuals, angle spreads, golden comparisons, and the
// flat/curved case data.
inline VerifyReport suite_lagrangian(int n, std::uint64_t seed,
                                     const std::string& goldens_path,
                                     const TolOverrides& tol = {}) {
    VerifyReport rep;
    rep.suite = "lagrangian";
    rep.seed = seed;
    rep.n = n;
    const auto goldens = load_goldens(goldens_path);
    SplitMix64 rng(seed);
    const int per_item = std::max(8, n / 8);

    for (int k = 1; k <= 8; ++k) {
        const CatalogEntry e = catalog_example(k);
        const GoldenEntry& gold = goldens.at(k - 1);
        double worst_lag = 0, worst_spread = 0, worst_gold = 0;
        Vec3 theta0{0, 0, 0};
        for (int it = 0; it < per_item; ++it) {
            const Vec3 x = detail::sample_box(rng, e.map, 0.7);
            worst_lag = std::max(worst_lag, is_lagrangian(e.map, x));
            const Vec3 th = angle_functions(e.map, x).theta;
            if (it == 0) theta0 = th;
            worst_spread = std::max(worst_spread, angle_set_distance(th, theta0));
            worst_gold = std::max(worst_gold, angle_set_distance(th, gold.angles));
        }
        const std::string base = "catalog_" + std::to_string(k) + "_";
        detail::add_check(rep, tol, base + "lagrangian", worst_lag, 1e-8);
        detail::add_check(rep, tol, base + "angle_spread", worst_spread, 1e-6);
        detail::add_check(rep, tol, base + "angle_golden_gap", worst_gold, 1e-6);
    }

    // per-item sff goldens at one sample point each
    for (int k = 1; k <= 8; ++k) {
        const CatalogEntry e = catalog_example(k);
        const GoldenEntry& gold = goldens.at(k - 1);
        const Vec3 x = detail::sample_box(rng, e.map, 0.6);
        const SffData s = second_fundamental_form(e.map, x);
        const std::string base = "catalog_" + std::to_string(k) + "_";
        double kgap = 0;
        for (int pl = 0; pl < 3; ++pl) kgap = std::max(kgap, std::abs(s.K[pl] - gold.K[pl]));
        detail::add_check(rep, tol, base + "K_golden_gap", kgap, 1e-5);
        detail::add_check(rep, tol, base + "h123_golden_gap",
                          std::abs(std::abs(s.h[0][1][2]) - gold.h123_abs), 1e-6);
        if (gold.totally_geodesic)
            detail::add_check(rep, tol, base + "totally_geodesic_h", h_max_abs(s), 1e-6);
        if (gold.omega_cyclic) {
            const double w = *gold.omega_cyclic;
            const double gap = std::max({std::abs(s.omega[0][1][2] - w),
                                         std::abs(s.omega[1][2][0] - w),
                                         std::abs(s.omega[2][0][1] - w)});
            detail::add_check(rep, tol, base + "omega_golden_gap", gap, 1e-5);
        }
    }
    return rep;
}

// Transform laws over the catalog plus the three-case chain.
inline VerifyReport suite_transforms(int n, std::uint64_t seed, const TolOverrides& tol = {}) {
    VerifyReport rep;
    rep.suite = "transforms";
    rep.seed = seed;
    rep.n = n;
    const int per_item = std::max(4, n / 8);
    double metric_gap = 0, angle_gap = 0, lag_transformed = 0;
    for (int k = 1; k <= 8; ++k) {
        const TransformReport tr =
            verify_transform_relations(catalog_example(k).map, per_item, seed + k);
        metric_gap = std::max(metric_gap, tr.max_metric_gap);
        angle_gap = std::max(angle_gap, tr.max_angle_gap);
        lag_transformed = std::max(lag_transformed, tr.max_lagrangian_transformed);
    }
    detail::add_check(rep, tol, "transform_metric_gap", metric_gap, 1e-8);
    detail::add_check(rep, tol, "transform_angle_laws", angle_gap, 1e-6);
    detail::add_check(rep, tol, "transform_lagrangian", lag_transformed, 1e-7);

    // three-case chain pi/3 -> 2pi/3 -> 0 on a constant-angle input
    SplitMix64 rng(seed);
    const ImmersionMap f2 = catalog_example(2).map;
    const ImmersionMap s1 = swap_transform(f2);
    const ImmersionMap s2 = star_transform(s1);
    const Vec3 x = detail::sample_box(rng, f2, 0.7);
    const double c0 = std::abs(angle_functions(f2, x).theta[1] - M_PI / 3);
    const double c1 = std::abs(angle_functions(s1, x).theta[1] - 2 * M_PI / 3);
    const double c2 = std::abs(angle_functions(s2, x).theta[1] - 0.0);
    detail::add_check(rep, tol, "three_case_chain", std::max({c0, c1, c2}), 1e-6);

    // composition law on a non-degenerate item
    const ImmersionMap f8 = catalog_example(8).map;
    const ImmersionMap comp = star_transform(swap_transform(f8));
    const Vec3 x8 = detail::sample_box(rng, f8, 0.7);
    const Vec3 th = angle_functions(f8, x8).theta;
    const Vec3 thc = angle_functions(comp, x8).theta;
    detail::add_check(rep, tol, "composition_law",
                      angle_set_distance(map_angles(th, -M_PI / 3, 1.0), thc), 1e-6);
    return rep;
}

inline VerifyReport run_suite(const std::string& name, int n, std::uint64_t seed,
                              const std::string& goldens_path, const TolOverrides& tol = {}) {
    if (name == "structure") return suite_structure(n, seed, tol);
    if (name == "connection") return suite_connection(n, seed, tol);
    if (name == "lagrangian") return suite_lagrangian(n, seed, goldens_path, tol);
    if (name == "transforms") return suite_transforms(n, seed, tol);
    if (name == "all") {
        VerifyReport rep;
        rep.suite = "all";
        rep.seed = seed;
        rep.n = n;
        for (const char* s : {"structure", "connection", "lagrangian", "transforms"}) {
            const VerifyReport sub = run_suite(s, n, seed, goldens_path, tol);
            for (const auto& c : sub.checks) rep.checks.push_back(c);
        }
        return rep;
    }
    throw std::invalid_argument("unknown suite: " + name);
}

}  // namespace nks3

#endif
