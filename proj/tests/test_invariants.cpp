#include <catch2/catch_amalgamated.hpp>

#include "nks3/catalog.hpp"
#include "nks3/invariants.hpp"
#include "nks3/rng.hpp"

using namespace nks3;

namespace {

Vec3 random_chart_point(SplitMix64& rng, const ImmersionMap& f, double shrink = 0.6) {
    return {shrink * rng.uniform(f.lo[0], f.hi[0]), shrink * rng.uniform(f.lo[1], f.hi[1]),
            shrink * rng.uniform(f.lo[2], f.hi[2])};
}

constexpr double kPi3 = M_PI / 3.0;

}  // namespace

TEST_CASE("A and B on the closed-form examples") {
    // example 3: P fixes diagonal tangent vectors -> A = I, B = 0
    const CatalogEntry e3 = catalog_example(3);
    const ABData ab3 = ab_matrices(e3.map, {0.2, -0.3, 0.4});
    CHECK(max_abs(ab3.A - Mat3::identity()) < 1e-12);
    CHECK(max_abs(ab3.B) < 1e-12);

    // example 1: A = -1/2 I, B = -sqrt(3)/2 I
    const CatalogEntry e1 = catalog_example(1);
    const ABData ab1 = ab_matrices(e1.map, {0.1, 0.2, -0.5});
    CHECK(max_abs(ab1.A + Mat3::identity() * 0.5) < 1e-12);
    CHECK(max_abs(ab1.B + Mat3::identity() * (std::sqrt(3.0) / 2.0)) < 1e-12);

    // non-Lagrangian input is rejected
    ImmersionMap bad;
    bad.dim = 3;
    bad.eval = [](const Vec3& x) {
        const UnitQuat u = exp_chart(UnitQuat{}, x);
        return SurfacePoint{u, renormalize(u.q * exp_im({0, 0.2 * x[0], 0}).q)};
    };
    CHECK_THROWS_AS(ab_matrices(bad, Vec3{0.4, 0.1, 0.2}), std::domain_error);
}

TEST_CASE("A^2 + B^2 = Id and commutation on random catalog points") {
    SplitMix64 rng(61);
    for (int k = 1; k <= 8; ++k) {
        const CatalogEntry e = catalog_example(k);
        const Vec3 x = random_chart_point(rng, e.map);
        const ABData ab = ab_matrices(e.map, x);
        CHECK(max_abs(ab.A * ab.A + ab.B * ab.B - Mat3::identity()) < 1e-8);
        CHECK(max_abs(ab.A * ab.B - ab.B * ab.A) < 1e-8);
    }
}

TEST_CASE("angle functions of the closed-form examples") {
    const CatalogEntry e3 = catalog_example(3);
    const AngleData a3 = angle_functions(e3.map, {0.3, 0.1, -0.2});
    for (int i = 0; i < 3; ++i) CHECK(a3.theta[i] == Catch::Approx(0.0).margin(1e-9));

    const CatalogEntry e1 = catalog_example(1);
    const AngleData a1 = angle_functions(e1.map, {0.2, -0.4, 0.1});
    for (int i = 0; i < 3; ++i) CHECK(a1.theta[i] == Catch::Approx(2 * kPi3).margin(1e-9));
    CHECK(angle_sum_mod_pi(a1.theta) < 1e-9);

    const CatalogEntry e8 = catalog_example(8);
    const AngleData a8 = angle_functions(e8.map, {0.5, -0.7, 0.9});
    CHECK(a8.theta[0] == Catch::Approx(0.0).margin(1e-9));
    CHECK(a8.theta[1] == Catch::Approx(kPi3).margin(1e-9));
    CHECK(a8.theta[2] == Catch::Approx(2 * kPi3).margin(1e-9));
}

TEST_CASE("eigenbasis satisfies the JG orientation rule") {
    SplitMix64 rng(62);
    for (int k : {1, 3, 7, 8}) {
        const CatalogEntry e = catalog_example(k);
        const Vec3 x = random_chart_point(rng, e.map);
        const AngleData a = angle_functions(e.map, x);
        const TangentVec d1 = differential(e.map, x, a.E[0]);
        const TangentVec d2 = differential(e.map, x, a.E[1]);
        const TangentVec d3 = differential(e.map, x, a.E[2]);
        const double s = metric_g(apply_J(apply_G(d1, d2)), d3);
        INFO("catalog item " << k);
        CHECK(s == Catch::Approx(1.0 / std::sqrt(3.0)).margin(1e-9));
    }
}

TEST_CASE("canonicalization is stable under a perturbed starting chart") {
    // recomputation through a rotated chart gives identical angles and |h123|
    const CatalogEntry e8 = catalog_example(8);
    const Vec3 x{0.4, 0.2, -0.3};
    const AngleData ref = angle_functions(e8.map, x);
    const SffData sref = second_fundamental_form(e8.map, x);

    // chart reparametrization: orthogonal mix of the coordinates
    const double c = std::cos(0.37), s = std::sin(0.37);
    ImmersionMap rot = e8.map;
    const auto mix = [c, s](const Vec3& y) {
        return Vec3{c * y[0] - s * y[1], s * y[0] + c * y[1], y[2]};
    };
    const auto orig = e8.map;
    rot.eval = [orig, mix](const Vec3& y) { return orig.eval(mix(y)); };
    rot.dform = [orig, mix](const Vec3& y, const Vec3& X) {
        return orig.dform(mix(y), mix(X));
    };
    const Vec3 xr{c * x[0] + s * x[1], -s * x[0] + c * x[1], x[2]};  // mix(xr) = x
    const AngleData alt = angle_functions(rot, xr);
    const SffData salt = second_fundamental_form(rot, xr);
    for (int i = 0; i < 3; ++i) CHECK(alt.theta[i] == Catch::Approx(ref.theta[i]).margin(1e-9));
    CHECK(std::abs(salt.h[0][1][2]) == Catch::Approx(std::abs(sref.h[0][1][2])).margin(1e-7));
}

TEST_CASE("flat case: example 8 invariants") {
    SplitMix64 rng(64);
    const CatalogEntry e8 = catalog_example(8);
    const Vec3 x = random_chart_point(rng, e8.map);
    const SffData s = second_fundamental_form(e8.map, x);
    CHECK(std::abs(s.h[0][1][2]) == Catch::Approx(0.5).margin(1e-6));
    // components with a repeated index all vanish
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                if (i == j || j == k || i == k) CHECK(std::abs(s.h[i][j][k]) < 1e-6);
    CHECK(omega_max_abs(s) < 1e-5);
    for (int pl = 0; pl < 3; ++pl) CHECK(std::abs(s.K[pl]) < 1e-5);
    CHECK(h_total_symmetry_residual(s) < 1e-7);
}

TEST_CASE("curved case: example 7 invariants") {
    SplitMix64 rng(65);
    const CatalogEntry e7 = catalog_example(7);
    const Vec3 x = random_chart_point(rng, e7.map);
    const SffData s = second_fundamental_form(e7.map, x);
    const double w = std::sqrt(3.0) / 4.0;
    CHECK(s.omega[0][1][2] == Catch::Approx(w).margin(1e-5));
    CHECK(s.omega[1][2][0] == Catch::Approx(w).margin(1e-5));
    CHECK(s.omega[2][0][1] == Catch::Approx(w).margin(1e-5));
    CHECK(std::abs(s.h[0][1][2]) == Catch::Approx(0.25).margin(1e-6));
    for (int pl = 0; pl < 3; ++pl)
        CHECK(s.K[pl] == Catch::Approx(3.0 / 16.0).margin(1e-5));
}

TEST_CASE("omega antisymmetry is exact by construction") {
    SplitMix64 rng(66);
    const CatalogEntry e7 = catalog_example(7);
    const SffData s = second_fundamental_form(e7.map, random_chart_point(rng, e7.map));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) CHECK(s.omega[i][j][k] == -s.omega[i][k][j]);
}

TEST_CASE("totally geodesic examples have vanishing h") {
    SplitMix64 rng(67);
    for (int k = 1; k <= 6; ++k) {
        const CatalogEntry e = catalog_example(k);
        const SffData s = second_fundamental_form(e.map, random_chart_point(rng, e.map));
        INFO("catalog item " << k);
        CHECK(h_max_abs(s) < 1e-6);
    }
}

TEST_CASE("equal angles over a region force totally geodesic") {
    // items 4, 5, 6 carry a doubled angle; h stays small across samples
    SplitMix64 rng(68);
    for (int k : {4, 5, 6}) {
        const CatalogEntry e = catalog_example(k);
        for (int it = 0; it < 3; ++it) {
            const Vec3 x = random_chart_point(rng, e.map);
            const AngleData a = angle_functions(e.map, x);
            const double doubled =
                std::min(std::abs(a.theta[1] - a.theta[0]), std::abs(a.theta[2] - a.theta[1]));
            REQUIRE(doubled < 1e-6);
            const SffData s = second_fundamental_form(e.map, x);
            INFO("catalog item " << k);
            CHECK(h_max_abs(s) < 1e-4);
        }
    }
}

TEST_CASE("sectional curvature of example 1 via Gauss and intrinsic FD") {
    SplitMix64 rng(69);
    const CatalogEntry e1 = catalog_example(1);
    const Vec3 x = random_chart_point(rng, e1.map);
    CHECK(sectional_curvature(e1.map, x, 0, 1) == Catch::Approx(0.75).margin(1e-5));
    const AngleData a = angle_functions(e1.map, x);
    const double ki = intrinsic_sectional_curvature(e1.map, x, a.E[0], a.E[1]);
    CHECK(ki == Catch::Approx(0.75).margin(1e-4));
}

TEST_CASE("Gauss-Codazzi residual report on example 8") {
    SplitMix64 rng(70);
    const CatalogEntry e8 = catalog_example(8);
    const Vec3 x = random_chart_point(rng, e8.map);
    const GaussCodazziReport rep = gauss_codazzi_residuals(e8.map, x);
    CHECK(rep.constant_angle);
    CHECK_FALSE(rep.totally_geodesic);
    CHECK(rep.consconn_residual < 1e-5);
    CHECK(rep.conscod_residual < 1e-5);
    CHECK(rep.consgauss_residual < 1e-5);
    CHECK(rep.codazzi_residual < 1e-4);
    for (int pl = 0; pl < 3; ++pl) CHECK(rep.gauss_vs_intrinsic[pl] < 1e-4);
}

TEST_CASE("Gauss-Codazzi residual report on the curved case") {
    SplitMix64 rng(71);
    const CatalogEntry e7 = catalog_example(7);
    const GaussCodazziReport rep =
        gauss_codazzi_residuals(e7.map, random_chart_point(rng, e7.map));
    CHECK(rep.constant_angle);
    CHECK_FALSE(rep.totally_geodesic);
    CHECK(rep.consgauss_residual < 1e-5);
    CHECK(rep.conscod_residual < 1e-5);
    CHECK(rep.consconn_residual < 1e-5);
}

TEST_CASE("Gauss equation versus intrinsic curvature on a totally geodesic example") {
    SplitMix64 rng(72);
    const CatalogEntry e1 = catalog_example(1);
    const GaussCodazziReport rep =
        gauss_codazzi_residuals(e1.map, random_chart_point(rng, e1.map));
    for (int pl = 0; pl < 3; ++pl) CHECK(rep.gauss_vs_intrinsic[pl] < 1e-4);
    CHECK(rep.constant_angle);
    CHECK(rep.totally_geodesic);
}

TEST_CASE("angle derivative laws on constant-angle examples") {
    SplitMix64 rng(73);
    for (int k : {3, 7, 8}) {
        const CatalogEntry e = catalog_example(k);
        const AngleDerivativeReport rep =
            angle_derivative_check(e.map, random_chart_point(rng, e.map));
        INFO("catalog item " << k);
        CHECK(rep.derv1 < 1e-5);
        CHECK(rep.derv2 < 1e-5);
    }
}

TEST_CASE("derv2 on example 8 in explicit form") {
    SplitMix64 rng(74);
    const CatalogEntry e8 = catalog_example(8);
    const Vec3 x = random_chart_point(rng, e8.map);
    const EigenframeField field(e8.map, x);
    const SffData s = sff_at(field, x);
    const Vec3 theta = field.base().theta;
    const double lhs = s.h[0][1][2] * std::cos(theta[1] - theta[2]);
    const double rhs = (std::sqrt(3.0) / 6.0 - s.omega[0][1][2]) * std::sin(theta[1] - theta[2]);
    CHECK(std::abs(lhs - rhs) < 1e-5);
}

TEST_CASE("covariant derivatives of A and B satisfy their laws") {
    SplitMix64 rng(75);
    const CatalogEntry e3 = catalog_example(3);
    CHECK(nabla_ab_residual(e3.map, random_chart_point(rng, e3.map)) < 1e-5);
    const CatalogEntry e8 = catalog_example(8);
    CHECK(nabla_ab_residual(e8.map, random_chart_point(rng, e8.map)) < 1e-4);
}

TEST_CASE("angle sum is zero modulo pi across the catalog") {
    SplitMix64 rng(76);
    for (int k = 1; k <= 8; ++k) {
        const CatalogEntry e = catalog_example(k);
        for (int it = 0; it < 5; ++it) {
            const AngleData a = angle_functions(e.map, random_chart_point(rng, e.map));
            INFO("catalog item " << k);
            CHECK(angle_sum_mod_pi(a.theta) < 1e-6);
        }
    }
}
