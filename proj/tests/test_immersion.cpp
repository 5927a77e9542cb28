#include <catch2/catch_amalgamated.hpp>

#include "nks3/catalog.hpp"
#include "nks3/immersion.hpp"
#include "nks3/rng.hpp"

using namespace nks3;

namespace {

Vec3 random_chart_point(SplitMix64& rng, const ImmersionMap& f) {
    return {rng.uniform(f.lo[0], f.hi[0]), rng.uniform(f.lo[1], f.hi[1]),
            rng.uniform(f.lo[2], f.hi[2])};
}

// non-Lagrangian control: u -> (u, u exp(0.1 x1 j))
ImmersionMap perturbed_diagonal() {
    ImmersionMap m;
    m.dim = 3;
    m.label = "perturbed-diagonal";
    m.eval = [](const Vec3& x) {
        const UnitQuat u = exp_chart(UnitQuat{}, x);
        return SurfacePoint{u, renormalize(u.q * exp_im({0, 0.1 * x[0], 0}).q)};
    };
    return m;
}

}  // namespace

TEST_CASE("differential of the diagonal immersion") {
    const CatalogEntry e3 = catalog_example(3);
    const Vec3 x{0.3, -0.2, 0.5};
    const TangentVec d = differential(e3.map, x, {1, 0, 0});
    // both components move identically
    CHECK(norm(d.u - d.v) < 1e-14);
    // at the chart center the first coordinate curve moves along (i, i)
    const TangentVec d0 = differential(e3.map, {0, 0, 0}, {1, 0, 0});
    CHECK(norm(d0.u - Quat{0, 1, 0, 0}) < 1e-15);
    CHECK(norm(d0.v - Quat{0, 1, 0, 0}) < 1e-15);
    // linearity
    SplitMix64 rng(41);
    const Vec3 X = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const Vec3 Y = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const double a = 0.7, b = -1.3;
    const TangentVec dx = differential(e3.map, x, X), dy = differential(e3.map, x, Y);
    const TangentVec dz = differential(e3.map, x, a * X + b * Y);
    CHECK(g_norm(dz - (a * dx + b * dy)) < 1e-10);
}

TEST_CASE("closed-form and FD differentials agree on example 8") {
    CatalogEntry e8 = catalog_example(8);
    ImmersionMap fd_map = e8.map;
    fd_map.dform = nullptr;  // force the FD path
    SplitMix64 rng(42);
    double worst = 0;
    for (int it = 0; it < 30; ++it) {
        const Vec3 x = random_chart_point(rng, e8.map);
        Vec3 X{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
        const TangentVec a = differential(e8.map, x, X);
        const TangentVec b = differential(fd_map, x, X);
        worst = std::max(worst, norm(a.u - b.u) + norm(a.v - b.v));
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("induced metric") {
    const CatalogEntry e1 = catalog_example(1);
    const Mat3 g = induced_metric(e1.map, {0.2, 0.1, -0.4});
    const SymEigen3 eig = sym_eigen(g);
    CHECK(eig.values[0] > 0.0);  // positive definite
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(g(i, j) == Catch::Approx(g(j, i)).margin(1e-14));

    // degenerate map
    ImmersionMap constmap;
    constmap.dim = 3;
    constmap.eval = [](const Vec3&) { return SurfacePoint{}; };
    const Mat3 gz = induced_metric(constmap, {0, 0, 0});
    CHECK(max_abs(gz) < 1e-12);

    // example 8 metric against the frame-coefficient formula
    const CatalogEntry e8 = catalog_example(8);
    const Vec3 x0{0, 0, 0};
    const Mat3 g8 = induced_metric(e8.map, x0);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            Vec3 di{0, 0, 0}, dj{0, 0, 0};
            di[i] = 1;
            dj[j] = 1;
            const TangentVec Zi = differential(e8.map, x0, di);
            const TangentVec Zj = differential(e8.map, x0, dj);
            const ImQuat ai = Zi.alpha(), bi = Zi.beta(), aj = Zj.alpha(), bj = Zj.beta();
            const double oracle = (2.0 / 3.0) * (2 * dot(ai, aj) + 2 * dot(bi, bj) -
                                                 dot(bi, aj) - dot(ai, bj));
            CHECK(g8(i, j) == Catch::Approx(oracle).margin(1e-12));
        }
}

TEST_CASE("orthonormal basis postconditions") {
    const CatalogEntry e8 = catalog_example(8);
    SplitMix64 rng(43);
    const Vec3 x = random_chart_point(rng, e8.map);
    const auto basis = orthonormal_basis(e8.map, x);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const double gij = metric_g(differential(e8.map, x, basis[i]),
                                        differential(e8.map, x, basis[j]));
            CHECK(gij == Catch::Approx(i == j ? 1.0 : 0.0).margin(1e-10));
        }

    // near-degenerate metric is rejected
    ImmersionMap bad;
    bad.dim = 3;
    bad.eval = [](const Vec3& x) {
        // collapses the third chart direction
        return SurfacePoint{exp_chart(UnitQuat{}, {x[0], x[1], 1e-9 * x[2]}), UnitQuat{}};
    };
    CHECK_THROWS_AS(orthonormal_basis(bad, Vec3{0.1, 0.1, 0.1}), std::domain_error);
}

TEST_CASE("Lagrangian residual separates the catalog from a control") {
    SplitMix64 rng(44);
    const CatalogEntry e3 = catalog_example(3);
    for (int it = 0; it < 20; ++it)
        CHECK(is_lagrangian(e3.map, random_chart_point(rng, e3.map)) < 1e-9);

    const ImmersionMap bad = perturbed_diagonal();
    double worst = 0;
    for (int it = 0; it < 20; ++it)
        worst = std::max(worst, is_lagrangian(bad, random_chart_point(rng, bad)));
    CHECK(worst > 1e-3);
}

TEST_CASE("J maps tangent vectors to normal vectors on Lagrangian samples") {
    SplitMix64 rng(45);
    const CatalogEntry e8 = catalog_example(8);
    const Vec3 x = random_chart_point(rng, e8.map);
    const auto basis = orthonormal_basis(e8.map, x);
    TangentVec d[3], jd[3];
    for (int i = 0; i < 3; ++i) {
        d[i] = differential(e8.map, x, basis[i]);
        jd[i] = apply_J(d[i]);
    }
    // J e_i are g-orthonormal and g-orthogonal to the tangent space
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            CHECK(metric_g(jd[i], jd[j]) == Catch::Approx(i == j ? 1.0 : 0.0).margin(1e-10));
            CHECK(std::abs(metric_g(jd[i], d[j])) < 1e-10);
        }
}

TEST_CASE("rank of the first-component differential") {
    SplitMix64 rng(46);
    // catalog items with a full S^3 first component have rank 3
    for (int k : {1, 3, 4}) {
        const CatalogEntry e = catalog_example(k);
        const Vec3 x = random_chart_point(rng, e.map);
        CHECK(component_rank(e.map, x, true) == 3);
    }
    // example 8: p depends on (u, w) only -> rank 2 everywhere
    const CatalogEntry e8 = catalog_example(8);
    for (int it = 0; it < 10; ++it) {
        const Vec3 x = random_chart_point(rng, e8.map);
        CHECK(component_rank(e8.map, x, true) == 2);
        const Vec3 sv = component_singular_values(e8.map, x, true);
        CHECK(sv[2] / sv[0] < 1e-6);
    }
    // example 2: constant first component -> rank 0
    const CatalogEntry e2 = catalog_example(2);
    CHECK(component_rank(e2.map, random_chart_point(rng, e2.map), true) == 0);
}
