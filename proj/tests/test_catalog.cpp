#include <catch2/catch_amalgamated.hpp>

#include "nks3/catalog.hpp"
#include "nks3/rng.hpp"

using namespace nks3;

namespace {

Vec3 random_chart_point(SplitMix64& rng, const ImmersionMap& f) {
    return {rng.uniform(f.lo[0], f.hi[0]), rng.uniform(f.lo[1], f.hi[1]),
            rng.uniform(f.lo[2], f.hi[2])};
}

}  // namespace

TEST_CASE("catalog point values") {
    // item 4 at u = 1: (1, i)
    const CatalogEntry e4 = catalog_example(4);
    const SurfacePoint p4 = e4.map.eval({0, 0, 0});
    CHECK(norm(p4.p.q - Quat{1, 0, 0, 0}) < 1e-15);
    CHECK(norm(p4.q.q - Quat{0, 1, 0, 0}) < 1e-15);

    // item 7 at u = 1: (i, j)
    const CatalogEntry e7 = catalog_example(7);
    const SurfacePoint p7 = e7.map.eval({0, 0, 0});
    CHECK(norm(p7.p.q - Quat{0, 1, 0, 0}) < 1e-15);
    CHECK(norm(p7.q.q - Quat{0, 0, 1, 0}) < 1e-15);

    // item 8 at the origin
    const CatalogEntry e8 = catalog_example(8);
    const SurfacePoint p8 = e8.map.eval({0, 0, 0});
    CHECK(norm(p8.p.q - Quat{1, 0, 0, 0}) < 1e-15);
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(norm(p8.q.q - Quat{r, 0, -r, 0}) < 1e-15);
}

TEST_CASE("item 8 second factor has unit norm identically") {
    const CatalogEntry e8 = catalog_example(8);
    SplitMix64 rng(51);
    for (int it = 0; it < 200; ++it) {
        const SurfacePoint pt = e8.map.eval(random_chart_point(rng, e8.map));
        CHECK(std::abs(norm(pt.q.q) - 1.0) < 1e-14);
        CHECK(std::abs(norm(pt.p.q) - 1.0) < 1e-14);
    }
}

TEST_CASE("all eight catalog entries are Lagrangian") {
    SplitMix64 rng(52);
    for (int k = 1; k <= 8; ++k) {
        const CatalogEntry e = catalog_example(k);
        double worst = 0;
        for (int it = 0; it < 100; ++it)
            worst = std::max(worst, is_lagrangian(e.map, random_chart_point(rng, e.map)));
        INFO("catalog item " << k);
        CHECK(worst < 1e-8);
    }
}

TEST_CASE("catalog respects configurable base points") {
    SplitMix64 rng(53);
    const UnitQuat base = rng.unit_quat();
    for (int k : {1, 5, 7}) {
        const CatalogEntry e = catalog_example(k, base);
        double worst = 0;
        for (int it = 0; it < 20; ++it)
            worst = std::max(worst, is_lagrangian(e.map, random_chart_point(rng, e.map)));
        INFO("catalog item " << k);
        CHECK(worst < 1e-8);
    }
}

TEST_CASE("out of range ids are rejected") {
    CHECK_THROWS_AS(catalog_example(0), std::out_of_range);
    CHECK_THROWS_AS(catalog_example(9), std::out_of_range);
}

TEST_CASE("closed-form differentials match FD for every entry") {
    SplitMix64 rng(54);
    for (int k = 1; k <= 8; ++k) {
        CatalogEntry e = catalog_example(k);
        ImmersionMap fd = e.map;
        fd.dform = nullptr;
        double worst = 0;
        for (int it = 0; it < 10; ++it) {
            const Vec3 x = random_chart_point(rng, e.map);
            const Vec3 X{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
            const TangentVec a = differential(e.map, x, X);
            const TangentVec b = differential(fd, x, X);
            worst = std::max(worst, norm(a.u - b.u) + norm(a.v - b.v));
        }
        INFO("catalog item " << k);
        CHECK(worst < 1e-8);
    }
}
