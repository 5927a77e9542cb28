#include <catch2/catch_amalgamated.hpp>

#include "nks3/quat.hpp"
#include "nks3/rng.hpp"

using namespace nks3;

namespace {
const Quat qi{0, 1, 0, 0}, qj{0, 0, 1, 0}, qk{0, 0, 0, 1}, one{1, 0, 0, 0};
}

TEST_CASE("Hamilton product defining relations") {
    CHECK(norm(qi * qj - qk) == 0.0);
    CHECK(norm(qj * qk - qi) == 0.0);
    CHECK(norm(qk * qi - qj) == 0.0);
    CHECK(norm(qi * qi + one) == 0.0);
    Quat q{0.3, -1.2, 0.7, 2.0};
    CHECK(norm(one * q - q) == 0.0);
    CHECK(norm(q * one - q) == 0.0);
}

TEST_CASE("product is associative and distributive on random triples") {
    SplitMix64 rng(11);
    for (int it = 0; it < 200; ++it) {
        Quat a{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
        Quat b{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
        Quat c{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
        CHECK(norm((a * b) * c - a * (b * c)) < 1e-12 * (1 + norm(a) * norm(b) * norm(c)));
        CHECK(norm(a * (b + c) - (a * b + a * c)) < 1e-12 * (1 + norm(a) * (norm(b) + norm(c))));
    }
}

TEST_CASE("norm multiplicativity |ab| = |a||b|") {
    SplitMix64 rng(12);
    for (int it = 0; it < 200; ++it) {
        const UnitQuat a = rng.unit_quat(), b = rng.unit_quat();
        CHECK(std::abs(norm(a.q * b.q) - 1.0) < 1e-12);
    }
}

TEST_CASE("conjugate and inverse") {
    auto [c, inv] = conj_inv(qi);
    CHECK(norm(c + qi) == 0.0);
    CHECK(norm(inv + qi) == 0.0);

    // 2i -> (-2i, -i/2)
    auto [c2, inv2] = conj_inv(qi * 2.0);
    CHECK(norm(c2 + qi * 2.0) == 0.0);
    CHECK(norm(inv2 + qi * 0.5) < 1e-15);

    SplitMix64 rng(13);
    const UnitQuat q = rng.unit_quat();
    CHECK(norm(q.q * inverse(q.q) - one) < 1e-12);
    CHECK(norm(q.conjugate().q - conj(q.q)) == 0.0);
    // for unit quaternions the two coincide
    auto [cu, iu] = conj_inv(q.q);
    CHECK(norm(cu - iu) < 1e-12);

    CHECK_THROWS_AS(inverse(Quat{}), std::domain_error);
    CHECK_THROWS_AS(conj_inv(Quat{}), std::domain_error);
}

TEST_CASE("imaginary cross product matches R^3 cross oracle") {
    CHECK(norm((im_cross({1, 0, 0}, {0, 1, 0}) - ImQuat{0, 0, 1}).quat()) == 0.0);
    ImQuat a{0.4, -1.0, 2.2};
    CHECK(norm(im_cross(a, a).quat()) == 0.0);

    SplitMix64 rng(14);
    for (int it = 0; it < 200; ++it) {
        const ImQuat u = rng.im_quat(2.0), v = rng.im_quat(2.0);
        // componentwise R^3 cross
        const ImQuat oracle{u.y * v.z - u.z * v.y, u.z * v.x - u.x * v.z,
                            u.x * v.y - u.y * v.x};
        // commutator definition
        const Quat comm = (u.quat() * v.quat() - v.quat() * u.quat()) * 0.5;
        CHECK(norm((im_cross(u, v) - oracle).quat()) < 1e-13);
        CHECK(norm(comm - oracle.quat()) < 1e-13);
        // antisymmetry and orthogonality
        CHECK(norm((im_cross(u, v) + im_cross(v, u)).quat()) == 0.0);
        CHECK(std::abs(dot(im_cross(u, v), u)) < 1e-12);
        CHECK(std::abs(dot(im_cross(u, v), v)) < 1e-12);
    }
}

TEST_CASE("renormalize") {
    CHECK(norm(renormalize(Quat{2, 0, 0, 0}).q - one) == 0.0);
    const Quat h{1, 1, 1, 1};
    const UnitQuat r = renormalize(h);
    CHECK(r.q.w == Catch::Approx(0.5).margin(1e-15));
    CHECK(r.q.x == Catch::Approx(0.5).margin(1e-15));
    CHECK(r.q.y == Catch::Approx(0.5).margin(1e-15));
    CHECK(r.q.z == Catch::Approx(0.5).margin(1e-15));

    SplitMix64 rng(15);
    const UnitQuat q = rng.unit_quat();
    CHECK(norm(renormalize(q.q).q - q.q) < 1e-15);
    CHECK_THROWS_AS(renormalize(Quat{1e-13, 0, 0, 0}), std::domain_error);
}

TEST_CASE("left translation lands in the tangent space") {
    SplitMix64 rng(16);
    for (int it = 0; it < 100; ++it) {
        const UnitQuat p = rng.unit_quat();
        const ImQuat al = rng.im_quat();
        CHECK(std::abs(dot(p.q * al.quat(), p.q)) < 1e-12);
    }
}

TEST_CASE("exp_im and its differential") {
    CHECK(norm(exp_im({0, 0, 0}).q - one) == 0.0);
    const UnitQuat e = exp_im({M_PI / 2, 0, 0});
    CHECK(norm(e.q - qi) < 1e-15);

    // FD check of dexp_im
    SplitMix64 rng(17);
    for (int it = 0; it < 50; ++it) {
        const ImQuat v = rng.im_quat(1.2), w = rng.im_quat(1.0);
        const double h = 1e-6;
        const Quat fd = (exp_im(v + h * w).q - exp_im(v - h * w).q) / (2 * h);
        CHECK(norm(dexp_im(v, w) - fd) < 1e-9);
    }
}

TEST_CASE("unit quaternion type admission") {
    CHECK_THROWS_AS(UnitQuat(Quat{1.1, 0, 0, 0}), std::domain_error);
    CHECK_NOTHROW(UnitQuat(Quat{1.0 + 5e-10, 0, 0, 0}));
}
