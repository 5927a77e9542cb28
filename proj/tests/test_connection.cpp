#include <catch2/catch_amalgamated.hpp>

#include "nks3/connection.hpp"
#include "nks3/rng.hpp"

using namespace nks3;

namespace {

SurfacePoint random_point(SplitMix64& rng) { return {rng.unit_quat(), rng.unit_quat()}; }

TangentVec random_tangent(SplitMix64& rng, const SurfacePoint& at) {
    FrameCoeffs c;
    for (int i = 0; i < 3; ++i) {
        c.e[i] = rng.uniform(-1, 1);
        c.f[i] = rng.uniform(-1, 1);
    }
    return from_coeffs(at, c);
}

}  // namespace

TEST_CASE("structure table entries match the connection lemma") {
    // nabla_E1 E2 = -E3
    FrameCoeffs c = nabla_frame(0, 1);
    CHECK(c.e[2] == -1.0);
    CHECK(c.e[0] == 0.0);
    CHECK(c.f[2] == 0.0);
    // nabla_E1 F2 = (1/3)(E3 - F3)
    c = nabla_frame(0, 4);
    CHECK(c.e[2] == Catch::Approx(1.0 / 3.0));
    CHECK(c.f[2] == Catch::Approx(-1.0 / 3.0));
    // nabla_E1 E1 = 0
    c = nabla_frame(0, 0);
    for (int m = 0; m < 6; ++m) CHECK(c[m] == 0.0);
    // nabla_F2 F3 = -F1
    c = nabla_frame(4, 5);
    CHECK(c.f[0] == -1.0);
    // nabla_F1 E2 = (1/3)(F3 - E3)
    c = nabla_frame(3, 1);
    CHECK(c.f[2] == Catch::Approx(1.0 / 3.0));
    CHECK(c.e[2] == Catch::Approx(-1.0 / 3.0));
}

TEST_CASE("Koszul reconstruction is exact") {
    const KoszulReport rep = koszul_check();
    CHECK(rep.max_table_dev == 0);
    CHECK(rep.max_torsion_dev == 0);
    CHECK(rep.max_metric_dev == 0);
    CHECK(rep.max_residual() == 0.0);
}

TEST_CASE("covariant derivative of a constant-coefficient field") {
    SplitMix64 rng(31);
    const SurfacePoint pt = random_point(rng);
    // W = E2 along the constant map; connection term only
    const TangentField W = [&](const Vec3&) { return frame_E(pt, 1); };
    // df(X) = E1 direction
    const TangentVec dfx = frame_E(pt, 0);
    const TangentVec d = covariant_derivative(W, {1, 0, 0}, {0, 0, 0}, 1e-4, dfx);
    // nabla_E1 E2 = -E3
    const TangentVec expected = -1.0 * frame_E(pt, 2);
    CHECK(g_norm(d - expected) < 1e-12);
}

TEST_CASE("covariant derivative is metric compatible under refinement") {
    // X g(W,W') - g(DW, W') - g(W, DW') -> 0 at second order along a flow
    SplitMix64 rng(32);
    const SurfacePoint pt0 = random_point(rng);
    const FrameCoeffs cw = frame_coeffs(random_tangent(rng, pt0));
    const FrameCoeffs cw2 = frame_coeffs(random_tangent(rng, pt0));

    // fields with coefficients varying over the chart, along the E1 flow
    const auto path = [&](const Vec3& y) { return frame_flow(pt0, 0, y[0]); };
    const auto W = [&](const Vec3& y) {
        FrameCoeffs c;
        for (int m = 0; m < 6; ++m) c[m] = cw[m] * (1.0 + 0.3 * std::sin(y[0]));
        return from_coeffs(path(y), c);
    };
    const auto W2 = [&](const Vec3& y) {
        FrameCoeffs c;
        for (int m = 0; m < 6; ++m) c[m] = cw2[m] * (1.0 + 0.2 * std::cos(2 * y[0]));
        return from_coeffs(path(y), c);
    };

    const auto gap = [&](double h) {
        const TangentVec dW = covariant_derivative(W, {1, 0, 0}, {0, 0, 0}, h, std::nullopt, false);
        const TangentVec dW2 =
            covariant_derivative(W2, {1, 0, 0}, {0, 0, 0}, h, std::nullopt, false);
        const double xg =
            (metric_g(W({h, 0, 0}), W2({h, 0, 0})) - metric_g(W({-h, 0, 0}), W2({-h, 0, 0}))) /
            (2 * h);
        return std::abs(xg - metric_g(dW, W2({0, 0, 0})) - metric_g(W({0, 0, 0}), dW2));
    };
    const double g1 = gap(1e-2), g2 = gap(5e-3);
    CHECK(g1 < 1e-3);
    CHECK(g2 < g1 / 2.5);  // ~4x for a second-order scheme
}

TEST_CASE("covariant derivative is linear in W and X") {
    SplitMix64 rng(33);
    const SurfacePoint pt0 = random_point(rng);
    const auto path = [&](const Vec3& y) {
        return frame_flow(frame_flow(pt0, 0, y[0]), 4, y[1]);
    };
    const auto make_field = [&](const FrameCoeffs base, double freq) {
        return TangentField([=](const Vec3& y) {
            FrameCoeffs c;
            for (int m = 0; m < 6; ++m)
                c[m] = base[m] * (1.0 + 0.4 * std::sin(freq * (y[0] + 0.7 * y[1])));
            return from_coeffs(path(y), c);
        });
    };
    FrameCoeffs ca, cb;
    for (int m = 0; m < 6; ++m) {
        ca[m] = rng.uniform(-1, 1);
        cb[m] = rng.uniform(-1, 1);
    }
    const auto Wa = make_field(ca, 1.3), Wb = make_field(cb, 0.9);
    const auto Wsum = [&](const Vec3& y) {
        const TangentVec a = Wa(y), b = Wb(y);
        return a + b;
    };

    const Vec3 X{0.6, -0.8, 0.0}, at{0, 0, 0};
    const double h = 1e-4;
    const TangentVec da = covariant_derivative(Wa, X, at, h);
    const TangentVec db = covariant_derivative(Wb, X, at, h);
    const TangentVec dsum = covariant_derivative(Wsum, X, at, h);
    CHECK(g_norm(dsum - (da + db)) < 1e-9);

    // linearity in X: D_{2X} = 2 D_X
    const TangentVec d2x = covariant_derivative(Wa, 2.0 * X, at, h / 2.0);
    CHECK(g_norm(d2x - 2.0 * da) < 1e-8);
}

TEST_CASE("FD nabla J matches the G table at second order") {
    SplitMix64 rng(34);
    double worst = 0, worst_big = 0, worst_half = 0;
    for (int it = 0; it < 20; ++it) {
        const SurfacePoint pt = random_point(rng);
        const TangentVec x = random_tangent(rng, pt), y = random_tangent(rng, pt);
        worst = std::max(worst, nablaJ_check(pt, x, y, 1e-4));
        // convergence order is measured where truncation dominates rounding
        worst_big = std::max(worst_big, nablaJ_check(pt, x, y, 2e-3));
        worst_half = std::max(worst_half, nablaJ_check(pt, x, y, 1e-3));
    }
    CHECK(worst < 1e-6);
    CHECK(worst_half < worst_big / 3.5);
}

TEST_CASE("FD nabla J skewness on equal arguments") {
    SplitMix64 rng(35);
    const SurfacePoint pt = random_point(rng);
    const TangentVec x = random_tangent(rng, pt);
    // G(X, X) = 0; the FD evaluation of (nabla_X J)X must vanish to FD accuracy
    CHECK(nablaJ_check(pt, x, x, 1e-4) < 1e-6);
}

TEST_CASE("nablaJ residual shrinks about 4x when h is halved") {
    SplitMix64 rng(36);
    const SurfacePoint pt = random_point(rng);
    const TangentVec x = random_tangent(rng, pt), y = random_tangent(rng, pt);
    const double r1 = nablaJ_check(pt, x, y, 4e-3);
    const double r2 = nablaJ_check(pt, x, y, 2e-3);
    REQUIRE(r1 > 1e-10);  // truncation-dominated regime
    CHECK(r2 < r1 / 3.0);
    CHECK(r2 > r1 / 6.0);
}
