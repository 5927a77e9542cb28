#ifndef NKS3_TRANSFORMS_HPP
#define NKS3_TRANSFORMS_HPP

#include <algorithm>
#include <vector>

#include "nks3/invariants.hpp"
#include "nks3/rng.hpp"

namespace nks3 {

// f = (p, q) -> (q, p). Involution; angles map to pi - theta.
inline ImmersionMap swap_transform(const ImmersionMap& f) {
    ImmersionMap out = f;
    out.label = f.label + "~";
    const auto eval = f.eval;
    out.eval = [eval](const Vec3& x) {
        const SurfacePoint pt = eval(x);
        return SurfacePoint{pt.q, pt.p};
    };
    if (f.dform) {
        const auto dform = f.dform;
        out.dform = [dform](const Vec3& x, const Vec3& X) {
            const TangentVec d = dform(x, X);
            return TangentVec({d.base.q, d.base.p}, d.v, d.u);
        };
    }
    return out;
}

// f = (p, q) -> (conj(p), q conj(p)). Angles map to 2 pi/3 - theta.
inline ImmersionMap star_transform(const ImmersionMap& f) {
    ImmersionMap out = f;
    out.label = f.label + "*";
    const auto eval = f.eval;
    out.eval = [eval](const Vec3& x) {
        const SurfacePoint pt = eval(x);
        const Quat pbar = conj(pt.p.q);
        return SurfacePoint{renormalize(pbar), renormalize(pt.q.q * pbar)};
    };
    if (f.dform) {
        const auto dform = f.dform;
        out.dform = [dform](const Vec3& x, const Vec3& X) {
            const TangentVec d = dform(x, X);
            const Quat pbar = conj(d.base.p.q);
            const SurfacePoint base{renormalize(pbar), renormalize(d.base.q.q * pbar)};
            // d(conj p) = conj(dp); d(q conj p) = dq conj(p) + q conj(dp)
            return TangentVec(base, conj(d.u), d.v * pbar + d.base.q.q * conj(d.u));
        };
    }
    return out;
}

// distance on the mod-pi angle circle
inline double circ_pi_dist(double x, double y) {
    double d = std::fmod(std::abs(x - y), M_PI);
    return std::min(d, M_PI - d);
}

// matched per-component circle distances between two angle triples,
// minimized over matchings (sorting in [0, pi) can permute wrapped angles)
inline Vec3 angle_triple_gaps(const Vec3& a, const Vec3& b) {
    static const int perm[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                   {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    Vec3 best{1e300, 1e300, 1e300};
    double best_max = 1e300;
    for (auto& p : perm) {
        const Vec3 g{circ_pi_dist(a[0], b[p[0]]), circ_pi_dist(a[1], b[p[1]]),
                     circ_pi_dist(a[2], b[p[2]])};
        const double m = std::max({g[0], g[1], g[2]});
        if (m < best_max) {
            best_max = m;
            best = g;
        }
    }
    return best;
}

// max matched circle distance between two sorted angle triples
inline double angle_set_distance(const Vec3& a, const Vec3& b) {
    const Vec3 g = angle_triple_gaps(a, b);
    return std::max({g[0], g[1], g[2]});
}

inline Vec3 map_angles(const Vec3& theta, double offset, double sign) {
    Vec3 out;
    for (int i = 0; i < 3; ++i) {
        double t = std::fmod(offset + sign * theta[i], M_PI);
        if (t < 0) t += M_PI;
        out[i] = t;
    }
    std::sort(out.begin(), out.end());
    return out;
}

struct TransformSample {
    Vec3 x{0, 0, 0};
    Vec3 theta_f{0, 0, 0}, theta_swap{0, 0, 0}, theta_star{0, 0, 0};
    double lagrangian_f = 0, lagrangian_swap = 0, lagrangian_star = 0;
    double metric_gap_swap = 0, metric_gap_star = 0;
    double angle_gap_swap = 0, angle_gap_star = 0;
};

struct TransformReport {
    std::vector<TransformSample> samples;
    double max_lagrangian_transformed = 0;
    double max_metric_gap = 0;
    double max_angle_gap = 0;
};

// Samples the transform laws: Lagrangian residual of the transformed maps,
// entrywise induced-metric gap, and the angle maps theta -> pi - theta and
// theta -> 2 pi/3 - theta on sorted triples mod pi.
inline TransformReport verify_transform_relations(const ImmersionMap& f, int n_samples,
                                                  std::uint64_t seed,
                                                  const ProbeOptions& opt = {}) {
    SplitMix64 rng(seed);
    const ImmersionMap fs = swap_transform(f);
    const ImmersionMap ft = star_transform(f);
    TransformReport rep;
    rep.samples.reserve(n_samples);
    for (int it = 0; it < n_samples; ++it) {
        TransformSample s;
        for (int d = 0; d < 3; ++d) s.x[d] = 0.8 * rng.uniform(f.lo[d], f.hi[d]);
        s.lagrangian_f = is_lagrangian(f, s.x);
        s.lagrangian_swap = is_lagrangian(fs, s.x);
        s.lagrangian_star = is_lagrangian(ft, s.x);

        const Mat3 g0 = induced_metric(f, s.x);
        const Mat3 gs = induced_metric(fs, s.x);
        const Mat3 gt = induced_metric(ft, s.x);
        s.metric_gap_swap = max_abs(gs - g0);
        s.metric_gap_star = max_abs(gt - g0);

        s.theta_f = angle_functions(f, s.x, opt).theta;
        s.theta_swap = angle_functions(fs, s.x, opt).theta;
        s.theta_star = angle_functions(ft, s.x, opt).theta;
        s.angle_gap_swap = angle_set_distance(map_angles(s.theta_f, M_PI, -1.0), s.theta_swap);
        s.angle_gap_star =
            angle_set_distance(map_angles(s.theta_f, 2.0 * M_PI / 3.0, -1.0), s.theta_star);

        rep.max_lagrangian_transformed =
            std::max({rep.max_lagrangian_transformed, s.lagrangian_swap, s.lagrangian_star});
        rep.max_metric_gap = std::max({rep.max_metric_gap, s.metric_gap_swap, s.metric_gap_star});
        rep.max_angle_gap = std::max({rep.max_angle_gap, s.angle_gap_swap, s.angle_gap_star});
        rep.samples.push_back(s);
    }
    return rep;
}

}  // namespace nks3

#endif
