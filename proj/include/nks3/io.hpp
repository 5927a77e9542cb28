#ifndef NKS3_IO_HPP
#define NKS3_IO_HPP

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nks3/immersion.hpp"
#include "nks3/linalg.hpp"
#include "nks3/quat.hpp"

namespace nks3 {

using nlohmann::json;

// All quaternions serialize as [w, x, y, z].
inline json to_json(const Quat& q) { return json::array({q.w, q.x, q.y, q.z}); }

inline Quat quat_from_json(const json& j) {
    if (!j.is_array() || j.size() != 4) throw std::runtime_error("expected a [w,x,y,z] array");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

// Serialization with every float printed at 17 significant digits, so report
// files are diff-stable and reproduce bit-identical doubles when parsed.
inline void dump_17g(const json& j, std::string& out, int indent = 0) {
    const std::string pad(indent, ' ');
    switch (j.type()) {
        case json::value_t::object: {
            out += "{\n";
            size_t n = 0;
            for (auto it = j.begin(); it != j.end(); ++it, ++n) {
                out += pad + "  " + json(it.key()).dump() + ": ";
                dump_17g(it.value(), out, indent + 2);
                if (n + 1 < j.size()) out += ",";
                out += "\n";
            }
            out += pad + "}";
            break;
        }
        case json::value_t::array: {
            out += "[";
            for (size_t i = 0; i < j.size(); ++i) {
                dump_17g(j[i], out, indent);
                if (i + 1 < j.size()) out += ", ";
            }
            out += "]";
            break;
        }
        case json::value_t::number_float: {
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%.17g", j.get<double>());
            out += buf;
            break;
        }
        default:
            out += j.dump();
    }
}

inline std::string dump_17g(const json& j) {
    std::string out;
    dump_17g(j, out, 0);
    out += "\n";
    return out;
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << text;
}

inline json read_json_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open for reading: " + path);
    return json::parse(f);
}

// ---------------------------------------------------------------------------
// sampled-immersion files

struct SampledImmersion {
    std::string label;
    int dim = 3;
    std::array<int, 3> shape{1, 1, 1};
    Vec3 spacing{0, 0, 0};
    Vec3 origin{0, 0, 0};
    std::vector<Quat> p, q;  // row-major, last index fastest

    size_t count() const {
        return static_cast<size_t>(shape[0]) * shape[1] * shape[2];
    }
    size_t index(int a, int b, int c) const {
        return (static_cast<size_t>(a) * shape[1] + b) * shape[2] + c;
    }
    Vec3 coords(int a, int b, int c) const {
        return {origin[0] + a * spacing[0], origin[1] + b * spacing[1],
                origin[2] + c * spacing[2]};
    }
};

inline json to_json(const SampledImmersion& s) {
    json points = json::array();
    for (size_t m = 0; m < s.count(); ++m)
        points.push_back(json::array({s.p[m].w, s.p[m].x, s.p[m].y, s.p[m].z, s.q[m].w,
                                      s.q[m].x, s.q[m].y, s.q[m].z}));
    return json{{"label", s.label},
                {"dim", s.dim},
                {"grid",
                 {{"shape", s.shape},
                  {"spacing", json::array({s.spacing[0], s.spacing[1], s.spacing[2]})},
                  {"origin", json::array({s.origin[0], s.origin[1], s.origin[2]})}}},
                {"points", points}};
}

inline SampledImmersion sampled_from_json(const json& j) {
    SampledImmersion s;
    s.label = j.at("label").get<std::string>();
    s.dim = j.at("dim").get<int>();
    const json& grid = j.at("grid");
    for (int d = 0; d < 3; ++d) {
        s.shape[d] = grid.at("shape")[d].get<int>();
        s.spacing[d] = grid.at("spacing")[d].get<double>();
        s.origin[d] = grid.at("origin")[d].get<double>();
    }
    const json& pts = j.at("points");
    if (pts.size() != s.count()) throw std::runtime_error("point count disagrees with shape");
    s.p.reserve(pts.size());
    s.q.reserve(pts.size());
    for (const json& row : pts) {
        if (!row.is_array() || row.size() != 8)
            throw std::runtime_error("each point must hold 8 numbers [p(4), q(4)]");
        s.p.push_back({row[0].get<double>(), row[1].get<double>(), row[2].get<double>(),
                       row[3].get<double>()});
        s.q.push_back({row[4].get<double>(), row[5].get<double>(), row[6].get<double>(),
                       row[7].get<double>()});
    }
    return s;
}

inline SampledImmersion sample_immersion(const ImmersionMap& f, const std::array<int, 3>& shape,
                                         const Vec3& spacing, const Vec3& origin) {
    SampledImmersion s;
    s.label = f.label;
    s.dim = f.dim;
    s.shape = shape;
    s.spacing = spacing;
    s.origin = origin;
    s.p.resize(s.count());
    s.q.resize(s.count());
    for (int a = 0; a < shape[0]; ++a)
        for (int b = 0; b < shape[1]; ++b)
            for (int c = 0; c < shape[2]; ++c) {
                const SurfacePoint pt = f.eval(s.coords(a, b, c));
                s.p[s.index(a, b, c)] = pt.p.q;
                s.q[s.index(a, b, c)] = pt.q.q;
            }
    return s;
}

// Chart map over a sampled immersion: local cubic interpolation of the
// samples, renormalized to S^3; differentials fall back to FD.
inline ImmersionMap interpolated_immersion(const SampledImmersion& s) {
    const auto sp = std::make_shared<SampledImmersion>(s);
    ImmersionMap m;
    m.dim = s.dim;
    m.label = s.label + "/interp";
    for (int d = 0; d < 3; ++d) {
        m.lo[d] = sp->origin[d];
        m.hi[d] = sp->origin[d] + (sp->shape[d] - 1) * sp->spacing[d];
    }
    m.eval = [sp](const Vec3& x) {
        // per-axis Catmull-Rom weights with cubic ghost extrapolation
        double wts[3][4];
        int base[3];
        for (int d = 0; d < 3; ++d) {
            if (sp->shape[d] == 1) {
                base[d] = 0;
                wts[d][0] = wts[d][2] = wts[d][3] = 0;
                wts[d][1] = 1;
                continue;
            }
            const double sd = (x[d] - sp->origin[d]) / sp->spacing[d];
            int i = static_cast<int>(std::floor(sd));
            i = std::max(0, std::min(sp->shape[d] - 2, i));
            const double t = sd - i;
            base[d] = i;
            wts[d][0] = 0.5 * (-t + 2 * t * t - t * t * t);
            wts[d][1] = 0.5 * (2 - 5 * t * t + 3 * t * t * t);
            wts[d][2] = 0.5 * (t + 4 * t * t - 3 * t * t * t);
            wts[d][3] = 0.5 * (-t * t + t * t * t);
        }
        const auto node = [&](int d, int i) {  // clamp with linear ghost
            return std::max(0, std::min(sp->shape[d] - 1, i));
        };
        Quat pv{}, qv{};
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                for (int c = 0; c < 4; ++c) {
                    const double w = wts[0][a] * wts[1][b] * wts[2][c];
                    if (w == 0.0) continue;
                    const size_t idx = sp->index(node(0, base[0] - 1 + a),
                                                 node(1, base[1] - 1 + b),
                                                 node(2, base[2] - 1 + c));
                    pv += sp->p[idx] * w;
                    qv += sp->q[idx] * w;
                }
        return SurfacePoint{renormalize(pv), renormalize(qv)};
    };
    return m;
}

// ---------------------------------------------------------------------------
// catalog goldens

struct GoldenEntry {
    int id = 0;
    Vec3 angles{0, 0, 0};
    Vec3 K{0, 0, 0};
    double h123_abs = 0;
    bool totally_geodesic = false;
    std::optional<double> omega_cyclic;
    std::string provenance;
};

inline std::vector<GoldenEntry> load_goldens(const std::string& path) {
    const json doc = read_json_file(path);
    std::vector<GoldenEntry> out;
    for (const json& e : doc.at("entries")) {
        GoldenEntry g;
        g.id = e.at("id").get<int>();
        for (int d = 0; d < 3; ++d) {
            g.angles[d] = e.at("angles")[d].get<double>();
            g.K[d] = e.at("K")[d].get<double>();
        }
        g.h123_abs = e.at("h123_abs").get<double>();
        g.totally_geodesic = e.at("totally_geodesic").get<bool>();
        if (e.contains("omega_cyclic")) g.omega_cyclic = e.at("omega_cyclic").get<double>();
        g.provenance = e.at("provenance").get<std::string>();
        out.push_back(g);
    }
    return out;
}

inline std::string default_goldens_path() {
#ifdef NKS3_DATA_DIR
    return std::string(NKS3_DATA_DIR) + "/catalog_goldens.json";
#else
    return "data/catalog_goldens.json";
#endif
}

// Golden invariants of one catalog entry.
inline GoldenEntry expected_invariants(int k, const std::string& path = default_goldens_path()) {
    if (k < 1 || k > 8) throw std::out_of_range("catalog id must be in 1..8");
    const auto all = load_goldens(path);
    for (const auto& g : all)
        if (g.id == k) return g;
    throw std::runtime_error("golden entry missing for catalog id " + std::to_string(k));
}

// ---------------------------------------------------------------------------
// verification reports

struct CheckResult {
    std::string name;
    double max_residual = 0;
    double tolerance = 0;
    bool pass = false;
};

struct VerifyReport {
    std::string suite;
    std::uint64_t seed = 0;
    int n = 0;
    std::vector<CheckResult> checks;

    bool pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
    int failures() const {
        int k = 0;
        for (const auto& c : checks) k += c.pass ? 0 : 1;
        return k;
    }
};

inline json to_json(const VerifyReport& r) {
    json checks = json::array();
    for (const auto& c : r.checks)
        checks.push_back({{"name", c.name},
                          {"max_residual", c.max_residual},
                          {"tolerance", c.tolerance},
                          {"pass", c.pass}});
    return json{{"suite", r.suite},
                {"seed", r.seed},
                {"n", r.n},
                {"checks", checks},
                {"pass", r.pass()},
                {"counts", {{"checks", r.checks.size()}, {"failures", r.failures()}}}};
}

// ---------------------------------------------------------------------------
// invariant CSV rows (fixed column order)

struct InvariantRow {
    Vec3 x{0, 0, 0};
    Vec3 theta{0, 0, 0};
    double h123 = 0;
    double K12 = 0, K13 = 0, K23 = 0;
    double lag_residual = 0;
    bool rank_deficient = false;
};

inline std::string invariant_csv_header() {
    return "x1,x2,x3,theta1,theta2,theta3,h123,K12,K13,K23,lag_residual";
}

inline std::string to_csv(const InvariantRow& r) {
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g",
                  r.x[0], r.x[1], r.x[2], r.theta[0], r.theta[1], r.theta[2], r.h123, r.K12,
                  r.K13, r.K23, r.lag_residual);
    return buf;
}

// ---------------------------------------------------------------------------
// minimal structural JSON-schema validation (type / properties / required /
// items / enum), enough for the checked-in report schemas

inline bool validate_schema(const json& doc, const json& schema, std::string* error = nullptr) {
    const auto fail = [&](const std::string& msg) {
        if (error) *error = msg;
        return false;
    };
    if (schema.contains("type")) {
        const std::string t = schema["type"].get<std::string>();
        const bool ok = (t == "object" && doc.is_object()) || (t == "array" && doc.is_array()) ||
                        (t == "string" && doc.is_string()) ||
                        (t == "number" && doc.is_number()) ||
                        (t == "integer" && doc.is_number_integer()) ||
                        (t == "boolean" && doc.is_boolean());
        if (!ok) return fail("type mismatch: expected " + t);
    }
    if (schema.contains("enum")) {
        bool ok = false;
        for (const json& v : schema["enum"]) ok = ok || v == doc;
        if (!ok) return fail("value not in enum");
    }
    if (schema.contains("required"))
        for (const json& k : schema["required"])
            if (!doc.contains(k.get<std::string>()))
                return fail("missing required key: " + k.get<std::string>());
    if (schema.contains("properties") && doc.is_object())
        for (auto it = schema["properties"].begin(); it != schema["properties"].end(); ++it)
            if (doc.contains(it.key()) && !validate_schema(doc[it.key()], it.value(), error))
                return false;
    if (schema.contains("items") && doc.is_array())
        for (const json& el : doc)
            if (!validate_schema(el, schema["items"], error)) return false;
    return true;
}

}  // namespace nks3

#endif
