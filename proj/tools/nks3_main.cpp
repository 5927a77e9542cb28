// Batch entry points: structure/connection/lagrangian/transform verification
// suites, invariant sweeps over charts, immersion-file transforms, and the
// sinh-Gordon builder pipeline.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "nks3/builder.hpp"
#include "nks3/catalog.hpp"
#include "nks3/invariants.hpp"
#include "nks3/io.hpp"
#include "nks3/transforms.hpp"
#include "nks3/verify_suites.hpp"

namespace {

using namespace nks3;

constexpr int kExitPass = 0, kExitCheckFailure = 1, kExitUsage = 2;

// --tol.<name> <value> and --tol.<name>=<value> are collected before CLI11
// sees the argument list.
TolOverrides extract_tol_overrides(std::vector<std::string>& args) {
    TolOverrides tol;
    std::vector<std::string> kept;
    for (size_t i = 0; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a.rfind("--tol.", 0) == 0) {
            const size_t eq = a.find('=');
            std::string name, value;
            if (eq != std::string::npos) {
                name = a.substr(6, eq - 6);
                value = a.substr(eq + 1);
            } else {
                name = a.substr(6);
                if (i + 1 >= args.size())
                    throw std::invalid_argument("missing value for " + a);
                value = args[++i];
            }
            tol[name] = std::stod(value);
        } else {
            kept.push_back(a);
        }
    }
    args = kept;
    return tol;
}

void emit_report(const VerifyReport& rep, const std::string& out_path) {
    const std::string text = dump_17g(to_json(rep));
    if (out_path.empty())
        std::fputs(text.c_str(), stdout);
    else
        write_text_file(out_path, text);
}

int cmd_verify(const std::string& suite, int n, std::uint64_t seed, const std::string& out,
               const std::string& goldens, const TolOverrides& tol) {
    const VerifyReport rep = run_suite(suite, n, seed, goldens, tol);
    emit_report(rep, out);
    for (const auto& c : rep.checks)
        std::fprintf(stderr, "%-34s %-4s max_residual=%.3e tol=%.1e\n", c.name.c_str(),
                     c.pass ? "ok" : "FAIL", c.max_residual, c.tolerance);
    return rep.pass() ? kExitPass : kExitCheckFailure;
}

int cmd_invariants(const std::string& source_example, const std::string& input_file,
                   const std::array<int, 3>& grid, const std::string& out_prefix) {
    ImmersionMap map;
    if (!source_example.empty()) {
        map = catalog_example(std::stoi(source_example)).map;
    } else {
        map = interpolated_immersion(sampled_from_json(read_json_file(input_file)));
    }

    std::vector<InvariantRow> rows;
    int rank_flags = 0;
    Vec3 theta_ref{0, 0, 0}, theta_spread{0, 0, 0};
    double worst_lag = 0, worst_pi3 = 1e300;
    Vec3 K_mean{0, 0, 0};
    int K_count = 0;

    ProbeOptions opt;
    if (input_file.empty()) {
        opt.lagrangian_tol = 1e-6;
    } else {  // interpolated maps carry FD-limited accuracy
        opt.lagrangian_tol = 1e-3;
        opt.commute_tol = 1e-2;
        opt.fd_step = 1e-3;
        opt.field_step = 5e-3;
    }

    for (int a = 0; a < grid[0]; ++a)
        for (int b = 0; b < grid[1]; ++b)
            for (int c = 0; c < grid[2]; ++c) {
                InvariantRow row;
                const int idx[3] = {a, b, c};
                for (int d = 0; d < 3; ++d)
                    row.x[d] = map.lo[d] +
                               (idx[d] + 0.5) * (map.hi[d] - map.lo[d]) / grid[d];
                try {
                    row.lag_residual = is_lagrangian(map, row.x);
                    const EigenframeField field(map, row.x, opt);
                    row.theta = field.base().theta;
                    const SffData s = sff_at(field, row.x);
                    row.h123 = s.h[0][1][2];
                    row.K12 = s.K[0];
                    row.K13 = s.K[1];
                    row.K23 = s.K[2];
                    if (K_count == 0) theta_ref = row.theta;
                    const Vec3 gaps = angle_triple_gaps(theta_ref, row.theta);
                    for (int d = 0; d < 3; ++d)
                        theta_spread[d] = std::max(theta_spread[d], gaps[d]);
                    K_mean = K_mean + Vec3{s.K[0], s.K[1], s.K[2]};
                    ++K_count;
                    worst_lag = std::max(worst_lag, row.lag_residual);
                    double pg = 1e300;
                    for (int d = 0; d < 3; ++d) {
                        double g = std::fmod(std::abs(row.theta[d] - M_PI / 3), M_PI);
                        g = std::min(g, M_PI - g);
                        pg = std::min(pg, g);
                    }
                    worst_pi3 = (worst_pi3 == 1e300) ? pg : std::max(worst_pi3, pg);
                } catch (const std::exception&) {
                    row.rank_deficient = true;
                    row.lag_residual = std::nan("");
                    row.theta = {std::nan(""), std::nan(""), std::nan("")};
                    row.h123 = row.K12 = row.K13 = row.K23 = std::nan("");
                    ++rank_flags;
                }
                rows.push_back(row);
            }

    std::string csv = invariant_csv_header() + "\n";
    for (const auto& r : rows) csv += to_csv(r) + "\n";

    json summary{{"source", source_example.empty() ? input_file : ("example-" + source_example)},
                 {"grid", grid},
                 {"rows", rows.size()},
                 {"flagged_rows", rank_flags},
                 {"worst_lagrangian_residual", worst_lag},
                 {"pi3_max_gap", worst_pi3}};
    if (K_count > 0) {
        summary["angle_spread"] =
            json::array({theta_spread[0], theta_spread[1], theta_spread[2]});
        summary["K_mean"] = json::array(
            {K_mean[0] / K_count, K_mean[1] / K_count, K_mean[2] / K_count});
    }

    if (out_prefix.empty()) {
        std::fputs(csv.c_str(), stdout);
        std::fputs(dump_17g(summary).c_str(), stdout);
    } else {
        write_text_file(out_prefix + ".csv", csv);
        write_text_file(out_prefix + ".json", dump_17g(summary));
        std::fputs(dump_17g(summary).c_str(), stdout);
    }
    return rank_flags == static_cast<int>(rows.size()) ? kExitCheckFailure : kExitPass;
}

int cmd_transform(const std::string& op, const std::string& input, const std::string& output) {
    SampledImmersion s = sampled_from_json(read_json_file(input));
    if (op == "swap") {
        for (size_t m = 0; m < s.count(); ++m) std::swap(s.p[m], s.q[m]);
        s.label += "~";
    } else if (op == "star") {
        for (size_t m = 0; m < s.count(); ++m) {
            const Quat pbar = conj(s.p[m]);
            s.p[m] = pbar;
            s.q[m] = s.q[m] * pbar;
        }
        s.label += "*";
    } else {
        throw std::invalid_argument("unknown transform op: " + op);
    }
    write_text_file(output, dump_17g(to_json(s)));
    return kExitPass;
}

int cmd_build_t3(const std::string& config_path, const std::string& out_prefix) {
    const json cfg = read_json_file(config_path);
    const json& grid = cfg.at("grid");
    const int nu = grid.at("nu").get<int>(), nv = grid.at("nv").get<int>(),
              nt = grid.at("nt").get<int>();
    const double du = grid.at("du").get<double>(), dv = grid.at("dv").get<double>(),
                 dt = grid.at("dt").get<double>();
    const json& bnd = cfg.at("boundary");
    const std::string kind = bnd.at("kind").get<std::string>();
    const double amplitude = bnd.value("amplitude", 0.0);
    UnitQuat q0;
    if (cfg.contains("q0")) q0 = renormalize(quat_from_json(cfg.at("q0")));
    double t0 = 0.0;
    if (cfg.contains("t_range")) {
        t0 = cfg.at("t_range")[0].get<double>();
        const double t1 = cfg.at("t_range")[1].get<double>();
        if (std::abs(t1 - (t0 + (nt - 1) * dt)) > 1e-9)
            throw std::invalid_argument("t_range is inconsistent with nt and dt");
    }
    SinhGordonOptions newton;
    double drift_gate = 1e-6, lag_tol = 1e-5, pi3_tol = 1e-3;
    if (cfg.contains("tolerances")) {
        const json& t = cfg["tolerances"];
        newton.tol = t.value("newton", newton.tol);
        drift_gate = t.value("drift", drift_gate);
        lag_tol = t.value("lagrangian", lag_tol);
        pi3_tol = t.value("pi3", pi3_tol);
    }
    if (std::abs(amplitude) > 0.5)
        throw std::invalid_argument(
            "boundary amplitude outside the documented convergence envelope (<= 0.5)");

    const auto boundary_fn = [&](int nnu, int nnv, double ddu, double ddv) {
        const double Lu = (nnu - 1) * ddu, Lv = (nnv - 1) * ddv;
        return std::function<double(double, double)>([=](double u, double v) {
            if (kind == "zero") return 0.0;
            if (kind == "sine")
                return amplitude * std::sin(M_PI * u / Lu) * std::cos(M_PI * v / Lv);
            if (kind == "smooth") return amplitude * std::sin((u + v) / (Lu + Lv) * 2 + 0.3);
            throw std::invalid_argument("unknown boundary kind: " + kind);
        });
    };

    const auto build = [&](int bnu, int bnv, int bnt, double bdu, double bdv, double bdt) {
        const SinhGordonField field = (kind == "zero")
                                          ? SinhGordonField::zero(bnu, bnv, bdu, bdv)
                                          : sinh_gordon_solve(bnu, bnv, bdu, bdv,
                                                              boundary_fn(bnu, bnv, bdu, bdv),
                                                              newton);
        const MinimalSurfaceData surf =
            reconstruct_minimal_surface(field, default_surface_init(), drift_gate);
        const T3Solution sol = t3_integrate(surf, field, q0, t0, bnt, bdt, drift_gate);
        return std::tuple<SinhGordonField, MinimalSurfaceData, T3Solution>{field, surf, sol};
    };

    const auto [field, surf, sol] = build(nu, nv, nt, du, dv, dt);
    const T3VerifyReport rep = t3_verify(sol, surf, field, std::max(1, nu / 16));

    json report{{"config", cfg},
                {"sinh_gordon_residual", sinh_gordon_residual(field)},
                {"frame_drift", surf.max_frame_drift},
                {"verify",
                 {{"samples", rep.samples},
                  {"max_lagrangian", rep.max_lagrangian},
                  {"max_pi3_gap", rep.max_pi3_gap},
                  {"max_angle_sum", rep.max_angle_sum},
                  {"max_rank_ratio", rep.max_rank_ratio},
                  {"rank_failures", rep.rank_failures},
                  {"angle_failures", rep.angle_failures},
                  {"max_step_drift", rep.max_step_drift},
                  {"compat_residual", rep.compat_residual}}}};

    bool pass = rep.pass(lag_tol, pi3_tol);
    if (cfg.value("convergence_check", false)) {
        const auto [field2, surf2, sol2] =
            build(2 * nu - 1, 2 * nv - 1, 2 * nt - 1, du / 2, dv / 2, dt / 2);
        const T3VerifyReport rep2 = t3_verify(sol2, surf2, field2, std::max(1, nu / 8));
        const double ratio = rep.max_lagrangian / std::max(rep2.max_lagrangian, 1e-300);
        report["convergence"] = {{"halved_max_lagrangian", rep2.max_lagrangian},
                                 {"ratio", ratio},
                                 {"pass", ratio >= 3.0}};
        pass = pass && ratio >= 3.0;
    }
    report["pass"] = pass;

    // sampled-immersion output from the stored grids
    SampledImmersion samples;
    samples.label = "t3-built";
    samples.dim = 3;
    samples.shape = {nu, nv, nt};
    samples.spacing = {du, dv, dt};
    samples.origin = {0.0, 0.0, t0};
    samples.p.resize(samples.count());
    samples.q.resize(samples.count());
    for (int i = 0; i < nu; ++i)
        for (int j = 0; j < nv; ++j)
            for (int k = 0; k < nt; ++k) {
                samples.p[samples.index(i, j, k)] = surf.p_at(i, j).q;
                samples.q[samples.index(i, j, k)] = sol.at(i, j, k);
            }

    const std::string prefix = out_prefix.empty() ? "t3_build" : out_prefix;
    write_text_file(prefix + ".immersion.json", dump_17g(to_json(samples)));
    write_text_file(prefix + ".report.json", dump_17g(report));
    std::fputs(dump_17g(report).c_str(), stdout);
    return pass ? kExitPass : kExitCheckFailure;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    TolOverrides tol;
    try {
        tol = extract_tol_overrides(args);
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return kExitUsage;
    }

    CLI::App app{"numerical laboratory for the nearly Kaehler geometry of S^3 x S^3"};
    app.require_subcommand(1);

    std::string suite = "all", out, goldens = default_goldens_path();
    int n = 200;
    std::uint64_t seed = 42;
    auto* verify = app.add_subcommand("verify", "run a property-verification suite");
    verify->add_option("--suite", suite,
                       "structure | connection | lagrangian | transforms | all");
    verify->add_option("--n", n, "sample count")->check(CLI::PositiveNumber);
    verify->add_option("--seed", seed, "RNG seed");
    verify->add_option("--out", out, "write the JSON report here instead of stdout");
    verify->add_option("--goldens", goldens, "catalog goldens JSON path");

    std::string example, input_file, out_prefix;
    std::vector<int> grid_spec{7, 7, 7};
    auto* invariants = app.add_subcommand("invariants", "invariant sweep over a chart grid");
    invariants->add_option("--example", example, "catalog example id (1..8)");
    invariants->add_option("--input", input_file, "sampled-immersion JSON file");
    invariants->add_option("--grid", grid_spec, "grid nu,nv,nw")->delimiter(',')->expected(3);
    invariants->add_option("--out", out_prefix, "output prefix for .csv and .json");

    std::string op, tr_in, tr_out;
    auto* transform = app.add_subcommand("transform", "apply swap or star to an immersion file");
    transform->add_option("--op", op, "swap | star")->required();
    transform->add_option("--input", tr_in, "sampled-immersion JSON input")->required();
    transform->add_option("--out", tr_out, "output file")->required();

    std::string config, build_out;
    auto* build = app.add_subcommand("build-t3", "sinh-Gordon builder pipeline");
    build->add_option("--config", config, "build configuration JSON")->required();
    build->add_option("--out", build_out, "output prefix");

    try {
        std::vector<char*> cargs;
        cargs.push_back(argv[0]);
        for (auto& a : args) cargs.push_back(a.data());
        app.parse(static_cast<int>(cargs.size()), cargs.data());
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (verify->parsed()) return cmd_verify(suite, n, seed, out, goldens, tol);
        if (invariants->parsed()) {
            if (example.empty() == input_file.empty()) {
                std::fprintf(stderr, "error: give exactly one of --example or --input\n");
                return kExitUsage;
            }
            return cmd_invariants(example, input_file,
                                  {grid_spec[0], grid_spec[1], grid_spec[2]}, out_prefix);
        }
        if (transform->parsed()) return cmd_transform(op, tr_in, tr_out);
        if (build->parsed()) return cmd_build_t3(config, build_out);
    } catch (const std::invalid_argument& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return kExitUsage;
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return kExitUsage;
    }
    return kExitUsage;
}
