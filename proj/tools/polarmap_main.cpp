// Command-line front end: verification suites over grids, mesh export of
// hypersurface slices, geodesic flows and the scalar blow-up demo.
// Exit status: 0 all checks pass, 1 any check failed, 2 config/IO error.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "polarmap/suites.hpp"

namespace {

using namespace polarmap;

std::array<int, 3> parse_grid(const std::string& text, bool want3) {
    std::array<int, 3> g{32, 32, 16};
    int n = std::sscanf(text.c_str(), "%dx%dx%d", &g[0], &g[1], &g[2]);
    if (n < 2 || (want3 && n < 3))
        throw ConfigError("grid must look like 32x32" +
                          std::string(want3 ? "x16" : ""));
    return g;
}

void apply_tol_file(Tolerances& tol, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IOError("cannot open tolerance file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError("bad tolerance file: " + std::string(e.what()));
    }
    const nlohmann::json& obj = j.contains("tolerances") ? j["tolerances"] : j;
    if (!obj.is_object()) throw ConfigError("tolerance file must hold an object");
    for (const auto& [key, val] : obj.items()) {
        if (!val.is_number())
            throw ConfigError("tolerance '" + key + "' is not a number");
        if (!tol.set(key, val.get<double>()))
            throw ConfigError("unknown tolerance '" + key + "'");
    }
}

void load_default_tol(Tolerances& tol, const std::string& cli_path) {
    if (!cli_path.empty()) {
        apply_tol_file(tol, cli_path);
        return;
    }
    if (const char* env = std::getenv("POLARMAP_CONFIG"); env && *env)
        apply_tol_file(tol, env);
}

void print_report(const Report& rep) {
    for (const SuiteResult& s : rep.suites) {
        std::printf("[%s] %-8s checked=%ld skipped=%ld worst=%.3e\n",
                    s.pass ? "PASS" : "FAIL", s.name.c_str(), s.samples_checked,
                    s.samples_skipped, s.max_residual);
        for (const CheckResult& c : s.checks)
            std::printf("    %s %-18s max=%.6e tol=%.1e\n",
                        c.pass ? "ok  " : "FAIL", c.name.c_str(), c.max_residual,
                        c.tolerance);
    }
    std::printf("%s\n", rep.all_pass ? "all suites passed" : "FAILURES present");
}

void write_report(const Report& rep, const std::string& path) {
    if (path.empty()) return;
    std::ofstream out(path);
    if (!out) throw IOError("cannot write report '" + path + "'");
    out << report_to_json(rep);
}

int run_verify(SuiteConfig& cfg, const std::string& report_path) {
    const Report rep = run_suites(cfg);
    print_report(rep);
    write_report(rep, report_path);
    return rep.all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical verification toolkit for polar-map hypersurfaces"};
    app.require_subcommand(1);

    std::string immersion = "veronese";
    std::string grid = "32x32x16";
    std::string tol_file;
    std::string report_path;
    std::string suites_csv;
    std::uint64_t seed = 12345;

    auto add_common = [&](CLI::App* cmd, bool with_grid = true) {
        cmd->add_option("--immersion", immersion, "gallery name or DSL file path");
        if (with_grid) cmd->add_option("--grid", grid, "grid, e.g. 32x32x16");
        cmd->add_option("--tol-file", tol_file,
                        "JSON tolerance overrides (default: $POLARMAP_CONFIG)");
        cmd->add_option("--seed", seed, "sample seed");
        cmd->add_option("--report", report_path, "write a JSON report here");
    };

    CLI::App* analyze = app.add_subcommand("analyze", "surface-level checks");
    add_common(analyze);

    CLI::App* verify = app.add_subcommand("verify", "run verification suites");
    add_common(verify);
    verify->add_option("--suites", suites_csv,
                       "comma-separated subset of: surface,polar,frame,lemma1,"
                       "quotient,theorem,flow,blowup");

    CLI::App* mesh = app.add_subcommand("mesh", "export hypersurface slices");
    add_common(mesh);
    int slices = 8;
    std::string mesh_out = "slices.obj";
    std::string projection = "stereographic";
    mesh->add_option("--slices", slices, "number of t slices");
    mesh->add_option("--out", mesh_out, "output OBJ path");
    mesh->add_option("--projection", projection, "projection (stereographic)");

    CLI::App* flow = app.add_subcommand("flow", "integrate the e2 flow");
    add_common(flow, false);
    std::string start = "1.1,0.7,0.3";
    double length = 6.283185307179586;
    int steps = 1500;
    std::string flow_out;
    flow->add_option("--start", start, "start point \"x1,x2,t\"");
    flow->add_option("--length", length, "arc length to integrate");
    flow->add_option("--steps", steps, "integration steps");
    flow->add_option("--out", flow_out, "trajectory CSV path");

    CLI::App* blowup = app.add_subcommand("blowup", "integrate v' = v^2 + 1");
    double v0 = 0.0, step = 1e-5;
    blowup->add_option("--v0", v0, "initial value");
    blowup->add_option("--step", step, "integration step");
    blowup->add_option("--report", report_path, "write a JSON report here");

    CLI11_PARSE(app, argc, argv);

    try {
        SuiteConfig cfg;
        cfg.immersion = immersion;
        cfg.seed = seed;
        load_default_tol(cfg.tol, tol_file);

        if (analyze->parsed()) {
            const auto g = parse_grid(grid, false);
            cfg.n1 = g[0];
            cfg.n2 = g[1];
            cfg.nt = 16;
            cfg.suites = {"surface"};
            return run_verify(cfg, report_path);
        }
        if (verify->parsed()) {
            const auto g = parse_grid(grid, true);
            cfg.n1 = g[0];
            cfg.n2 = g[1];
            cfg.nt = g[2];
            if (!suites_csv.empty()) {
                std::stringstream ss(suites_csv);
                std::string item;
                while (std::getline(ss, item, ','))
                    if (!item.empty()) cfg.suites.push_back(item);
            }
            return run_verify(cfg, report_path);
        }
        if (mesh->parsed()) {
            const auto g = parse_grid(grid, false);
            cfg.n1 = g[0];
            cfg.n2 = g[1];
            const MeshStats st = mesh_export(cfg, slices, projection, mesh_out);
            std::printf("wrote %s: %ld vertices, %ld faces (pole axis %d), "
                        "attributes in %s.csv\n",
                        mesh_out.c_str(), st.vertices, st.faces, st.pole_axis,
                        mesh_out.c_str());
            return 0;
        }
        if (flow->parsed()) {
            double x1 = 0, x2 = 0, t = 0;
            if (std::sscanf(start.c_str(), "%lf,%lf,%lf", &x1, &x2, &t) != 3)
                throw ConfigError("start must be \"x1,x2,t\"");
            const FlowResult r = flow_command(cfg, x1, x2, t, length, steps, flow_out);
            std::printf("flow: planarity=%.6e drift=%.6e closure=%.6e "
                        "speed_dev=%.6e samples=%zu\n",
                        r.planarity, r.conservation_drift, r.closure,
                        r.max_speed_dev, r.samples.size());
            if (!report_path.empty()) {
                std::ofstream out(report_path);
                if (!out) throw IOError("cannot write '" + report_path + "'");
                char buf[400];
                std::snprintf(buf, sizeof buf,
                              "{\n  \"planarity\": %.17g,\n  \"conservation_drift\": "
                              "%.17g,\n  \"closure\": %.17g,\n  \"max_speed_dev\": "
                              "%.17g\n}\n",
                              r.planarity, r.conservation_drift, r.closure,
                              r.max_speed_dev);
                out << buf;
            }
            return 0;
        }
        // blowup
        const BlowupResult r = blowup_demo(v0, step);
        const double expected = 1.5707963267948966 - std::atan(v0);
        std::printf("blowup: estimate=%.17g closed_form=%.17g error=%.3e\n",
                    r.blowup_estimate, expected,
                    std::abs(r.blowup_estimate - expected));
        if (!report_path.empty()) {
            std::ofstream out(report_path);
            if (!out) throw IOError("cannot write '" + report_path + "'");
            char buf[300];
            std::snprintf(buf, sizeof buf,
                          "{\n  \"v0\": %.17g,\n  \"step\": %.17g,\n  "
                          "\"blowup_estimate\": %.17g,\n  \"closed_form\": %.17g\n}\n",
                          v0, step, r.blowup_estimate, expected);
            out << buf;
        }
        return 0;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const IOError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return 2;
    } catch (const UnknownGalleryError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const PoleCollisionError& e) {
        std::fprintf(stderr, "mesh error: %s\n", e.what());
        return 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
