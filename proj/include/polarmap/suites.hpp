#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "polarmap/invariants.hpp"

namespace polarmap {

/// What to verify and over which grid. `immersion` is a gallery name or a
/// DSL file path; `seed` drives every random sample so reports are
/// reproducible bit for bit.
struct SuiteConfig {
    std::string immersion = "veronese";
    int n1 = 32, n2 = 32, nt = 16;
    Tolerances tol;
    std::vector<std::string> suites;  // empty means all
    std::uint64_t seed = 12345;
};

inline const std::vector<std::string>& all_suite_names() {
    static const std::vector<std::string> names{
        "surface", "polar", "frame", "lemma1",
        "quotient", "theorem", "flow", "blowup"};
    return names;
}

struct CheckResult {
    std::string name;
    double max_residual = 0.0;
    double tolerance = 0.0;
    std::array<double, 3> worst_point{};
    long count = 0;
    bool pass = true;
};

struct SuiteResult {
    std::string name;
    bool pass = true;
    double max_residual = 0.0;  // max over checks of residual / tolerance
    std::array<double, 3> worst_point{};
    long samples_checked = 0;
    long samples_skipped = 0;
    std::vector<CheckResult> checks;
    std::vector<std::string> skipped;  // capped
};

struct Report {
    std::string immersion;
    std::array<int, 3> grid{};
    std::uint64_t seed = 0;
    bool all_pass = true;
    std::vector<SuiteResult> suites;
    Tolerances tol;
};

namespace detail {

constexpr int kSkipNoteCap = 100;

class CheckAcc {
  public:
    CheckAcc(std::string name, double tolerance)
        : r_{std::move(name), 0.0, tolerance, {}, 0, true} {}

    void add(double residual, double x1, double x2, double t) {
        ++r_.count;
        if (residual > r_.max_residual) {
            r_.max_residual = residual;
            r_.worst_point = {x1, x2, t};
        }
    }

    CheckResult result() const {
        CheckResult r = r_;
        r.pass = r.max_residual <= r.tolerance;
        return r;
    }

  private:
    CheckResult r_;
};

inline void finalize(SuiteResult& s, std::vector<CheckAcc>& accs) {
    for (const auto& acc : accs) {
        CheckResult c = acc.result();
        const double normalized =
            c.tolerance > 0.0 ? c.max_residual / c.tolerance : c.max_residual;
        if (normalized > s.max_residual) {
            s.max_residual = normalized;
            s.worst_point = c.worst_point;
        }
        s.pass = s.pass && c.pass;
        s.checks.push_back(std::move(c));
    }
}

inline void note_skip(SuiteResult& s, double x1, double x2, double t,
                      const std::string& why) {
    ++s.samples_skipped;
    if (static_cast<int>(s.skipped.size()) < kSkipNoteCap) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "x1=%.6g x2=%.6g t=%.6g: %s", x1, x2, t,
                      why.c_str());
        s.skipped.emplace_back(buf);
    }
}

struct SamplePlan {
    double lo1, hi1, lo2, hi2;

    explicit SamplePlan(const DomainRect& d) {
        const double p1 = 0.05 * (d.hi1() - d.lo1());
        const double p2 = 0.05 * (d.hi2() - d.lo2());
        lo1 = d.lo1() + p1;
        hi1 = d.hi1() - p1;
        lo2 = d.lo2() + p2;
        hi2 = d.hi2() - p2;
    }

    std::array<double, 2> base(std::mt19937_64& rng) const {
        std::uniform_real_distribution<double> u1(lo1, hi1), u2(lo2, hi2);
        return {u1(rng), u2(rng)};
    }
    std::array<double, 3> bundle(std::mt19937_64& rng) const {
        std::uniform_real_distribution<double> ut(0.0, 6.283185307179586);
        const auto b = base(rng);
        return {b[0], b[1], ut(rng)};
    }
    double grid1(int i, int n) const { return lo1 + (hi1 - lo1) * i / (n - 1); }
    double grid2(int j, int n) const { return lo2 + (hi2 - lo2) * j / (n - 1); }
};

/// Row-major base-grid sweep with frame continuation: each point continues
/// from its left neighbor, each row start from the row start above.
template <typename F>
void sweep_base_grid(const ImmersionSpec& spec, const SamplePlan& plan, int n1,
                     int n2, const Tolerances& tol, F&& per_point) {
    std::optional<AdaptedFrame> row_start;
    for (int i = 0; i < n1; ++i) {
        std::optional<AdaptedFrame> prev = row_start;
        for (int j = 0; j < n2; ++j) {
            const double x1 = plan.grid1(i, n1);
            const double x2 = plan.grid2(j, n2);
            SurfaceData sd =
                surface_data(spec, x1, x2, prev ? &*prev : nullptr, tol);
            if (j == 0) row_start = sd.frame;
            prev = sd.frame;
            per_point(i, j, sd);
        }
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// individual suites
// ---------------------------------------------------------------------------

namespace suites {

inline SuiteResult surface(const ImmersionSpec& spec, const SuiteConfig& cfg) {
    const Tolerances& tol = cfg.tol;
    SuiteResult out;
    out.name = "surface";
    detail::SamplePlan plan(spec.domain);

    std::vector<detail::CheckAcc> accs;
    accs.emplace_back("orthonormality", tol.suite_ortho);
    accs.emplace_back("sphericality", tol.suite_sphericality);
    accs.emplace_back("sg-identity", tol.suite_identity_sg);
    accs.emplace_back("defect-floor", tol.suite_defect_floor);
    const bool check_trace = spec.claims_minimal;
    if (check_trace) accs.emplace_back("trace", tol.suite_trace);
    const bool check_pde = spec.claims_superminimal;
    if (check_pde) accs.emplace_back("pde21", tol.suite_pde21);

    detail::sweep_base_grid(
        spec, plan, cfg.n1, cfg.n2, tol, [&](int, int, const SurfaceData& sd) {
            ++out.samples_checked;
            const Vec5* f[5] = {&sd.g, &sd.frame.v1, &sd.frame.v2, &sd.frame.v3,
                                &sd.frame.v4};
            double ortho = 0.0;
            for (int a = 0; a < 5; ++a)
                for (int b = 0; b < 5; ++b)
                    ortho = std::max(ortho, std::abs(dot(*f[a], *f[b]) -
                                                     (a == b ? 1.0 : 0.0)));
            accs[0].add(ortho, sd.x1, sd.x2, 0.0);
            accs[1].add(std::abs(norm(sd.g) - 1.0), sd.x1, sd.x2, 0.0);
            accs[2].add(std::abs(sd.curv.S_g - 2.0 * (1.0 - sd.curv.K)), sd.x1,
                        sd.x2, 0.0);
            accs[3].add(std::max(0.0, -sd.curv.defect), sd.x1, sd.x2, 0.0);
            std::size_t next = 4;
            if (check_trace)
                accs[next++].add(sd.shape.trace_residual, sd.x1, sd.x2, 0.0);
            if (check_pde) {
                try {
                    accs[next].add(
                        pde_residual_21(spec, sd.x1, sd.x2, tol.fd_step_lb2, tol),
                        sd.x1, sd.x2, 0.0);
                } catch (const NearFlatError& e) {
                    detail::note_skip(out, sd.x1, sd.x2, 0.0, e.what());
                } catch (const DomainError& e) {
                    detail::note_skip(out, sd.x1, sd.x2, 0.0, e.what());
                }
            }
        });
    detail::finalize(out, accs);
    return out;
}

inline SuiteResult polar(const ImmersionSpec& spec, const SuiteConfig& cfg) {
    const Tolerances& tol = cfg.tol;
    SuiteResult out;
    out.name = "polar";
    detail::SamplePlan plan(spec.domain);

    std::vector<detail::CheckAcc> accs;
    accs.emplace_back("psi-unit", tol.suite_ortho);
    accs.emplace_back("xi-orthogonal", tol.suite_ortho);
    accs.emplace_back("dpsi-tangency", tol.suite_sym);
    accs.emplace_back("k2", tol.suite_k2_rel);
    accs.emplace_back("minimality", tol.suite_k2_rel);
    accs.emplace_back("k1-closed-form", tol.suite_k_closed_form_rel);
    accs.emplace_back("gauss-kronecker", tol.suite_gk_rel);
    accs.emplace_back("symmetry", tol.suite_sym);

    detail::sweep_base_grid(
        spec, plan, cfg.n1, cfg.n2, tol, [&](int, int, const SurfaceData& sd) {
            for (int k = 0; k < cfg.nt; ++k) {
                const double t = 6.283185307179586 * k / cfg.nt;
                const double r = regularity_of(sd.shape, t);
                if (!(r > tol.regular_min)) {
                    detail::note_skip(out, sd.x1, sd.x2, t, "singular point");
                    continue;
                }
                ++out.samples_checked;
                const auto pd = polar_differential(sd, t);
                accs[0].add(std::abs(norm(pd.position) - 1.0), sd.x1, sd.x2, t);
                accs[1].add(std::abs(dot(pd.position, pd.xi)), sd.x1, sd.x2, t);
                double tan_res = 0.0;
                for (const Vec5& dp : pd.dpsi)
                    tan_res = std::max({tan_res, std::abs(dot(dp, pd.position)),
                                        std::abs(dot(dp, pd.xi))});
                accs[2].add(tan_res, sd.x1, sd.x2, t);
                const auto hs = hypersurface_shape(sd, t, tol);
                const double scale = 1.0 + std::abs(hs.k1);
                accs[3].add(std::abs(hs.k2) / scale, sd.x1, sd.x2, t);
                accs[4].add(std::abs(hs.k1 + hs.k2 + hs.k3) / scale, sd.x1, sd.x2, t);
                accs[5].add(std::abs(hs.k1 * std::sqrt(r) - 1.0), sd.x1, sd.x2, t);
                accs[6].add(std::abs(hs.K_GK) / (hs.k1 * hs.k1 * hs.k1), sd.x1,
                            sd.x2, t);
                accs[7].add(hs.sym_residual, sd.x1, sd.x2, t);
            }
        });
    detail::finalize(out, accs);
    return out;
}

inline SuiteResult frame(const ImmersionSpec& spec, const SuiteConfig& cfg) {
    const Tolerances& tol = cfg.tol;
    SuiteResult out;
    out.name = "frame";
    detail::SamplePlan plan(spec.domain);
    std::mt19937_64 rng(cfg.seed * 8191 + 1);

    std::vector<detail::CheckAcc> accs;
    accs.emplace_back("eq22", tol.suite_frame_eq);
    accs.emplace_back("eq23", tol.suite_frame_eq);
    accs.emplace_back("eq24", tol.suite_frame_eq);
    accs.emplace_back("u-consistency", tol.u_mismatch_rel);
    accs.emplace_back("lambda-positive", 0.0);

    const int want = std::min(48, cfg.n1 * cfg.n2);
    for (int n = 0; n < want; ++n) {
        const auto p = plan.bundle(rng);
        try {
            const FrameInvariants fi =
                frame_equation_residuals(spec, p[0], p[1], p[2], tol.fd_step_frame, tol);
            ++out.samples_checked;
            double w22 = 0.0;
            for (double r : fi.residual_22) w22 = std::max(w22, r);
            double w23 = 0.0;
            for (double r : fi.residual_23) w23 = std::max(w23, r);
            accs[0].add(w22, p[0], p[1], p[2]);
            accs[1].add(w23, p[0], p[1], p[2]);
            accs[2].add(fi.residual_24, p[0], p[1], p[2]);
            accs[3].add(fi.u_discrepancy, p[0], p[1], p[2]);
            accs[4].add(fi.lambda > 0.0 ? 0.0 : 1.0, p[0], p[1], p[2]);
        } catch (const Error& e) {
            detail::note_skip(out, p[0], p[1], p[2], e.what());
        }
    }
    detail::finalize(out, accs);
    return out;
}

inline SuiteResult lemma1(const ImmersionSpec& spec, const SuiteConfig& cfg) {
    const Tolerances& tol = cfg.tol;
    SuiteResult out;
    out.name = "lemma1";
    detail::SamplePlan plan(spec.domain);
    std::mt19937_64 rng(cfg.seed * 8191 + 2);

    std::vector<detail::CheckAcc> accs;
    accs.emplace_back("conservation", tol.suite_conservation);
    accs.emplace_back("harmonic-u", tol.suite_harmonic);
    accs.emplace_back("harmonic-v", tol.suite_harmonic);

    const int want = std::min(16, cfg.n1 * cfg.n2);
    for (int n = 0; n < want; ++n) {
        const auto p = plan.bundle(rng);
        try {
            const Lemma1Result r = lemma1_checks(spec, p[0], p[1], p[2],
                                                 tol.fd_step_lb3, tol);
            ++out.samples_checked;
            accs[0].add(r.conservation_residual, p[0], p[1], p[2]);
            accs[1].add(r.harmonic_residual_u, p[0], p[1], p[2]);
            accs[2].add(r.harmonic_residual_v, p[0], p[1], p[2]);
        } catch (const Error& e) {
            detail::note_skip(out, p[0], p[1], p[2], e.what());
        }
    }
    detail::finalize(out, accs);
    return out;
}

inline SuiteResult quotient(const ImmersionSpec& spec, const SuiteConfig& cfg) {
    const Tolerances& tol = cfg.tol;
    SuiteResult out;
    out.name = "quotient";
    detail::SamplePlan plan(spec.domain);
    std::mt19937_64 rng(cfg.seed * 8191 + 3);

    std::vector<detail::CheckAcc> accs;
    accs.emplace_back("k-bridge", tol.suite_bridge);
    accs.emplace_back("kn2-bridge", tol.suite_bridge);

    const int want = std::min(48, cfg.n1 * cfg.n2);
    for (int n = 0; n < want; ++n) {
        const auto p = plan.bundle(rng);
        try {
            const QuotientShape q = quotient_shape(spec, p[0], p[1], p[2], tol);
            const SurfaceData sd = surface_data(spec, p[0], p[1], nullptr, tol);
            ++out.samples_checked;
            accs[0].add(std::abs(sd.curv.K - q.K_recovered), p[0], p[1], p[2]);
            accs[1].add(std::abs(sd.curv.Kn * sd.curv.Kn - q.Kn2_recovered), p[0],
                        p[1], p[2]);
        } catch (const Error& e) {
            detail::note_skip(out, p[0], p[1], p[2], e.what());
        }
    }
    detail::finalize(out, accs);
    return out;
}

inline SuiteResult theorem(const ImmersionSpec& spec, const SuiteConfig& cfg) {
    const Tolerances& tol = cfg.tol;
    SuiteResult out;
    out.name = "theorem";
    detail::SamplePlan plan(spec.domain);
    std::mt19937_64 rng(cfg.seed * 8191 + 4);

    std::vector<detail::CheckAcc> accs;
    accs.emplace_back("identity", tol.suite_theorem_identity);
    accs.emplace_back("khat-bound", tol.suite_khat_bound);
    accs.emplace_back("u-conclusion", tol.suite_uv_conclusion);
    accs.emplace_back("v-conclusion", tol.suite_uv_conclusion);

    {
        std::uniform_real_distribution<double> uv(-10.0, 10.0);
        for (int n = 0; n < 1000; ++n) {
            const double u = uv(rng), v = uv(rng);
            const double h = (u - 1.0) * (u - 1.0) + v * v;
            const double lhs =
                4.0 * u * u * v * v + (v * v - u * u + 1.0) * (v * v - u * u + 1.0);
            accs[0].add(std::abs(lhs - (h * h + 4.0 * u * h)), u, v, 0.0);
        }
    }

    struct Sample {
        double x1, x2, t, u, v, K, defect;
    };
    std::vector<Sample> samples;
    std::vector<double> s_values;
    const int want = std::min(48, cfg.n1 * cfg.n2);
    for (int n = 0; n < want; ++n) {
        const auto p = plan.bundle(rng);
        try {
            const FrameInvariants fi = lambda_u_v(spec, p[0], p[1], p[2], tol);
            const SurfaceData sd = surface_data(spec, p[0], p[1], nullptr, tol);
            const HypersurfaceShape hs = hypersurface_shape(sd, p[2], tol);
            samples.push_back({p[0], p[1], p[2], fi.u, fi.v, sd.curv.K,
                               sd.curv.defect});
            s_values.push_back(hs.S);
            ++out.samples_checked;
        } catch (const Error& e) {
            detail::note_skip(out, p[0], p[1], p[2], e.what());
        }
    }
    for (const Sample& s : samples) {
        try {
            const TheoremQuantities tq =
                theorem_quantities(s.u, s.v, s.K, s_values, tol);
            accs[1].add(std::max(0.0, tq.K_hat_bound - tq.K_hat), s.x1, s.x2, s.t);
            if (spec.claims_superminimal &&
                s.defect < tol.suite_defect_superminimal) {
                accs[2].add(std::abs(s.u - 1.0), s.x1, s.x2, s.t);
                accs[3].add(std::abs(s.v), s.x1, s.x2, s.t);
            }
        } catch (const NearFlatError& e) {
            detail::note_skip(out, s.x1, s.x2, s.t, e.what());
        }
    }
    detail::finalize(out, accs);
    return out;
}

inline SuiteResult flow(const ImmersionSpec& spec, const SuiteConfig& cfg) {
    const Tolerances& tol = cfg.tol;
    SuiteResult out;
    out.name = "flow";
    detail::SamplePlan plan(spec.domain);
    std::mt19937_64 rng(cfg.seed * 8191 + 5);

    std::vector<detail::CheckAcc> accs;
    accs.emplace_back("planarity", tol.suite_flow_planarity);
    accs.emplace_back("closure", tol.suite_flow_closure);
    accs.emplace_back("drift", tol.suite_flow_drift);
    accs.emplace_back("speed", tol.suite_flow_speed);

    const double two_pi = 6.283185307179586;
    for (int n = 0; n < 4; ++n) {
        const auto p = plan.bundle(rng);
        try {
            const FlowResult r = flow_e2(spec, p[0], p[1], p[2], two_pi, 1500, tol);
            ++out.samples_checked;
            accs[0].add(r.planarity, p[0], p[1], p[2]);
            accs[1].add(r.closure, p[0], p[1], p[2]);
            accs[2].add(r.conservation_drift, p[0], p[1], p[2]);
            accs[3].add(r.max_speed_dev, p[0], p[1], p[2]);
        } catch (const Error& e) {
            detail::note_skip(out, p[0], p[1], p[2], e.what());
        }
    }
    detail::finalize(out, accs);
    return out;
}

inline SuiteResult blowup(const ImmersionSpec&, const SuiteConfig& cfg) {
    const Tolerances& tol = cfg.tol;
    SuiteResult out;
    out.name = "blowup";
    std::vector<detail::CheckAcc> accs;
    accs.emplace_back("escape-time", tol.suite_blowup);
    for (double v0 : {-10.0, 0.0, 1.0}) {
        const BlowupResult r = blowup_demo(v0, 1e-5);
        ++out.samples_checked;
        const double expected = 1.5707963267948966 - std::atan(v0);
        accs[0].add(std::abs(r.blowup_estimate - expected), v0, 0.0, 0.0);
    }
    detail::finalize(out, accs);
    return out;
}

}  // namespace suites

// ---------------------------------------------------------------------------
// orchestration
// ---------------------------------------------------------------------------

inline ImmersionSpec resolve_immersion(const SuiteConfig& cfg) {
    for (const char* g : {"veronese", "clifford", "geodesic2"})
        if (cfg.immersion == g) return gallery(cfg.immersion);
    std::ifstream in(cfg.immersion);
    if (!in) throw IOError("cannot open immersion file '" + cfg.immersion + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_immersion(ss.str(), cfg.tol);
}

inline Report run_suites(const SuiteConfig& cfg) {
    if (cfg.n1 < 4 || cfg.n2 < 4 || cfg.nt < 4)
        throw ConfigError("grid dimensions must be at least 4");
    std::vector<std::string> selected =
        cfg.suites.empty() ? all_suite_names() : cfg.suites;
    for (const std::string& s : selected) {
        const auto& all = all_suite_names();
        if (std::find(all.begin(), all.end(), s) == all.end())
            throw ConfigError("unknown suite '" + s + "'");
    }
    const ImmersionSpec spec = resolve_immersion(cfg);

    Report rep;
    rep.immersion = spec.name;
    rep.grid = {cfg.n1, cfg.n2, cfg.nt};
    rep.seed = cfg.seed;
    rep.tol = cfg.tol;
    for (const std::string& name : selected) {
        SuiteResult r;
        if (name == "surface") r = suites::surface(spec, cfg);
        else if (name == "polar") r = suites::polar(spec, cfg);
        else if (name == "frame") r = suites::frame(spec, cfg);
        else if (name == "lemma1") r = suites::lemma1(spec, cfg);
        else if (name == "quotient") r = suites::quotient(spec, cfg);
        else if (name == "theorem") r = suites::theorem(spec, cfg);
        else if (name == "flow") r = suites::flow(spec, cfg);
        else r = suites::blowup(spec, cfg);
        rep.all_pass = rep.all_pass && r.pass;
        rep.suites.push_back(std::move(r));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// report serialization: deterministic JSON, doubles at 17 significant digits
// ---------------------------------------------------------------------------

namespace detail {

inline std::string json_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string json_str(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        if (static_cast<unsigned char>(c) < 0x20) {
            char buf[8];
            std::snprintf(buf, sizeof buf, "\\u%04x", c);
            out += buf;
            continue;
        }
        out += c;
    }
    return out + "\"";
}

}  // namespace detail

inline std::string report_to_json(const Report& rep) {
    using detail::json_num;
    using detail::json_str;
    std::string j = "{\n";
    j += "  \"schema_version\": " + json_str(kReportSchemaVersion) + ",\n";
    j += "  \"toolkit_version\": " + json_str(kToolkitVersion) + ",\n";
    j += "  \"immersion\": " + json_str(rep.immersion) + ",\n";
    j += "  \"grid\": [" + std::to_string(rep.grid[0]) + ", " +
         std::to_string(rep.grid[1]) + ", " + std::to_string(rep.grid[2]) +
         "],\n";
    j += "  \"seed\": " + std::to_string(rep.seed) + ",\n";
    j += "  \"all_pass\": " + std::string(rep.all_pass ? "true" : "false") + ",\n";
    j += "  \"conventions\": {\n";
    j += "    \"normal_frame\": \"second-fundamental-form section; tangent "
         "frame diagonalizes A4 with c >= 0\",\n";
    j += "    \"kn_sign\": \"Kn = -2bc in the adapted frame; orientation from "
         "the continuation seed\",\n";
    j += "    \"u_normalization\": \"e1 flipped where needed so u >= 0\",\n";
    j += "    \"e2_orientation\": \"e2 = dPsi(d/dt), positive t\"\n";
    j += "  },\n";
    j += "  \"suites\": [\n";
    for (std::size_t i = 0; i < rep.suites.size(); ++i) {
        const SuiteResult& s = rep.suites[i];
        j += "    {\n";
        j += "      \"name\": " + json_str(s.name) + ",\n";
        j += "      \"pass\": " + std::string(s.pass ? "true" : "false") + ",\n";
        j += "      \"max_residual\": " + json_num(s.max_residual) + ",\n";
        j += "      \"worst_point\": [" + json_num(s.worst_point[0]) + ", " +
             json_num(s.worst_point[1]) + ", " + json_num(s.worst_point[2]) +
             "],\n";
        j += "      \"samples_checked\": " + std::to_string(s.samples_checked) +
             ",\n";
        j += "      \"samples_skipped\": " + std::to_string(s.samples_skipped) +
             ",\n";
        j += "      \"checks\": [\n";
        for (std::size_t k = 0; k < s.checks.size(); ++k) {
            const CheckResult& c = s.checks[k];
            j += "        {\"name\": " + json_str(c.name) +
                 ", \"pass\": " + (c.pass ? "true" : "false") +
                 ", \"max_residual\": " + json_num(c.max_residual) +
                 ", \"tolerance\": " + json_num(c.tolerance) +
                 ", \"count\": " + std::to_string(c.count) +
                 ", \"worst_point\": [" + json_num(c.worst_point[0]) + ", " +
                 json_num(c.worst_point[1]) + ", " + json_num(c.worst_point[2]) +
                 "]}";
            j += (k + 1 < s.checks.size()) ? ",\n" : "\n";
        }
        j += "      ],\n";
        j += "      \"skipped_points\": [";
        for (std::size_t k = 0; k < s.skipped.size(); ++k) {
            j += json_str(s.skipped[k]);
            if (k + 1 < s.skipped.size()) j += ", ";
        }
        j += "]\n";
        j += (i + 1 < rep.suites.size()) ? "    },\n" : "    }\n";
    }
    j += "  ],\n";
    j += "  \"tolerances\": {\n";
    {
        std::vector<std::string> entries;
        rep.tol.visit([&](const char* name, double v) {
            entries.push_back("    " + json_str(name) + ": " + json_num(v));
        });
        for (std::size_t k = 0; k < entries.size(); ++k) {
            j += entries[k];
            j += (k + 1 < entries.size()) ? ",\n" : "\n";
        }
    }
    j += "  }\n}\n";
    return j;
}

// ---------------------------------------------------------------------------
// mesh export
// ---------------------------------------------------------------------------

struct MeshStats {
    long vertices = 0;
    long faces = 0;
    int pole_axis = 4;  // coordinate axis of the projection pole (negative end)
};

/// Writes one triangulated t-slice per slice of the polar hypersurface,
/// stereographically projected from a pole on a negative coordinate axis
/// (default -e5, auto-rotated when the image comes near it). The OBJ holds
/// the first three projected coordinates; the sidecar CSV carries all four
/// plus the k1 attribute per vertex.
inline MeshStats mesh_export(const SuiteConfig& cfg, int t_slices,
                             const std::string& projection,
                             const std::string& out_path) {
    if (projection != "stereographic")
        throw ConfigError("unknown projection '" + projection + "'");
    if (t_slices <= 0) throw ConfigError("slices must be positive");
    const Tolerances& tol = cfg.tol;
    const ImmersionSpec spec = resolve_immersion(cfg);
    detail::SamplePlan plan(spec.domain);

    struct Vertex {
        double x1, x2, t;
        Vec5 pos;
        double k1;
    };
    std::vector<Vertex> verts;
    verts.reserve(static_cast<std::size_t>(t_slices) * cfg.n1 * cfg.n2);
    detail::sweep_base_grid(
        spec, plan, cfg.n1, cfg.n2, tol, [&](int, int, const SurfaceData& sd) {
            for (int s = 0; s < t_slices; ++s) {
                const double t = 6.283185307179586 * s / t_slices;
                const HypersurfaceShape hs = hypersurface_shape(sd, t, tol);
                const Vec5 pos = std::cos(t) * sd.frame.v3 + std::sin(t) * sd.frame.v4;
                verts.push_back({sd.x1, sd.x2, t, pos, hs.k1});
            }
        });

    // pole avoidance: need |1 - <x, p>| bounded below on every vertex
    int pole_axis = -1;
    for (int axis = 4; axis >= 0; --axis) {
        bool ok = true;
        for (const Vertex& v : verts)
            if (std::abs(1.0 + v.pos[axis]) < 0.05) {  // pole = -e_axis
                ok = false;
                break;
            }
        if (ok) {
            pole_axis = axis;
            break;
        }
    }
    if (pole_axis < 0)
        throw PoleCollisionError("all candidate poles meet the hypersurface");

    std::ofstream obj(out_path);
    if (!obj) throw IOError("cannot write '" + out_path + "'");
    std::ofstream csv(out_path + ".csv");
    if (!csv) throw IOError("cannot write '" + out_path + ".csv'");
    csv << "vertex,slice,i,j,x1,x2,t,k1,y1,y2,y3,y4\n";

    char buf[256];
    obj << "# polar hypersurface slices, stereographic projection\n";
    long vid = 0;
    // vertices are grouped per slice: index = ((i * n2) + j) * slices + s in
    // sweep order; reorder to slice-major for face generation
    const long per_slice = static_cast<long>(cfg.n1) * cfg.n2;
    std::vector<long> order(verts.size());
    for (long i = 0; i < static_cast<long>(verts.size()); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](long a, long b) {
        const long sa = a % t_slices, sb = b % t_slices;
        if (sa != sb) return sa < sb;
        return a / t_slices < b / t_slices;
    });
    for (long idx : order) {
        const Vertex& v = verts[idx];
        std::array<double, 4> y{};
        int c = 0;
        const double denom = 1.0 + v.pos[pole_axis];
        for (int a = 0; a < 5; ++a) {
            if (a == pole_axis) continue;
            y[c++] = v.pos[a] / denom;
        }
        std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", y[0], y[1], y[2]);
        obj << buf;
        const long s = idx % t_slices;
        const long base = idx / t_slices;
        const long i = base / cfg.n2, j = base % cfg.n2;
        std::snprintf(buf, sizeof buf,
                      "%ld,%ld,%ld,%ld,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      vid + 1, s, i, j, v.x1, v.x2, v.t, v.k1, y[0], y[1], y[2],
                      y[3]);
        csv << buf;
        ++vid;
    }
    long faces = 0;
    for (int s = 0; s < t_slices; ++s) {
        const long off = s * per_slice + 1;  // OBJ indices are 1-based
        for (int i = 0; i + 1 < cfg.n1; ++i) {
            for (int j = 0; j + 1 < cfg.n2; ++j) {
                const long a = off + i * cfg.n2 + j;
                const long b = a + 1;
                const long c2 = a + cfg.n2;
                const long d = c2 + 1;
                obj << "f " << a << " " << b << " " << d << "\n";
                obj << "f " << a << " " << d << " " << c2 << "\n";
                faces += 2;
            }
        }
    }
    MeshStats st;
    st.vertices = vid;
    st.faces = faces;
    st.pole_axis = pole_axis;
    return st;
}

/// Runs the e2 flow and writes the trajectory as CSV.
inline FlowResult flow_command(const SuiteConfig& cfg, double x1, double x2,
                               double t, double length, int steps,
                               const std::string& csv_path) {
    const ImmersionSpec spec = resolve_immersion(cfg);
    const FlowResult r = flow_e2(spec, x1, x2, t, length, steps, cfg.tol);
    if (!csv_path.empty()) {
        std::ofstream csv(csv_path);
        if (!csv) throw IOError("cannot write '" + csv_path + "'");
        csv << "s,x1,x2,t,p1,p2,p3,p4,p5,lambda,u,v,u_over_lambda2\n";
        char buf[400];
        for (const FlowSample& s : r.samples) {
            std::snprintf(buf, sizeof buf,
                          "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,"
                          "%.17g,%.17g,%.17g,%.17g\n",
                          s.s, s.x1, s.x2, s.t, s.position[0], s.position[1],
                          s.position[2], s.position[3], s.position[4], s.lambda,
                          s.u, s.v, s.u_over_lambda2);
            csv << buf;
        }
    }
    return r;
}

}  // namespace polarmap
