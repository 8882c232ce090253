#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>

namespace polarmap {

inline constexpr const char* kToolkitVersion = "0.1.0";
inline constexpr const char* kReportSchemaVersion = "1";

/// Every numerical knob of the toolkit lives here. Defaults are the
/// contract values used by the verification suites; individual fields can
/// be overridden from a tolerance file (see suites.hpp).
struct Tolerances {
    // elementary-function guards
    double div_guard = 1e-14;         // |denominator| must exceed this
    double singular_arg_guard = 1e-14;  // log/sqrt/fractional-pow argument floor

    // small linear algebra
    double gram_det_min = 1e-20;      // Gram-Schmidt rank threshold
    double orthonormal = 1e-12;       // <u_i,u_j> = delta_ij
    double eigen_rel = 1e-10;         // |A v - lambda v| <= eigen_rel * |A|
    double sign_eps = 1e-12;          // first-nonzero threshold for sign fixing
    double complement_residual_min = 1e-6;  // candidate usable for completion

    // immersion validation
    double sphericality = 1e-10;
    double rank_gram_min = 1e-12;
    int load_grid = 16;

    // adapted frames
    double frame_orthonormal = 1e-10;
    double flat_tol = 1e-10;          // second fundamental form treated as zero

    // finite-difference steps
    double fd_step_omega = 1e-4;      // normal connection form
    double fd_step_frame = 1e-4;      // frame-equation residuals
    double fd_step_t = 1e-4;          // v = e2(log lambda)
    double fd_step_conservation = 1e-3;
    double fd_step_lb2 = 1e-2;        // surface Laplace-Beltrami stencil
    double fd_step_lb3 = 1e-3;        // bundle Laplace-Beltrami stencil

    // polar map
    double regular_min = 1e-10;       // r below this is a singular point
    double near_flat = 1e-6;          // 1 - K floor for log(1-K) formulas
    double fd_regularity_floor = 0.05;  // min r for finite-difference stencils

    // suite pass thresholds
    double suite_ortho = 1e-10;
    double suite_sphericality = 1e-10;
    double suite_trace = 1e-8;
    double suite_identity_sg = 1e-12;
    double suite_defect_floor = 1e-10;
    double suite_pde21 = 1e-6;
    double suite_k_closed_form_rel = 1e-7;
    double suite_k2_rel = 1e-8;
    double suite_gk_rel = 1e-9;
    double suite_sym = 1e-9;
    double suite_frame_eq = 1e-3;
    double suite_conservation = 1e-4;
    double suite_harmonic = 1e-3;
    double suite_bridge = 1e-6;
    double suite_theorem_identity = 1e-10;
    double suite_uv_conclusion = 1e-5;
    double suite_defect_superminimal = 1e-8;
    double suite_flow_planarity = 1e-6;
    double suite_flow_closure = 1e-8;
    double suite_flow_drift = 1e-6;
    double suite_flow_speed = 1e-6;
    double suite_blowup = 1e-3;
    double suite_khat = 1e-6;
    double suite_khat_bound = 1e-9;
    double u_mismatch_rel = 1e-4;     // direct vs recovered u disagreement
    double superminimal_h = 1e-8;     // (u-1)^2 + v^2 conclusion flag

    /// Apply `name = value`; returns false for unknown names.
    bool set(const std::string& name, double value);

    /// Visits every field as (name, value); used for report echoes.
    void visit(const std::function<void(const char*, double)>& fn) const;
};

namespace detail {
template <typename F>
void tolerance_fields(Tolerances& t, F&& f) {
    f("div_guard", t.div_guard);
    f("singular_arg_guard", t.singular_arg_guard);
    f("gram_det_min", t.gram_det_min);
    f("orthonormal", t.orthonormal);
    f("eigen_rel", t.eigen_rel);
    f("sign_eps", t.sign_eps);
    f("complement_residual_min", t.complement_residual_min);
    f("sphericality", t.sphericality);
    f("rank_gram_min", t.rank_gram_min);
    f("frame_orthonormal", t.frame_orthonormal);
    f("flat_tol", t.flat_tol);
    f("fd_step_omega", t.fd_step_omega);
    f("fd_step_frame", t.fd_step_frame);
    f("fd_step_t", t.fd_step_t);
    f("fd_step_conservation", t.fd_step_conservation);
    f("fd_step_lb2", t.fd_step_lb2);
    f("fd_step_lb3", t.fd_step_lb3);
    f("regular_min", t.regular_min);
    f("near_flat", t.near_flat);
    f("fd_regularity_floor", t.fd_regularity_floor);
    f("suite_ortho", t.suite_ortho);
    f("suite_sphericality", t.suite_sphericality);
    f("suite_trace", t.suite_trace);
    f("suite_identity_sg", t.suite_identity_sg);
    f("suite_defect_floor", t.suite_defect_floor);
    f("suite_pde21", t.suite_pde21);
    f("suite_k_closed_form_rel", t.suite_k_closed_form_rel);
    f("suite_k2_rel", t.suite_k2_rel);
    f("suite_gk_rel", t.suite_gk_rel);
    f("suite_sym", t.suite_sym);
    f("suite_frame_eq", t.suite_frame_eq);
    f("suite_conservation", t.suite_conservation);
    f("suite_harmonic", t.suite_harmonic);
    f("suite_bridge", t.suite_bridge);
    f("suite_theorem_identity", t.suite_theorem_identity);
    f("suite_uv_conclusion", t.suite_uv_conclusion);
    f("suite_defect_superminimal", t.suite_defect_superminimal);
    f("suite_flow_planarity", t.suite_flow_planarity);
    f("suite_flow_closure", t.suite_flow_closure);
    f("suite_flow_drift", t.suite_flow_drift);
    f("suite_flow_speed", t.suite_flow_speed);
    f("suite_blowup", t.suite_blowup);
    f("suite_khat", t.suite_khat);
    f("suite_khat_bound", t.suite_khat_bound);
    f("u_mismatch_rel", t.u_mismatch_rel);
    f("superminimal_h", t.superminimal_h);
}
}  // namespace detail

inline bool Tolerances::set(const std::string& name, double value) {
    bool found = false;
    detail::tolerance_fields(*this, [&](const char* n, double& v) {
        if (name == n) {
            v = value;
            found = true;
        }
    });
    return found;
}

inline void Tolerances::visit(const std::function<void(const char*, double)>& fn) const {
    detail::tolerance_fields(const_cast<Tolerances&>(*this),
                             [&](const char* n, double& v) { fn(n, v); });
}

}  // namespace polarmap
