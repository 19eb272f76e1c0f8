#ifndef CLUP_CONTRACTION_HPP
#define CLUP_CONTRACTION_HPP

#include <optional>
#include <string>

#include "clup/model.hpp"
#include "clup/result.hpp"

namespace clup {

// Parameters of one CLuP^r0 phase, all in normalized units: r_norm = r/sqrt(n)
// and gamma1_scaled = gamma1_hat * sqrt(n) as tabulated.
//
// c_q2 is the free damping scalar of the contraction. It cancels from the
// fixed-point equation, so it only controls stability and convergence speed.
// The default c_q2 = 0 selects automatic damping: each step uses
//   c_q2 = r_tilde + safety * b * (sqrt(m) + sqrt(k))^2,
// where r_tilde = r_norm * sqrt(n), b = (gamma1_scaled / sqrt(n)) *
// sqrt(c2_hat), and k is the number of currently unclamped coordinates
// (k = n when every coordinate is clamped). (sqrt(m) + sqrt(k))^2 upper-bounds
// the largest eigenvalue of the Gram matrix restricted to the free set, so
// safety near 1 keeps the linearized step inside the stable region. A positive
// c_q2 is used verbatim as a fixed damping value.
struct PhaseConfig {
    double r_norm = 0.0;
    double gamma1_scaled = 0.0;
    double c2_hat = 1.0;   // target squared norm of the phase's fixed point
    double c_q2 = 0.0;     // 0 = automatic damping; > 0 = fixed value
    double safety = 0.8;   // damping margin used by automatic c_q2
    // Norm servo: before each step the carried iterate is rescaled towards the
    // phase's target squared norm by scale = clamp(sqrt(c2_hat / ||x||^2),
    // 1/cap, cap) with cap = norm_servo_cap. This keeps the iterate's norm
    // pinned near sqrt(c2_hat) while the step still runs on the true gradient,
    // which greatly improves basin selection on hard instances. cap = 1.0
    // disables the servo (the default), so fixed-point residuals computed with
    // the default config match the raw contraction map.
    double norm_servo_cap = 1.0;
    int i_max = 500;
    double step_tol = 1e-9;
    std::string label;

    void validate() const;
};

enum class GramMode { full_gram, two_mults };

// h = A'y always; G = A'A only below the threshold, otherwise every step
// does two rectangular multiplies instead of one square one.
struct PrecomputedOperators {
    GramMode gram_mode = GramMode::two_mults;
    std::optional<Matrix> G;  // n x n, symmetric
    Vector h;                 // length n
    const Matrix* A = nullptr;
    const Vector* y = nullptr;

    // Number of matrix-vector products performed so far (test instrumentation).
    mutable long matvec_count = 0;
};

PrecomputedOperators precompute(const SystemInstance& instance,
                                int gram_threshold = 4096);

// One clamped contraction step:
//   x_raw = (c_q2 x + g1 sqrt(c2_hat) (h - G x)) / (c_q2 - r_norm sqrt(n)),
//   g1 = gamma1_scaled / sqrt(n),
// followed by componentwise clamping to [-1/sqrt(n), +1/sqrt(n)]. With
// cfg.c_q2 = 0 the damping scalar is chosen automatically (see PhaseConfig).
Vector contraction_step(const Vector& x_prev, const PrecomputedOperators& ops,
                        const PhaseConfig& cfg, int n);

ClupResult contraction_run(const SystemInstance& instance, const PhaseConfig& cfg,
                           const Vector& x0);

// Same, reusing operators shared across phases.
ClupResult contraction_run(const SystemInstance& instance,
                           const PrecomputedOperators& ops,
                           const PhaseConfig& cfg, const Vector& x0);

// ||x - contraction_step(x)||; calibration bridge to the exact solver.
double fixed_point_residual(const SystemInstance& instance, const Vector& x,
                            const PhaseConfig& cfg);

}  // namespace clup

#endif
