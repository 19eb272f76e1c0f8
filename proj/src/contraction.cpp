#include "clup/contraction.hpp"

#include <cmath>
#include <string>

#include "clup/errors.hpp"

namespace clup {

void PhaseConfig::validate() const {
    if (!(r_norm > 0.0))
        throw ConfigError("PhaseConfig: r_norm must be > 0");
    if (i_max < 1)
        throw ConfigError("PhaseConfig: i_max must be >= 1");
    if (c_q2 < 0.0)
        throw ConfigError("PhaseConfig: c_q2 must be >= 0 (0 = automatic)");
    if (!(safety > 0.0))
        throw ConfigError("PhaseConfig: safety must be > 0");
    if (!(c2_hat > 0.0) || c2_hat > 1.0)
        throw ConfigError("PhaseConfig: c2_hat must be in (0, 1]");
    if (!(norm_servo_cap >= 1.0))
        throw ConfigError("PhaseConfig: norm_servo_cap must be >= 1 (1 = off)");
}

PrecomputedOperators precompute(const SystemInstance& instance, int gram_threshold) {
    PrecomputedOperators ops;
    ops.A = &instance.A;
    ops.y = &instance.y;
    ops.h = instance.A.transpose() * instance.y;
    if (instance.dims.n <= gram_threshold) {
        ops.gram_mode = GramMode::full_gram;
        Matrix G(instance.dims.n, instance.dims.n);
        G.setZero();
        G.selfadjointView<Eigen::Lower>().rankUpdate(instance.A.transpose());
        G.triangularView<Eigen::StrictlyUpper>() = G.transpose();
        ops.G = std::move(G);
    } else {
        ops.gram_mode = GramMode::two_mults;
    }
    return ops;
}

Vector contraction_step(const Vector& x_prev, const PrecomputedOperators& ops,
                        const PhaseConfig& cfg, int n) {
    if (x_prev.size() != n)
        throw ConfigError("contraction_step: length(x_prev) != n");
    const double sqrt_n = std::sqrt(static_cast<double>(n));
    const double bound = 1.0 / sqrt_n;
    const double g1 = cfg.gamma1_scaled / sqrt_n;
    const double b = g1 * std::sqrt(cfg.c2_hat);
    const double r_tilde = cfg.r_norm * sqrt_n;

    double c_q2 = cfg.c_q2;
    if (c_q2 == 0.0) {
        int k = 0;
        for (int i = 0; i < n; ++i) {
            if (std::abs(x_prev(i)) < bound * (1.0 - 1e-12)) ++k;
        }
        if (k == 0) k = n;
        const double m = static_cast<double>(ops.A->rows());
        const double gram_edge =
            (std::sqrt(m) + std::sqrt(static_cast<double>(k))) *
            (std::sqrt(m) + std::sqrt(static_cast<double>(k)));
        c_q2 = r_tilde + cfg.safety * b * gram_edge;
    }
    const double denom = c_q2 - r_tilde;
    if (denom == 0.0)
        throw ConfigError("contraction_step: c_q2 - r_norm*sqrt(n) must be nonzero");

    Vector grad(n);  // G x - h = A'(A x - y)
    if (ops.gram_mode == GramMode::full_gram) {
        grad.noalias() = (*ops.G).selfadjointView<Eigen::Lower>() * x_prev;
        grad -= ops.h;
        ops.matvec_count += 1;
    } else {
        Vector ax = (*ops.A) * x_prev;
        grad.noalias() = ops.A->transpose() * ax;
        grad -= ops.h;
        ops.matvec_count += 2;
    }

    // Norm servo (see PhaseConfig): rescale the carried iterate towards the
    // target squared norm, capped per step. cap == 1 leaves the step exact.
    double scale = 1.0;
    const double cap = cfg.norm_servo_cap;
    if (cap > 1.0) {
        const double c2_now = x_prev.squaredNorm();
        if (c2_now > 1e-12) {
            scale = std::sqrt(cfg.c2_hat / c2_now);
            if (scale > cap) scale = cap;
            if (scale < 1.0 / cap) scale = 1.0 / cap;
        }
    }

    Vector x_raw = (c_q2 * scale * x_prev - b * grad) / denom;
    if (!x_raw.allFinite())
        throw ConvergenceError(
            "contraction_step: non-finite iterate (r_norm=" + std::to_string(cfg.r_norm) +
                ", gamma1_scaled=" + std::to_string(cfg.gamma1_scaled) +
                ", c_q2=" + std::to_string(c_q2) + ")",
            0.0);

    return x_raw.cwiseMax(-bound).cwiseMin(bound);
}

ClupResult contraction_run(const SystemInstance& instance,
                           const PrecomputedOperators& ops,
                           const PhaseConfig& cfg, const Vector& x0) {
    cfg.validate();
    const int n = instance.dims.n;
    const double sqrt_n = std::sqrt(static_cast<double>(n));
    const double bound = 1.0 / sqrt_n;
    const double r = cfg.r_norm * sqrt_n;

    Vector x = x0.cwiseMax(-bound).cwiseMin(bound);

    ClupResult res;
    res.trajectory.reserve(cfg.i_max);
    int corner_stuck = 0;
    for (int i = 0; i < cfg.i_max; ++i) {
        Vector x_next = contraction_step(x, ops, cfg, n);
        res.trajectory.push_back(overlap_stats(x_next, instance.x_sol));
        const double step_norm = (x_next - x).norm();
        x = std::move(x_next);
        ++res.iterations;
        if (step_norm <= cfg.step_tol) {
            res.converged = true;
            break;
        }
        // Divergence detector: fully saturated iterate far outside the ball.
        if ((x.cwiseAbs().array() >= bound * (1.0 - 1e-12)).all()) {
            const double resid = (instance.y - instance.A * x).norm();
            if (resid > 3.0 * r) {
                if (++corner_stuck >= 50) {
                    res.non_convergent = true;
                    break;
                }
            } else {
                corner_stuck = 0;
            }
        } else {
            corner_stuck = 0;
        }
    }
    res.x_final = x;
    res.x_step_final = std::move(x);
    res.residual_final = (instance.y - instance.A * res.x_step_final).norm();
    return res;
}

ClupResult contraction_run(const SystemInstance& instance, const PhaseConfig& cfg,
                           const Vector& x0) {
    PrecomputedOperators ops = precompute(instance);
    return contraction_run(instance, ops, cfg, x0);
}

double fixed_point_residual(const SystemInstance& instance, const Vector& x,
                            const PhaseConfig& cfg) {
    PrecomputedOperators ops = precompute(instance);
    return (x - contraction_step(x, ops, cfg, instance.dims.n)).norm();
}

}  // namespace clup
