#include "clup/exact_solver.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "clup/errors.hpp"
#include "clup/rng.hpp"

namespace clup {

void ExactStepSettings::validate() const {
    if (!(constraint_tol > 0.0) || !(inner_tol > 0.0) || !(mu_bracket_max > 0.0))
        throw ConfigError("ExactStepSettings: tolerances must be > 0");
    if (inner_max_iter < 1)
        throw ConfigError("ExactStepSettings: inner_max_iter must be >= 1");
}

namespace {

struct InnerWorkspace {
    const SystemInstance* inst;
    Matrix G;        // A'A
    Vector h;        // A'y
    double lmax_G;   // largest eigenvalue of G
    double y_sq;
    double bound;    // 1/sqrt(n)

    explicit InnerWorkspace(const SystemInstance& instance) : inst(&instance) {
        const int n = instance.dims.n;
        G.resize(n, n);
        G.setZero();
        G.selfadjointView<Eigen::Lower>().rankUpdate(instance.A.transpose());
        G.triangularView<Eigen::StrictlyUpper>() = G.transpose();
        h = instance.A.transpose() * instance.y;
        y_sq = instance.y.squaredNorm();
        bound = 1.0 / std::sqrt(static_cast<double>(n));

        // Power iteration for ||A||_2^2.
        Vector u = Vector::Ones(n).normalized();
        double lambda = 0.0;
        for (int i = 0; i < 200; ++i) {
            Vector Gu = G * u;
            const double next = u.dot(Gu);
            u = Gu.normalized();
            if (std::abs(next - lambda) <= 1e-10 * std::max(1.0, next) && i > 10) {
                lambda = next;
                break;
            }
            lambda = next;
        }
        lmax_G = lambda * 1.01;  // slack so 1/L stays a valid step
    }

    double residual_norm(const Vector& x) const {
        return std::sqrt(std::max(0.0, x.dot(G * x) - 2.0 * h.dot(x) + y_sq));
    }

    Vector residual_vec(const Vector& x) const { return inst->y - inst->A * x; }

    Vector clamp(const Vector& x) const { return x.cwiseMax(-bound).cwiseMin(bound); }

    // min over the box of  mu ||y - A x||^2 - x_prev' x  via FISTA with
    // adaptive restart; returns the projected-gradient-mapping norm reached.
    double solve_box_qp(double mu, const Vector& x_prev, Vector& x,
                        const ExactStepSettings& s) const {
        const double L = std::max(2.0 * mu * lmax_G, 1e-12);
        const double tol = s.inner_tol * (1.0 + x_prev.norm());
        Vector z = x;  // momentum point
        Vector x_old = x;
        double t = 1.0;
        double pg = 0.0;
        for (int k = 0; k < s.inner_max_iter; ++k) {
            Vector grad = 2.0 * mu * (G * z - h) - x_prev;
            Vector x_new = clamp(z - grad / L);
            pg = (x_new - z).norm() * L;
            // Restart if the momentum direction opposes the step.
            if ((x_new - x).dot(x - x_old) < 0.0) t = 1.0;
            const double t_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
            z = x_new + ((t - 1.0) / t_new) * (x_new - x);
            x_old = std::move(x);
            x = std::move(x_new);
            t = t_new;
            if (pg <= tol) {
                // Confirm optimality at x itself, not at the momentum point.
                Vector gx = 2.0 * mu * (G * x - h) - x_prev;
                const double pgx = (clamp(x - gx / L) - x).norm() * L;
                if (pgx <= tol) return pgx;
            }
        }
        return pg;
    }
};

Vector inner_step_impl(const InnerWorkspace& w, const Vector& x_prev, double r,
                       const ExactStepSettings& s) {
    const SystemInstance& inst = *w.inst;
    const int n = inst.dims.n;
    if (x_prev.size() != n)
        throw ConfigError("clup_inner_step: length(x_prev) != n");
    if (!(r > 0.0)) throw ConfigError("clup_inner_step: r must be > 0");

    // Unconstrained box maximizer: the corner aligned with x_prev.
    Vector corner(n);
    for (int i = 0; i < n; ++i) corner(i) = x_prev(i) >= 0.0 ? w.bound : -w.bound;
    if (w.residual_norm(corner) <= r * (1.0 + s.constraint_tol)) return corner;

    // Ball active: find mu >= 0 with ||y - A x(mu)|| = r. residual(mu) is
    // nonincreasing, so bracket geometrically then bisect/secant in log(mu).
    auto eval = [&](double mu, Vector& x) {
        w.solve_box_qp(mu, x_prev, x, s);
        return w.residual_norm(x);
    };

    double mu_lo = 1e-6;
    Vector x = corner;
    double res_lo = eval(mu_lo, x);
    if (res_lo <= r) {
        // Already inside at the smallest multiplier; shrink until outside or
        // accept if the constraint is (nearly) inactive there.
        while (res_lo <= r * (1.0 - s.constraint_tol) && mu_lo > 1e-14) {
            mu_lo /= 10.0;
            res_lo = eval(mu_lo, x);
        }
        if (std::abs(res_lo - r) <= r * s.constraint_tol || res_lo < r) return x;
    }

    double mu_hi = mu_lo;
    double res_hi = res_lo;
    Vector x_hi = x;
    while (res_hi > r && mu_hi < s.mu_bracket_max) {
        mu_hi *= 10.0;
        res_hi = eval(mu_hi, x_hi);
    }
    if (res_hi > r) {
        // Even the near-least-squares end misses the ball: infeasible radius.
        throw InfeasibleError(
            "clup_inner_step: radius r=" + std::to_string(r) +
                " below minimum achievable residual " + std::to_string(res_hi),
            res_hi);
    }

    // Safeguarded secant on f(log mu) = residual - r inside [mu_lo, mu_hi].
    // x_out keeps the outside-ball bracket solution (residual > r) and x_in
    // the inside one; they back the interpolation fallback below.
    double a = std::log(mu_lo), fa = res_lo - r;
    double b = std::log(mu_hi), fb = res_hi - r;
    Vector x_out = x;        // residual res_lo > r here
    Vector x_in = x_hi;      // residual res_hi <= r
    Vector x_cur = x_hi;
    double res_cur = res_hi;
    for (int it = 0; it < 200; ++it) {
        if (std::abs(res_cur - r) <= r * s.constraint_tol) return x_cur;
        double c;
        if (fb != fa) {
            c = b - fb * (b - a) / (fb - fa);  // secant
            const double lo = std::min(a, b), hi = std::max(a, b);
            if (!(c > lo && c < hi)) c = 0.5 * (a + b);  // safeguard: bisect
        } else {
            c = 0.5 * (a + b);
        }
        res_cur = eval(std::exp(c), x_cur);
        const double fc = res_cur - r;
        if (fc > 0.0) {
            a = c;
            fa = fc;
            x_out = x_cur;
        } else {
            b = c;
            fb = fc;
            x_in = x_cur;
        }
        if (std::abs(b - a) < 1e-15) break;
    }
    if (std::abs(res_cur - r) <= r * std::max(s.constraint_tol, 1e-12) * 10.0)
        return x_cur;

    // With m < n the box QP is not strictly convex, so the minimizer (and the
    // residual) can jump discontinuously in mu and r may sit inside the jump.
    // Both bracket endpoints then nearly minimize the same critical-mu
    // objective, hence so does every point of the segment between them (the
    // objective is convex and the box is convex). Pick the segment point whose
    // residual is exactly r: ||y - A x(t)||^2 is quadratic in t with opposite
    // signs of (residual - r) at the endpoints, so a root exists in [0, 1].
    {
        const Vector d_in = w.residual_vec(x_in);    // ||d_in||  <= r
        const Vector d_out = w.residual_vec(x_out);  // ||d_out|| >  r
        const Vector dd = d_out - d_in;
        const double qa = dd.squaredNorm();
        const double qb = 2.0 * d_in.dot(dd);
        const double qc = d_in.squaredNorm() - r * r;
        const double disc = qb * qb - 4.0 * qa * qc;
        if (qa > 0.0 && disc >= 0.0) {
            const double t = (-qb + std::sqrt(disc)) / (2.0 * qa);
            if (t >= 0.0 && t <= 1.0) {
                Vector x_mix = x_in + t * (x_out - x_in);
                if (std::abs(w.residual_norm(x_mix) - r) <=
                    r * std::max(s.constraint_tol, 1e-10) * 10.0)
                    return x_mix;
            }
        }
    }
    throw ConvergenceError(
        "clup_inner_step: multiplier search stalled, |residual - r| = " +
            std::to_string(std::abs(res_cur - r)),
        std::abs(res_cur - r));
}

}  // namespace

Vector clup_inner_step(const SystemInstance& instance, const Vector& x_prev,
                       double r, const ExactStepSettings& settings) {
    settings.validate();
    InnerWorkspace w(instance);
    return inner_step_impl(w, x_prev, r, settings);
}

ClupResult clup_run(const SystemInstance& instance, double r, const Vector& x0,
                    int max_iter, double step_tol, const ExactStepSettings& settings) {
    settings.validate();
    if (max_iter < 1) throw ConfigError("clup_run: max_iter must be >= 1");
    const double x0_norm = x0.norm();
    if (!(x0_norm > 0.0)) throw ConfigError("clup_run: x0 must be nonzero");

    InnerWorkspace w(instance);
    Vector x = x0 / x0_norm;
    ClupResult res;
    for (int i = 0; i < max_iter; ++i) {
        Vector x_step;
        try {
            x_step = inner_step_impl(w, x, r, settings);
        } catch (const InfeasibleError& e) {
            throw InfeasibleError("iteration " + std::to_string(i) + ": " + e.what(),
                                  e.min_residual);
        } catch (const ConvergenceError& e) {
            throw ConvergenceError("iteration " + std::to_string(i) + ": " + e.what(),
                                   e.best_criterion);
        }
        res.trajectory.push_back(overlap_stats(x_step, instance.x_sol));
        Vector x_next = x_step / x_step.norm();
        const double step_norm = (x_next - x).norm();
        x = std::move(x_next);
        res.x_step_final = std::move(x_step);
        ++res.iterations;
        if (step_norm <= step_tol) {
            res.converged = true;
            break;
        }
    }
    res.x_final = x;
    res.residual_final = w.residual_norm(res.x_step_final);
    return res;
}

Vector random_corner_init(int n, std::uint64_t seed) {
    if (n < 1) throw ConfigError("random_corner_init: n must be >= 1");
    RandomStream rs(seed);
    const double bound = 1.0 / std::sqrt(static_cast<double>(n));
    Vector x(n);
    for (int i = 0; i < n; ++i) x(i) = rs.sign() * bound;
    return x;
}

}  // namespace clup
