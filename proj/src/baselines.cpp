#include "clup/baselines.hpp"

#include <cmath>

#include "clup/errors.hpp"

namespace clup {

RelaxationResult polytope_relax(const SystemInstance& instance, double tol,
                                int max_iter) {
    if (!(tol > 0.0)) {
        throw ConfigError("polytope_relax: tol must be positive");
    }
    const int n = instance.dims.n;
    const double bound = 1.0 / std::sqrt(static_cast<double>(n));

    // FISTA on f(x) = 0.5 ||y - A x||^2 with box projection. The Lipschitz
    // constant of the gradient is lambda_max(A^T A), estimated by power
    // iteration with a small safety factor.
    const Matrix& A = instance.A;
    const Vector h = A.transpose() * instance.y;

    Vector p = Vector::Ones(n) / std::sqrt(static_cast<double>(n));
    double lmax = 0.0;
    for (int it = 0; it < 60; ++it) {
        Vector q = A.transpose() * (A * p);
        lmax = q.norm();
        if (lmax == 0.0) {
            break;
        }
        p = q / lmax;
    }
    const double L = std::max(lmax * 1.01, 1e-12);

    auto project = [&](Vector& v) { v = v.cwiseMax(-bound).cwiseMin(bound); };

    Vector x = Vector::Zero(n);
    Vector z = x;
    double t = 1.0;
    int it = 0;
    bool converged = false;
    for (; it < max_iter; ++it) {
        Vector grad = A.transpose() * (A * z) - h;
        Vector x_next = z - grad / L;
        project(x_next);

        // Certificate on the new iterate: norm of the projected gradient step.
        Vector grad_x = A.transpose() * (A * x_next) - h;
        Vector probe = x_next - grad_x / L;
        project(probe);
        const double pg_norm = (probe - x_next).norm() * L;
        if (pg_norm <= tol) {
            x = x_next;
            converged = true;
            ++it;
            break;
        }

        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        Vector z_next = x_next + ((t - 1.0) / t_next) * (x_next - x);
        // Adaptive restart when momentum points against the gradient descent.
        if (grad.dot(x_next - x) > 0.0) {
            z_next = x_next;
            t = 1.0;
        } else {
            t = t_next;
        }
        x = x_next;
        z = z_next;
    }

    RelaxationResult result;
    result.x_relaxed = x;
    result.residual = (instance.y - A * x).norm();
    result.r_plt_norm = result.residual / std::sqrt(static_cast<double>(n));
    result.iterations = it;
    result.converged = converged;
    return result;
}

RadiusScaling radius_from_scaling(double r_sc, double r_plt_norm, int n) {
    if (!(r_sc > 0.0)) {
        throw ConfigError("radius_from_scaling: r_sc must be positive");
    }
    if (r_plt_norm < 0.0) {
        throw ConfigError("radius_from_scaling: r_plt_norm must be nonnegative");
    }
    if (n < 1) {
        throw ConfigError("radius_from_scaling: n must be positive");
    }
    RadiusScaling s;
    s.r_norm = r_sc * r_plt_norm;
    s.r = s.r_norm * std::sqrt(static_cast<double>(n));
    return s;
}

}  // namespace clup
