#ifndef CLUP_EXACT_SOLVER_HPP
#define CLUP_EXACT_SOLVER_HPP

#include <cstdint>

#include "clup/model.hpp"
#include "clup/result.hpp"

namespace clup {

struct ExactStepSettings {
    double constraint_tol = 1e-9;   // |  ||y-Ax|| - r  | <= r * constraint_tol
    double mu_bracket_max = 1e6;    // upper bracket for the ball multiplier
    double inner_tol = 1e-10;       // projected-gradient optimality tolerance
    int inner_max_iter = 10000;

    void validate() const;
};

// One exact CLuP step:
//   arg max  x_prev' x   s.t.  ||y - A x|| <= r,  x in [-1/sqrt(n), 1/sqrt(n)]^n.
// If the box corner sign(x_prev)/sqrt(n) is ball-feasible it is the maximizer;
// otherwise the ball is active and a safeguarded secant search on the
// multiplier mu of the squared-ball penalty drives ||y - A x(mu)|| to r, each
// evaluation solving  min  mu ||y-Ax||^2 - x_prev' x  over the box by FISTA.
Vector clup_inner_step(const SystemInstance& instance, const Vector& x_prev,
                       double r, const ExactStepSettings& settings = {});

// Full CLuP iteration: x <- step(x) / ||step(x)||, until the normalized step
// norm falls below step_tol or max_iter is hit. Trajectory holds the
// pre-normalization (c1, c2) per iteration.
ClupResult clup_run(const SystemInstance& instance, double r, const Vector& x0,
                    int max_iter, double step_tol,
                    const ExactStepSettings& settings = {});

// Uniform random corner of {-1/sqrt(n), +1/sqrt(n)}^n.
Vector random_corner_init(int n, std::uint64_t seed);

}  // namespace clup

#endif
