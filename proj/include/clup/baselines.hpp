#pragma once

#include "clup/model.hpp"

namespace clup {

// Polytope (box) relaxation baseline: min ||y - A x|| over the box
// [-1/sqrt(n), 1/sqrt(n)]^n, solved by an accelerated projected first-order
// method, plus the paper's radius-calibration convention r = r_sc * r_plt * sqrt(n).

struct RelaxationResult {
    Vector x_relaxed;     // componentwise in the box
    double residual = 0.0;      // ||y - A x_relaxed||
    double r_plt_norm = 0.0;    // residual / sqrt(n)
    int iterations = 0;
    bool converged = false;     // projected-gradient norm reached tol
};

// Solves the box-constrained least squares to first-order optimality `tol`
// (projected-gradient norm). If max_iter is exhausted first, the best iterate
// is returned with converged=false.
RelaxationResult polytope_relax(const SystemInstance& instance,
                                double tol = 1e-9, int max_iter = 20000);

struct RadiusScaling {
    double r = 0.0;       // raw radius r_sc * r_plt_norm * sqrt(n)
    double r_norm = 0.0;  // normalized radius r / sqrt(n) = r_sc * r_plt_norm
};

// r_plt_norm is the per-instance normalized relaxation residual; r_sc scales
// it into the CLuP radius. Raw r = r_norm * sqrt(n).
RadiusScaling radius_from_scaling(double r_sc, double r_plt_norm, int n);

}  // namespace clup
