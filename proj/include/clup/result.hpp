#ifndef CLUP_RESULT_HPP
#define CLUP_RESULT_HPP

#include <vector>

#include "clup/model.hpp"

namespace clup {

// Outcome of one CLuP run (exact iteration or contraction).
// The trajectory records (c1, c2) of the pre-normalization iterate at each
// step; for the contraction there is no normalization and x_step_final
// coincides with x_final.
struct ClupResult {
    Vector x_final;        // last algorithm iterate
    Vector x_step_final;   // last pre-normalization (constrained-step) iterate
    std::vector<OverlapStats> trajectory;
    double residual_final = 0.0;  // ||y - A x_step_final||
    int iterations = 0;
    bool converged = false;
    bool non_convergent = false;  // divergence-detector flag (contraction only)
};

}  // namespace clup

#endif
