#pragma once

#include <string>
#include <vector>

namespace clup {

// Closed-form random-duality theory for binary ML detection: the objective
// xi_ml(alpha, sigma; c1), its derivatives in c1, stationary-point analysis
// over c1, and the glitch SNR where the global minimizer jumps branches.

enum class PointKind { local_min, local_max, boundary, global_min_marker };

struct TheoryPoint {
    double alpha = 0.0;
    double sigma = 0.0;
    double c1 = 0.0;
    double xi = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
    PointKind kind = PointKind::local_min;
};

enum class CurveBranch { global, local_high_branch };

struct CurvePoint {
    double snr_db = 0.0;
    double c1 = 0.0;
    double xi = 0.0;
    CurveBranch branch = CurveBranch::global;
};

// Inverse error function on (-1, 1): rational initial guess refined by
// Newton steps against std::erf until |erf(x) - p| <= 1e-12. Odd symmetry is
// enforced exactly. Throws DomainError for |p| >= 1.
double erfinv(double p);

// xi_ml(alpha, sigma; c1) = sqrt(alpha) * sqrt(2 - 2 c1 + sigma^2)
//                           - sqrt(2/pi) * exp(-(erfinv(-c1))^2).
// Requires |c1| < 1, alpha > 0, sigma >= 0.
double xi_ml(double alpha, double sigma, double c1);

// d xi_ml / d c1 = -sqrt(alpha)/sqrt(2 - 2 c1 + sigma^2) - sqrt(2) erfinv(-c1).
double xi_ml_d1(double alpha, double sigma, double c1);

// d^2 xi_ml / d c1^2 = -sqrt(alpha)/(2 - 2 c1 + sigma^2)^{3/2}
//                      + sqrt(pi/2) * exp((erfinv(-c1))^2).
double xi_ml_d2(double alpha, double sigma, double c1);

// Sign-change bracketing of d1 on a uniform grid over [c1_lo, c1_hi]
// followed by bisection to |d1| <= 1e-9 or bracket width <= 1e-12. Roots
// within 1e-8 of each other are merged; each kept root is classified by the
// sign of d2. Returns points sorted by c1.
std::vector<TheoryPoint> find_stationary_points(double alpha, double sigma,
                                                double c1_lo = -0.999999,
                                                double c1_hi = 0.999999,
                                                int grid_n = 4000);

// global: stationary local minimum with the smallest xi.
// high_branch: stationary local minimum with the largest c1.
// The two coincide above the glitch SNR. Throws ConvergenceError when no
// stationary minimum exists in the search interval.
struct MinPair {
    TheoryPoint global;
    TheoryPoint high_branch;
};
MinPair global_and_local_min(double alpha, double sigma);

// Bisection on snr_db over the indicator "the global minimizer sits on the
// high-c1 branch" until the bracket is <= tol_db; returns the midpoint.
// Throws ConvergenceError if the indicator does not change over the bracket.
double find_glitch_snr(double alpha, double snr_lo_db, double snr_hi_db,
                       double tol_db = 0.01);

// Per-SNR curve through global_and_local_min with the selected branch.
// Failures at individual grid points are rethrown with the SNR attached.
std::vector<CurvePoint> ml_curve(double alpha,
                                 const std::vector<double>& snr_grid_db,
                                 CurveBranch mode);

std::string to_string(PointKind kind);
std::string to_string(CurveBranch branch);

}  // namespace clup
