#ifndef CLUP_MODEL_HPP
#define CLUP_MODEL_HPP

#include <Eigen/Dense>
#include <cstdint>

namespace clup {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Problem dimensions: m measurements, n unknowns, m = round(alpha * n).
struct SystemDims {
    int n;
    int m;
    double alpha;

    static SystemDims from_alpha(int n, double alpha);
};

enum class SolMode { random_signs, all_plus };

// One realization of y = A x_sol + sigma v with i.i.d. standard normal A, v
// and x_sol in {-1/sqrt(n), +1/sqrt(n)}^n. Always regenerated from
// (dims, sigma, seed); never serialized.
struct SystemInstance {
    SystemDims dims;
    Matrix A;        // m x n
    Vector x_sol;    // length n, unit norm
    Vector v;        // length m
    double sigma;
    Vector y;        // A * x_sol + sigma * v
    std::uint64_t seed;
};

struct OverlapStats {
    double c1;  // x_sol' x
    double c2;  // ||x||^2
};

// 1/sigma^2 in dB  ->  sigma = 10^(-snr_db/20).
double snr_db_to_sigma(double snr_db);

// Draw order (fixed for seed portability): A row-major, then v, then x_sol
// signs, each segment starting on a Box-Muller pair boundary (see rng.hpp).
SystemInstance generate_instance(const SystemDims& dims, double sigma,
                                 std::uint64_t seed,
                                 SolMode mode = SolMode::random_signs);

OverlapStats overlap_stats(const Vector& x, const Vector& x_sol);

// Fraction of coordinates whose sign differs from x_sol; sign(0) counts as +.
double bit_error_fraction(const Vector& x, const Vector& x_sol);

// Componentwise sign(x_i)/sqrt(n) with sign(0) = +1.
Vector round_to_corner(const Vector& x, int n);

}  // namespace clup

#endif
