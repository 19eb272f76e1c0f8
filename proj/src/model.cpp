#include "clup/model.hpp"

#include <cmath>
#include <string>

#include "clup/errors.hpp"
#include "clup/rng.hpp"

namespace clup {

SystemDims SystemDims::from_alpha(int n, double alpha) {
    if (n < 1)
        throw ConfigError("SystemDims: n must be >= 1, got " + std::to_string(n));
    if (!(alpha > 0.0))
        throw ConfigError("SystemDims: alpha must be > 0, got " + std::to_string(alpha));
    const int m = static_cast<int>(std::lround(alpha * n));
    if (m < 1)
        throw ConfigError("SystemDims: round(alpha*n) must be >= 1, got " + std::to_string(m));
    return SystemDims{n, m, alpha};
}

double snr_db_to_sigma(double snr_db) {
    return std::pow(10.0, -snr_db / 20.0);
}

SystemInstance generate_instance(const SystemDims& dims, double sigma,
                                 std::uint64_t seed, SolMode mode) {
    if (dims.n < 1 || dims.m < 1)
        throw ConfigError("generate_instance: invalid dims");
    if (sigma < 0.0)
        throw ConfigError("generate_instance: sigma must be >= 0");

    const int n = dims.n;
    const int m = dims.m;
    RandomStream rs(seed);

    Matrix A(m, n);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = rs.normal();
    rs.flush();

    Vector v(m);
    for (int i = 0; i < m; ++i) v(i) = rs.normal();
    rs.flush();

    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
    Vector x_sol(n);
    if (mode == SolMode::all_plus) {
        x_sol.setConstant(inv_sqrt_n);
    } else {
        for (int j = 0; j < n; ++j) x_sol(j) = rs.sign() * inv_sqrt_n;
    }

    SystemInstance inst;
    inst.dims = dims;
    inst.A = std::move(A);
    inst.x_sol = std::move(x_sol);
    inst.v = std::move(v);
    inst.sigma = sigma;
    inst.y = inst.A * inst.x_sol + sigma * inst.v;
    inst.seed = seed;
    return inst;
}

OverlapStats overlap_stats(const Vector& x, const Vector& x_sol) {
    if (x.size() != x_sol.size())
        throw ConfigError("overlap_stats: length mismatch");
    return OverlapStats{x_sol.dot(x), x.squaredNorm()};
}

double bit_error_fraction(const Vector& x, const Vector& x_sol) {
    if (x.size() != x_sol.size())
        throw ConfigError("bit_error_fraction: length mismatch");
    const Eigen::Index n = x.size();
    Eigen::Index errors = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const bool plus = x(i) >= 0.0;       // sign(0) = +
        const bool sol_plus = x_sol(i) >= 0.0;
        if (plus != sol_plus) ++errors;
    }
    return static_cast<double>(errors) / static_cast<double>(n);
}

Vector round_to_corner(const Vector& x, int n) {
    if (x.size() != n)
        throw ConfigError("round_to_corner: length(x) != n");
    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
    Vector out(n);
    for (int i = 0; i < n; ++i) out(i) = x(i) >= 0.0 ? inv_sqrt_n : -inv_sqrt_n;
    return out;
}

}  // namespace clup
