#include "clup/rdt_theory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "clup/errors.hpp"

namespace clup {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// Initial guess for erfinv via the rational approximation of the normal
// quantile (Acklam), using erfinv(p) = probit((p+1)/2) / sqrt(2).
double erfinv_guess(double p) {
    static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                -2.759285104469687e+02, 1.383577518672690e+02,
                                -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                -1.556989798598866e+02, 6.680131188771972e+01,
                                -1.328068155288572e+01};
    static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                -2.400758277161838e+00, -2.549732539343734e+00,
                                4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                2.445134137142996e+00, 3.754408661907416e+00};
    const double u = 0.5 * (p + 1.0);
    const double p_low = 0.02425;
    double x;
    if (u < p_low) {
        double q = std::sqrt(-2.0 * std::log(u));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (u <= 1.0 - p_low) {
        double q = u - 0.5;
        double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        double q = std::sqrt(-2.0 * std::log(1.0 - u));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    return x / std::sqrt(2.0);
}

double check_domain(double alpha, double sigma, double c1) {
    if (!(std::abs(c1) < 1.0)) {
        throw DomainError("c1 must lie in (-1, 1)");
    }
    if (!(alpha > 0.0)) {
        throw DomainError("alpha must be positive");
    }
    if (!(sigma >= 0.0)) {
        throw DomainError("sigma must be nonnegative");
    }
    const double q = 2.0 - 2.0 * c1 + sigma * sigma;
    if (!(q > 0.0)) {
        throw DomainError("2 - 2*c1 + sigma^2 must be positive");
    }
    return q;
}

}  // namespace

double erfinv(double p) {
    if (!(std::abs(p) < 1.0)) {
        throw DomainError("erfinv argument must lie in (-1, 1)");
    }
    if (p == 0.0) {
        return 0.0;
    }
    if (p < 0.0) {
        return -erfinv(-p);
    }
    double x = erfinv_guess(p);
    const double two_over_sqrt_pi = 2.0 / std::sqrt(kPi);
    for (int it = 0; it < 60; ++it) {
        // Newton on f(x) = erf(x) - p; use erfc near the tail for accuracy.
        const double f = (p > 0.5) ? ((1.0 - p) - std::erfc(x)) : (std::erf(x) - p);
        const double df = two_over_sqrt_pi * std::exp(-x * x);
        if (df == 0.0) {
            break;
        }
        const double dx = f / df;
        x -= dx;
        if (std::abs(dx) <= 1e-16 * std::max(1.0, std::abs(x))) {
            break;
        }
    }
    return x;
}

double xi_ml(double alpha, double sigma, double c1) {
    const double q = check_domain(alpha, sigma, c1);
    const double e = erfinv(-c1);
    return std::sqrt(alpha) * std::sqrt(q) - std::sqrt(2.0 / kPi) * std::exp(-e * e);
}

double xi_ml_d1(double alpha, double sigma, double c1) {
    const double q = check_domain(alpha, sigma, c1);
    return -std::sqrt(alpha) / std::sqrt(q) - std::sqrt(2.0) * erfinv(-c1);
}

double xi_ml_d2(double alpha, double sigma, double c1) {
    const double q = check_domain(alpha, sigma, c1);
    const double e = erfinv(-c1);
    return -std::sqrt(alpha) / (q * std::sqrt(q)) +
           std::sqrt(kPi / 2.0) * std::exp(e * e);
}

std::vector<TheoryPoint> find_stationary_points(double alpha, double sigma,
                                                double c1_lo, double c1_hi,
                                                int grid_n) {
    if (!(-1.0 < c1_lo && c1_lo < c1_hi && c1_hi < 1.0)) {
        throw DomainError("require -1 < c1_lo < c1_hi < 1");
    }
    if (grid_n < 100) {
        throw ConfigError("grid_n must be >= 100");
    }
    std::vector<TheoryPoint> roots;
    const double step = (c1_hi - c1_lo) / grid_n;
    double c_prev = c1_lo;
    double d_prev = xi_ml_d1(alpha, sigma, c_prev);
    for (int i = 1; i <= grid_n; ++i) {
        const double c_cur = (i == grid_n) ? c1_hi : c1_lo + i * step;
        const double d_cur = xi_ml_d1(alpha, sigma, c_cur);
        const bool bracket = (d_prev == 0.0) || (d_prev < 0.0) != (d_cur < 0.0);
        if (bracket) {
            double lo = c_prev, hi = c_cur;
            double dlo = d_prev;
            double root = 0.5 * (lo + hi);
            for (int it = 0; it < 200; ++it) {
                root = 0.5 * (lo + hi);
                const double dm = xi_ml_d1(alpha, sigma, root);
                if (std::abs(dm) <= 1e-9 || (hi - lo) <= 1e-12) {
                    break;
                }
                if ((dlo < 0.0) != (dm < 0.0)) {
                    hi = root;
                } else {
                    lo = root;
                    dlo = dm;
                }
            }
            const bool dup = !roots.empty() && std::abs(roots.back().c1 - root) <= 1e-8;
            if (!dup) {
                TheoryPoint pt;
                pt.alpha = alpha;
                pt.sigma = sigma;
                pt.c1 = root;
                pt.xi = xi_ml(alpha, sigma, root);
                pt.d1 = xi_ml_d1(alpha, sigma, root);
                pt.d2 = xi_ml_d2(alpha, sigma, root);
                pt.kind = (pt.d2 > 0.0) ? PointKind::local_min : PointKind::local_max;
                roots.push_back(pt);
            }
        }
        c_prev = c_cur;
        d_prev = d_cur;
    }
    return roots;
}

MinPair global_and_local_min(double alpha, double sigma) {
    const auto pts = find_stationary_points(alpha, sigma);
    const TheoryPoint* best_xi = nullptr;
    const TheoryPoint* best_c1 = nullptr;
    for (const auto& p : pts) {
        if (p.kind != PointKind::local_min) {
            continue;
        }
        if (best_xi == nullptr || p.xi < best_xi->xi) {
            best_xi = &p;
        }
        if (best_c1 == nullptr || p.c1 > best_c1->c1) {
            best_c1 = &p;
        }
    }
    if (best_xi == nullptr) {
        throw ConvergenceError("no stationary local minimum of xi_ml found", 0.0);
    }
    return MinPair{*best_xi, *best_c1};
}

namespace {

bool global_on_high_branch(double alpha, double sigma) {
    const MinPair mp = global_and_local_min(alpha, sigma);
    return std::abs(mp.global.c1 - mp.high_branch.c1) <= 1e-7;
}

}  // namespace

double find_glitch_snr(double alpha, double snr_lo_db, double snr_hi_db,
                       double tol_db) {
    if (!(snr_lo_db < snr_hi_db) || !(tol_db > 0.0)) {
        throw ConfigError("require snr_lo_db < snr_hi_db and tol_db > 0");
    }
    auto sigma_of = [](double snr_db) { return std::pow(10.0, -snr_db / 20.0); };
    bool lo_high = global_on_high_branch(alpha, sigma_of(snr_lo_db));
    const bool hi_high = global_on_high_branch(alpha, sigma_of(snr_hi_db));
    if (lo_high == hi_high) {
        throw ConvergenceError(
            "global minimizer branch does not change over the SNR bracket", 0.0);
    }
    double lo = snr_lo_db, hi = snr_hi_db;
    while (hi - lo > tol_db) {
        const double mid = 0.5 * (lo + hi);
        if (global_on_high_branch(alpha, sigma_of(mid)) == lo_high) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

std::vector<CurvePoint> ml_curve(double alpha,
                                 const std::vector<double>& snr_grid_db,
                                 CurveBranch mode) {
    if (snr_grid_db.empty()) {
        throw ConfigError("snr grid must be nonempty");
    }
    std::vector<CurvePoint> out;
    out.reserve(snr_grid_db.size());
    for (double snr_db : snr_grid_db) {
        try {
            const double sigma = std::pow(10.0, -snr_db / 20.0);
            const MinPair mp = global_and_local_min(alpha, sigma);
            const TheoryPoint& p =
                (mode == CurveBranch::global) ? mp.global : mp.high_branch;
            out.push_back(CurvePoint{snr_db, p.c1, p.xi, mode});
        } catch (const std::exception& e) {
            throw ConvergenceError("ml_curve failed at snr_db=" +
                                       std::to_string(snr_db) + ": " + e.what(),
                                   0.0);
        }
    }
    return out;
}

std::string to_string(PointKind kind) {
    switch (kind) {
        case PointKind::local_min: return "local_min";
        case PointKind::local_max: return "local_max";
        case PointKind::boundary: return "boundary";
        case PointKind::global_min_marker: return "global_min_marker";
    }
    return "unknown";
}

std::string to_string(CurveBranch branch) {
    return branch == CurveBranch::global ? "global" : "local_high_branch";
}

}  // namespace clup
