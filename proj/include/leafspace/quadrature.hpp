#ifndef LEAFSPACE_QUADRATURE_HPP
#define LEAFSPACE_QUADRATURE_HPP

#include <cmath>
#include <cstdlib>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace leafspace {

struct QuadratureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct QuadratureOptions {
    double tol = 1e-8;
    long budget = 10'000'000;  // max integrand evaluations
};

inline long quadrature_budget_default() {
    if (const char* env = std::getenv("LEAFSPACE_QUAD_BUDGET")) {
        long v = std::atol(env);
        if (v > 0) return v;
    }
    return 10'000'000;
}

namespace detail {

// 15-point Kronrod rule with embedded 7-point Gauss rule (QUADPACK dqk15).
inline constexpr double kGK15Nodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
inline constexpr double kGK15WeightsK[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr double kGK15WeightsG[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct GKResult {
    double kronrod;
    double error;
};

template <typename F>
GKResult gk15(F&& f, double a, double b, long& budget) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    budget -= 15;
    if (budget < 0) throw QuadratureError("quadrature node budget exhausted");
    double fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(c - h * kGK15Nodes[i]);
        fv[14 - i] = f(c + h * kGK15Nodes[i]);
    }
    fv[7] = f(c);
    double resk = 0.0, resg = 0.0;
    for (int i = 0; i < 8; ++i) {
        resk += kGK15WeightsK[i] * (i == 7 ? fv[7] : fv[i] + fv[14 - i]);
    }
    // Gauss nodes are the odd-indexed Kronrod nodes plus the midpoint.
    resg += kGK15WeightsG[3] * fv[7];
    for (int i = 0; i < 3; ++i) {
        resg += kGK15WeightsG[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
    }
    resk *= h;
    resg *= h;
    if (!std::isfinite(resk)) throw QuadratureError("non-finite integrand sample");
    return {resk, std::abs(resk - resg)};
}

// Adaptive bisection, deterministic for a fixed tolerance.
template <typename F>
double adaptive1d(F&& f, double a, double b, double tol, long& budget, int depth = 0) {
    GKResult r = gk15(f, a, b, budget);
    if (r.error <= tol || depth >= 48) {
        if (depth >= 48 && r.error > tol * 16)
            throw QuadratureError("quadrature failed to converge");
        return r.kronrod;
    }
    double m = 0.5 * (a + b);
    return adaptive1d(f, a, m, 0.5 * tol, budget, depth + 1) +
           adaptive1d(f, m, b, 0.5 * tol, budget, depth + 1);
}

}  // namespace detail

// Integrates f over the axis-aligned box given by bounds, iterated dimension
// by dimension. Upper bounds may depend on the outer coordinates (simplex
// regions); the callback receives the partially-filled coordinate vector.
inline double integrate_iterated(
    const std::function<double(std::span<const double>)>& f, int dim,
    const std::function<double(int, std::span<const double>)>& lower,
    const std::function<double(int, std::span<const double>)>& upper,
    const QuadratureOptions& opts) {
    if (dim == 0) {
        std::vector<double> empty;
        return f(empty);
    }
    long budget = opts.budget;
    std::vector<double> coords(static_cast<size_t>(dim), 0.0);

    std::function<double(int, double)> level = [&](int level_idx, double tol) -> double {
        std::span<const double> outer(coords.data(), static_cast<size_t>(level_idx));
        double lo = lower(level_idx, outer);
        double hi = upper(level_idx, outer);
        if (lo == hi) return 0.0;
        auto g = [&](double x) -> double {
            coords[static_cast<size_t>(level_idx)] = x;
            if (level_idx + 1 == dim) {
                double v = f(std::span<const double>(coords.data(), coords.size()));
                if (!std::isfinite(v)) throw QuadratureError("non-finite integrand sample");
                return v;
            }
            return level(level_idx + 1, tol * 0.25);
        };
        double sign = 1.0;
        if (hi < lo) {
            std::swap(lo, hi);
            sign = -1.0;
        }
        return sign * detail::adaptive1d(g, lo, hi, tol, budget);
    };
    return level(0, opts.tol);
}

}  // namespace leafspace

#endif
