#ifndef LEAFSPACE_SMOOTH_MAP_HPP
#define LEAFSPACE_SMOOTH_MAP_HPP

#include <map>
#include <string>
#include <vector>

#include "leafspace/expr.hpp"
#include "leafspace/rational.hpp"

namespace leafspace {

struct Interval {
    Rational lo{0}, hi{0};
    double lo_d() const { return to_double(lo); }
    double hi_d() const { return to_double(hi); }
    double width() const { return hi_d() - lo_d(); }
};

using Box = std::vector<Interval>;

inline std::vector<std::pair<double, double>> box_bounds(const Box& b) {
    std::vector<std::pair<double, double>> out;
    out.reserve(b.size());
    for (const Interval& iv : b) out.push_back({iv.lo_d(), iv.hi_d()});
    return out;
}

inline bool box_contains(const Box& b, std::span<const double> p, double tol = 1e-7) {
    for (size_t i = 0; i < b.size(); ++i) {
        double pad = tol * std::max(1.0, std::abs(b[i].width()));
        if (p[i] < b[i].lo_d() - pad || p[i] > b[i].hi_d() + pad) return false;
    }
    return true;
}

// Square or rectangular smooth map between chart domains. Components are
// expressions in the source chart coordinates x1..x{in_dim}.
struct SmoothMap {
    int in_dim = 0;
    int out_dim = 0;
    std::vector<Expr> components;
    Box domain;
    Box codomain;

    static SmoothMap identity(int q, Box box) {
        SmoothMap m;
        m.in_dim = m.out_dim = q;
        for (int i = 1; i <= q; ++i) m.components.push_back(Expr::variable(chart_var(i)));
        m.domain = box;
        m.codomain = std::move(box);
        return m;
    }
};

// g after f
inline SmoothMap compose(const SmoothMap& g, const SmoothMap& f) {
    if (f.out_dim != g.in_dim) throw std::invalid_argument("compose: dimension mismatch");
    std::map<Var, Expr> bind;
    for (int i = 1; i <= f.out_dim; ++i) bind.emplace(chart_var(i), f.components[static_cast<size_t>(i - 1)]);
    SmoothMap out;
    out.in_dim = f.in_dim;
    out.out_dim = g.out_dim;
    out.domain = f.domain;
    out.codomain = g.codomain;
    for (const Expr& c : g.components) out.components.push_back(substitute(c, bind));
    return out;
}

using ExprMatrix = std::vector<std::vector<Expr>>;

inline ExprMatrix jacobian(const SmoothMap& m) {
    ExprMatrix j(static_cast<size_t>(m.out_dim), std::vector<Expr>(static_cast<size_t>(m.in_dim)));
    for (int i = 0; i < m.out_dim; ++i)
        for (int k = 0; k < m.in_dim; ++k)
            j[static_cast<size_t>(i)][static_cast<size_t>(k)] =
                differentiate(m.components[static_cast<size_t>(i)], chart_var(k + 1));
    return j;
}

inline Expr matrix_det(const ExprMatrix& m) {
    size_t n = m.size();
    if (n == 0) return Expr::constant(1);
    if (n == 1) return m[0][0];
    if (n == 2) return m[0][0] * m[1][1] - m[0][1] * m[1][0];
    // cofactor expansion along the first row; fine for n <= 4
    Expr det = Expr::constant(0);
    for (size_t j = 0; j < n; ++j) {
        ExprMatrix minor(n - 1, std::vector<Expr>(n - 1));
        for (size_t r = 1; r < n; ++r) {
            size_t cc = 0;
            for (size_t c = 0; c < n; ++c) {
                if (c == j) continue;
                minor[r - 1][cc++] = m[r][c];
            }
        }
        Expr term = m[0][j] * matrix_det(minor);
        det = (j % 2 == 0) ? det + term : det - term;
    }
    return det;
}

// adjugate(m) / det(m); entries stay exact rational functions
inline ExprMatrix matrix_inverse(const ExprMatrix& m, const Expr& det) {
    size_t n = m.size();
    if (det.is_zero()) throw EvalError("matrix inverse: symbolically zero determinant");
    ExprMatrix inv(n, std::vector<Expr>(n));
    if (n == 1) {
        inv[0][0] = Expr::constant(1) / det;
        return inv;
    }
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) {
            ExprMatrix minor(n - 1, std::vector<Expr>(n - 1));
            size_t rr = 0;
            for (size_t r = 0; r < n; ++r) {
                if (r == i) continue;
                size_t cc = 0;
                for (size_t c = 0; c < n; ++c) {
                    if (c == j) continue;
                    minor[rr][cc++] = m[r][c];
                }
                ++rr;
            }
            Expr cof = matrix_det(minor);
            if ((i + j) % 2 == 1) cof = -cof;
            inv[j][i] = cof / det;  // adjugate transposes
        }
    }
    return inv;
}

inline Expr jacobian_det(const SmoothMap& m) {
    if (m.in_dim != m.out_dim) throw std::invalid_argument("jacobian_det: map not square");
    return matrix_det(jacobian(m));
}

inline std::vector<double> apply_map(const SmoothMap& m, std::span<const double> x) {
    EvalPoint p;
    p.chart.assign(x.begin(), x.end());
    std::vector<double> out;
    out.reserve(static_cast<size_t>(m.out_dim));
    for (const Expr& c : m.components) out.push_back(evaluate(c, p));
    return out;
}

}  // namespace leafspace

#endif
