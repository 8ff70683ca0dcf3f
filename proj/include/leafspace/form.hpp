#ifndef LEAFSPACE_FORM_HPP
#define LEAFSPACE_FORM_HPP

#include <map>
#include <vector>

#include "leafspace/expr.hpp"
#include "leafspace/smooth_map.hpp"

namespace leafspace {

// Differential form on (the standard simplex times) a chart domain.
// Components are indexed by strictly increasing tuples of variables; simplex
// parameters sort before chart coordinates, so dt-blocks always sit at the
// front of a tuple.
class DifferentialForm {
  public:
    DifferentialForm() = default;
    DifferentialForm(VarContext vars, int degree) : vars_(vars), degree_(degree) {}

    static DifferentialForm zero(VarContext vars, int degree) {
        return DifferentialForm(vars, degree);
    }
    static DifferentialForm function(VarContext vars, Expr f) {
        DifferentialForm w(vars, 0);
        w.add_term({}, std::move(f));
        return w;
    }

    const VarContext& vars() const { return vars_; }
    int degree() const { return degree_; }
    bool is_zero() const { return comps_.empty(); }
    const std::map<std::vector<Var>, Expr>& components() const { return comps_; }

    Expr coefficient(const std::vector<Var>& tuple) const {
        auto it = comps_.find(tuple);
        return it == comps_.end() ? Expr::constant(0) : it->second;
    }

    void add_term(std::vector<Var> tuple, Expr coeff) {
        if (static_cast<int>(tuple.size()) != degree_)
            throw std::invalid_argument("form term of wrong degree");
        for (size_t i = 0; i + 1 < tuple.size(); ++i)
            if (!(tuple[i] < tuple[i + 1]))
                throw std::invalid_argument("form index tuple not strictly increasing");
        if (coeff.is_zero()) return;
        auto it = comps_.find(tuple);
        if (it == comps_.end()) {
            comps_.emplace(std::move(tuple), std::move(coeff));
        } else {
            it->second = it->second + coeff;
            if (it->second.is_zero()) comps_.erase(it);
        }
    }

  private:
    VarContext vars_{0, 0};
    int degree_ = 0;
    std::map<std::vector<Var>, Expr> comps_;
};

inline DifferentialForm operator+(const DifferentialForm& a, const DifferentialForm& b) {
    DifferentialForm out = a;
    for (const auto& [t, c] : b.components()) out.add_term(t, c);
    return out;
}

inline DifferentialForm operator-(const DifferentialForm& a, const DifferentialForm& b) {
    DifferentialForm out = a;
    for (const auto& [t, c] : b.components()) out.add_term(t, -c);
    return out;
}

inline DifferentialForm operator*(const Expr& f, const DifferentialForm& w) {
    DifferentialForm out(w.vars(), w.degree());
    if (f.is_zero()) return out;
    for (const auto& [t, c] : w.components()) out.add_term(t, f * c);
    return out;
}

namespace detail {

// merges two strictly increasing tuples; returns 0 on collision, else the
// permutation sign of the concatenation relative to sorted order
inline int merge_tuples(const std::vector<Var>& a, const std::vector<Var>& b,
                        std::vector<Var>& out) {
    out.clear();
    out.reserve(a.size() + b.size());
    size_t i = 0, j = 0;
    long inversions = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) return 0;
        if (a[i] < b[j]) {
            out.push_back(a[i++]);
        } else {
            // b[j] jumps over the remaining a-elements
            inversions += static_cast<long>(a.size() - i);
            out.push_back(b[j++]);
        }
    }
    while (i < a.size()) out.push_back(a[i++]);
    while (j < b.size()) out.push_back(b[j++]);
    return inversions % 2 == 0 ? 1 : -1;
}

}  // namespace detail

inline DifferentialForm wedge(const DifferentialForm& a, const DifferentialForm& b) {
    if (a.vars().chart_dim != b.vars().chart_dim ||
        a.vars().simplex_dim != b.vars().simplex_dim)
        throw std::invalid_argument("wedge: ambient variable mismatch");
    DifferentialForm out(a.vars(), a.degree() + b.degree());
    std::vector<Var> merged;
    for (const auto& [ta, ca] : a.components()) {
        for (const auto& [tb, cb] : b.components()) {
            int sign = detail::merge_tuples(ta, tb, merged);
            if (sign == 0) continue;
            Expr c = ca * cb;
            out.add_term(merged, sign > 0 ? c : -c);
        }
    }
    return out;
}

inline DifferentialForm exterior_d(const DifferentialForm& w) {
    DifferentialForm out(w.vars(), w.degree() + 1);
    std::vector<Var> all_vars;
    for (int i = 1; i <= w.vars().simplex_dim; ++i) all_vars.push_back(simplex_var(i));
    for (int i = 1; i <= w.vars().chart_dim; ++i) all_vars.push_back(chart_var(i));
    for (const auto& [t, c] : w.components()) {
        for (Var v : all_vars) {
            if (std::find(t.begin(), t.end(), v) != t.end()) continue;
            Expr dc = differentiate(c, v);
            if (dc.is_zero()) continue;
            // insert v into the tuple, tracking the sign of the transposition
            std::vector<Var> nt;
            nt.reserve(t.size() + 1);
            int pos = 0;
            while (pos < static_cast<int>(t.size()) && t[static_cast<size_t>(pos)] < v) ++pos;
            nt.insert(nt.end(), t.begin(), t.begin() + pos);
            nt.push_back(v);
            nt.insert(nt.end(), t.begin() + pos, t.end());
            out.add_term(std::move(nt), pos % 2 == 0 ? dc : -dc);
        }
    }
    return out;
}

// Pullback along a smooth map. Only forms living purely on a chart (no
// simplex parameters) are pulled back; the result lives on the map's domain.
inline DifferentialForm pullback(const SmoothMap& h, const DifferentialForm& w) {
    if (w.vars().simplex_dim != 0)
        throw std::invalid_argument("pullback: form carries simplex parameters");
    if (w.vars().chart_dim != h.out_dim)
        throw std::invalid_argument("pullback: dimension mismatch");
    VarContext dst{h.in_dim, 0};
    std::map<Var, Expr> bind;
    for (int i = 1; i <= h.out_dim; ++i)
        bind.emplace(chart_var(i), h.components[static_cast<size_t>(i - 1)]);

    // differentials of the components as 1-forms on the domain
    ExprMatrix jac = jacobian(h);
    std::vector<DifferentialForm> dh;
    dh.reserve(static_cast<size_t>(h.out_dim));
    for (int i = 0; i < h.out_dim; ++i) {
        DifferentialForm df(dst, 1);
        for (int j = 0; j < h.in_dim; ++j)
            df.add_term({chart_var(j + 1)}, jac[static_cast<size_t>(i)][static_cast<size_t>(j)]);
        dh.push_back(std::move(df));
    }

    DifferentialForm out(dst, w.degree());
    for (const auto& [t, c] : w.components()) {
        DifferentialForm term = DifferentialForm::function(dst, substitute(c, bind));
        for (Var v : t) term = wedge(term, dh[static_cast<size_t>(v.index - 1)]);
        out = out + term;
    }
    return out;
}

// Reinterprets a chart form as a form on simplex x chart.
inline DifferentialForm promote(const DifferentialForm& w, int simplex_dim) {
    DifferentialForm out(VarContext{w.vars().chart_dim, simplex_dim}, w.degree());
    for (const auto& [t, c] : w.components()) out.add_term(t, c);
    return out;
}

// Integration along the simplex fiber of a form on simplex x chart: keeps the
// components carrying the full dt-block dt1^...^dtk (which sits in front of
// each tuple), integrates their coefficients over the simplex, and drops the
// dt's. Polynomial t-dependence is integrated exactly; anything else becomes
// a lazy definite-integral node evaluated at the given tolerance.
inline DifferentialForm fiber_integrate(const DifferentialForm& w, double tol) {
    int k = w.vars().simplex_dim;
    if (k == 0) throw std::invalid_argument("fiber_integrate: no simplex parameters");
    std::vector<Var> tvars;
    for (int i = 1; i <= k; ++i) tvars.push_back(simplex_var(i));

    DifferentialForm out(VarContext{w.vars().chart_dim, 0}, w.degree() - k);
    for (const auto& [t, c] : w.components()) {
        if (static_cast<int>(t.size()) < k) continue;
        bool full_block = true;
        for (int i = 0; i < k; ++i)
            if (t[static_cast<size_t>(i)] != tvars[static_cast<size_t>(i)]) full_block = false;
        if (!full_block) continue;
        std::vector<Var> rest(t.begin() + k, t.end());

        Expr integrated;
        if (auto poly = expand_polynomial(c, tvars)) {
            integrated = Expr::constant(0);
            for (const auto& [exps, coeff] : poly->terms)
                integrated = integrated + Expr::constant(simplex_moment(exps)) * coeff;
        } else {
            integrated = expr_integral(c, tvars, Region::simplex(), tol);
        }
        out.add_term(std::move(rest), integrated);
    }
    return out;
}

// Square matrix of differential forms sharing degree and ambient variables.
struct MatrixForm {
    int size = 0;
    std::vector<std::vector<DifferentialForm>> entries;

    static MatrixForm zero(int n, VarContext vars, int degree) {
        MatrixForm m;
        m.size = n;
        m.entries.assign(static_cast<size_t>(n),
                         std::vector<DifferentialForm>(static_cast<size_t>(n),
                                                       DifferentialForm::zero(vars, degree)));
        return m;
    }
    const DifferentialForm& at(int i, int j) const {
        return entries[static_cast<size_t>(i)][static_cast<size_t>(j)];
    }
    DifferentialForm& at(int i, int j) {
        return entries[static_cast<size_t>(i)][static_cast<size_t>(j)];
    }
    VarContext vars() const { return entries.at(0).at(0).vars(); }
    int degree() const { return entries.at(0).at(0).degree(); }
};

inline MatrixForm operator+(const MatrixForm& a, const MatrixForm& b) {
    MatrixForm out = a;
    for (int i = 0; i < a.size; ++i)
        for (int j = 0; j < a.size; ++j) out.at(i, j) = a.at(i, j) + b.at(i, j);
    return out;
}

inline MatrixForm operator*(const Expr& f, const MatrixForm& a) {
    MatrixForm out = a;
    for (auto& row : out.entries)
        for (auto& e : row) e = f * e;
    return out;
}

inline MatrixForm matrix_wedge(const MatrixForm& a, const MatrixForm& b) {
    MatrixForm out = MatrixForm::zero(a.size, a.vars(), a.degree() + b.degree());
    for (int i = 0; i < a.size; ++i)
        for (int j = 0; j < a.size; ++j)
            for (int l = 0; l < a.size; ++l)
                out.at(i, j) = out.at(i, j) + wedge(a.at(i, l), b.at(l, j));
    return out;
}

inline DifferentialForm matrix_trace(const MatrixForm& a) {
    DifferentialForm out = DifferentialForm::zero(a.vars(), a.degree());
    for (int i = 0; i < a.size; ++i) out = out + a.at(i, i);
    return out;
}

inline MatrixForm matrix_exterior_d(const MatrixForm& a) {
    MatrixForm out = MatrixForm::zero(a.size, a.vars(), a.degree() + 1);
    for (int i = 0; i < a.size; ++i)
        for (int j = 0; j < a.size; ++j) out.at(i, j) = exterior_d(a.at(i, j));
    return out;
}

inline MatrixForm matrix_pullback(const SmoothMap& h, const MatrixForm& a) {
    MatrixForm out;
    out.size = a.size;
    out.entries.resize(static_cast<size_t>(a.size));
    for (int i = 0; i < a.size; ++i)
        for (int j = 0; j < a.size; ++j)
            out.entries[static_cast<size_t>(i)].push_back(pullback(h, a.at(i, j)));
    return out;
}

// P * A * Q with scalar (expression) matrices P, Q
inline MatrixForm matrix_sandwich(const ExprMatrix& p, const MatrixForm& a, const ExprMatrix& q) {
    MatrixForm out = MatrixForm::zero(a.size, a.vars(), a.degree());
    for (int i = 0; i < a.size; ++i)
        for (int j = 0; j < a.size; ++j) {
            DifferentialForm acc = DifferentialForm::zero(a.vars(), a.degree());
            for (int k = 0; k < a.size; ++k)
                for (int l = 0; l < a.size; ++l)
                    acc = acc + (p[static_cast<size_t>(i)][static_cast<size_t>(k)] *
                                 (q[static_cast<size_t>(l)][static_cast<size_t>(j)] * a.at(k, l)));
            out.at(i, j) = acc;
        }
    return out;
}

inline MatrixForm matrix_promote(const MatrixForm& a, int simplex_dim) {
    MatrixForm out;
    out.size = a.size;
    out.entries.resize(static_cast<size_t>(a.size));
    for (int i = 0; i < a.size; ++i)
        for (int j = 0; j < a.size; ++j)
            out.entries[static_cast<size_t>(i)].push_back(promote(a.at(i, j), simplex_dim));
    return out;
}

// max |coefficient| of the form evaluated at a point
inline double max_abs_coefficient(const DifferentialForm& w, const EvalPoint& p) {
    double m = 0.0;
    for (const auto& [t, c] : w.components()) m = std::max(m, std::abs(evaluate(c, p)));
    return m;
}

}  // namespace leafspace

#endif
