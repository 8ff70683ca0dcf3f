#ifndef LEAFSPACE_BASIC_HPP
#define LEAFSPACE_BASIC_HPP

#include <map>
#include <string>
#include <vector>

#include "leafspace/category.hpp"
#include "leafspace/cdr.hpp"
#include "leafspace/form.hpp"
#include "leafspace/sparse_matrix.hpp"

namespace leafspace {

struct AnsatzError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

// monomial-coefficient l-form basis labels: chart index, exponent vector,
// strictly increasing dx-tuple
struct AnsatzLabel {
    size_t chart;
    std::vector<int> exps;
    std::vector<Var> tuple;

    friend auto operator<=>(const AnsatzLabel&, const AnsatzLabel&) = default;
};

inline std::vector<std::vector<int>> monomials_up_to(int q, int max_degree) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(static_cast<size_t>(q), 0);
    std::function<void(int, int)> rec = [&](int pos, int remaining) {
        if (pos == q) {
            out.push_back(cur);
            return;
        }
        for (int e = 0; e <= remaining; ++e) {
            cur[static_cast<size_t>(pos)] = e;
            rec(pos + 1, remaining - e);
        }
        cur[static_cast<size_t>(pos)] = 0;
    };
    rec(0, max_degree);
    return out;
}

inline std::vector<std::vector<Var>> increasing_tuples(int q, int l) {
    std::vector<std::vector<Var>> out;
    std::vector<Var> cur;
    std::function<void(int)> rec = [&](int start) {
        if (static_cast<int>(cur.size()) == l) {
            out.push_back(cur);
            return;
        }
        for (int i = start; i <= q; ++i) {
            cur.push_back(chart_var(i));
            rec(i + 1);
            cur.pop_back();
        }
    };
    rec(1);
    return out;
}

inline Expr monomial_expr(const std::vector<int>& exps) {
    Expr m = Expr::constant(1);
    for (size_t i = 0; i < exps.size(); ++i)
        m = m * expr_pow(Expr::variable(chart_var(static_cast<int>(i) + 1)),
                         exps[static_cast<size_t>(i)]);
    return m;
}

// exact expansion of a polynomial form into (exponent, tuple) -> rational
inline std::map<std::pair<std::vector<int>, std::vector<Var>>, Rational> expand_form(
    const DifferentialForm& w, int q) {
    std::vector<Var> vars;
    for (int i = 1; i <= q; ++i) vars.push_back(chart_var(i));
    std::map<std::pair<std::vector<int>, std::vector<Var>>, Rational> out;
    for (const auto& [tuple, coeff] : w.components()) {
        auto poly = expand_polynomial(coeff, vars);
        if (!poly)
            throw AnsatzError("form coefficient is not polynomial in the chart variables");
        for (const auto& [exps, c] : poly->terms) {
            if (!c.is_constant())
                throw AnsatzError("polynomial expansion produced a non-constant coefficient");
            Rational& slot = out[{exps, tuple}];
            slot += c.constant_value();
            if (slot == 0) out.erase({exps, tuple});
        }
    }
    return out;
}

inline void require_polynomial_arrows(const CategoryPresentation& p) {
    std::vector<Var> vars;
    for (int i = 1; i <= p.dim(); ++i) vars.push_back(chart_var(i));
    for (const EmbeddingArrow& a : p.arrows) {
        if (a.is_identity) continue;
        for (const Expr& c : a.map.components)
            if (!expand_polynomial(c, vars))
                throw AnsatzError("arrow " + a.id +
                                  " is not polynomial; the ansatz does not apply");
    }
}

}  // namespace detail

// Basis of holonomy-invariant polynomial l-forms of coefficient degree <= D:
// the exact kernel of {pullback(h, w|dst) - w|src = 0} over the
// monomial-coefficient ansatz on each chart.
struct InvariantFormBasis {
    int form_degree = 0;
    int poly_degree = 0;
    long ansatz_dimension = 0;
    // each basis vector: one form per chart, aligned with presentation charts
    std::vector<std::vector<DifferentialForm>> basis;

    long dimension() const { return static_cast<long>(basis.size()); }
};

inline InvariantFormBasis invariant_forms(const CategoryPresentation& p, int l, int D) {
    detail::require_polynomial_arrows(p);
    int q = p.dim();
    VarContext vars{q, 0};

    std::vector<detail::AnsatzLabel> labels;
    auto monos = detail::monomials_up_to(q, D);
    auto tuples = detail::increasing_tuples(q, l);
    for (size_t ci = 0; ci < p.charts.size(); ++ci)
        for (const auto& e : monos)
            for (const auto& t : tuples) labels.push_back({ci, e, t});
    std::map<detail::AnsatzLabel, long> label_index;
    for (size_t i = 0; i < labels.size(); ++i) label_index[labels[i]] = static_cast<long>(i);

    std::map<std::string, size_t> chart_index;
    for (size_t ci = 0; ci < p.charts.size(); ++ci) chart_index[p.charts[ci].id] = ci;

    // constraint rows: for each non-identity arrow and each ansatz basis form
    // on its target, the coefficients of pullback(h, w) - (w transplanted to
    // the source) must vanish; rows are indexed by (arrow, exponent, tuple)
    // monomial slots gathered on the fly.
    std::vector<std::map<long, Rational>> rows;
    for (const EmbeddingArrow& a : p.arrows) {
        if (a.is_identity) continue;
        size_t src_ci = chart_index.at(a.src);
        size_t dst_ci = chart_index.at(a.dst);
        std::map<std::pair<std::vector<int>, std::vector<Var>>, std::map<long, Rational>> eqs;
        for (const auto& e : monos) {
            for (const auto& t : tuples) {
                long col_dst = label_index.at({dst_ci, e, t});
                DifferentialForm w(vars, l);
                w.add_term(t, detail::monomial_expr(e));
                DifferentialForm pulled = pullback(a.map, w);
                for (const auto& [slot, val] : detail::expand_form(pulled, q))
                    eqs[slot][col_dst] += val;
                long col_src = label_index.at({src_ci, e, t});
                eqs[{e, t}][col_src] -= 1;
            }
        }
        for (auto& [slot, row] : eqs) {
            std::erase_if(row, [](const auto& kv) { return kv.second == 0; });
            if (!row.empty()) rows.push_back(std::move(row));
        }
    }

    DenseRationalMatrix m(static_cast<long>(rows.size()), static_cast<long>(labels.size()));
    for (size_t r = 0; r < rows.size(); ++r)
        for (const auto& [c, v] : rows[r]) m.at(static_cast<long>(r), c) = v;

    InvariantFormBasis out;
    out.form_degree = l;
    out.poly_degree = D;
    out.ansatz_dimension = static_cast<long>(labels.size());
    for (const auto& vec : kernel_basis(std::move(m))) {
        std::vector<DifferentialForm> per_chart(p.charts.size(),
                                                DifferentialForm::zero(vars, l));
        for (size_t i = 0; i < labels.size(); ++i) {
            if (vec[i] == 0) continue;
            const auto& lab = labels[i];
            per_chart[lab.chart].add_term(
                lab.tuple, Expr::constant(vec[i]) * detail::monomial_expr(lab.exps));
        }
        out.basis.push_back(std::move(per_chart));
    }
    return out;
}

struct BasicCohomologyTable {
    int poly_degree = 0;                 // D of the degree-0 level
    std::vector<long> invariant_dims;    // dim of the level-l invariant space
    std::vector<long> betti;             // H^l_bas within the ansatz
};

// Cohomology of (invariant forms, d) inside the polynomial ansatz. The
// exterior derivative lowers coefficient degree by one, so level l uses the
// bound D - l; the reported table carries D so the truncation is explicit.
inline BasicCohomologyTable basic_cohomology(const CategoryPresentation& p, int D,
                                             int max_degree) {
    int q = p.dim();
    int top = std::min(max_degree, q);
    BasicCohomologyTable t;
    t.poly_degree = D;

    std::vector<InvariantFormBasis> levels;
    for (int l = 0; l <= top + 1 && l <= q; ++l) {
        int bound = D - l;
        if (bound < 0) {
            levels.push_back(InvariantFormBasis{l, bound, 0, {}});
            continue;
        }
        levels.push_back(invariant_forms(p, l, bound));
    }

    // rank of d on each level, computed in ambient monomial coordinates
    std::vector<long> ranks;
    for (size_t l = 0; l < levels.size(); ++l) {
        if (l + 1 >= levels.size() || levels[l].basis.empty()) {
            ranks.push_back(0);
            continue;
        }
        std::map<std::pair<size_t, std::pair<std::vector<int>, std::vector<Var>>>, long> slots;
        std::vector<std::map<long, Rational>> cols;
        for (const auto& vec : levels[l].basis) {
            std::map<long, Rational> col;
            for (size_t ci = 0; ci < vec.size(); ++ci) {
                DifferentialForm dv = exterior_d(vec[ci]);
                for (const auto& [slot, val] : detail::expand_form(dv, q)) {
                    auto key = std::make_pair(ci, slot);
                    auto [it, _] = slots.try_emplace(key, static_cast<long>(slots.size()));
                    col[it->second] += val;
                }
            }
            cols.push_back(std::move(col));
        }
        DenseRationalMatrix m(static_cast<long>(slots.size()), static_cast<long>(cols.size()));
        for (size_t c = 0; c < cols.size(); ++c)
            for (const auto& [r, v] : cols[c]) m.at(r, static_cast<long>(c)) = v;
        ranks.push_back(rank(std::move(m)));
    }

    for (int l = 0; l <= top; ++l) {
        long dim = levels[static_cast<size_t>(l)].dimension();
        t.invariant_dims.push_back(dim);
        long b = dim - ranks[static_cast<size_t>(l)] -
                 (l > 0 ? ranks[static_cast<size_t>(l - 1)] : 0);
        t.betti.push_back(b);
    }
    for (int l = top + 1; l <= max_degree; ++l) {
        t.invariant_dims.push_back(0);
        t.betti.push_back(0);
    }
    return t;
}

// Dimension of the compactly-supported coinvariant model: the ansatz direct
// sum over charts modulo the span of w - h*w. Pullbacks must stay inside the
// degree-D ansatz (maps of polynomial degree one always do).
inline long compact_basic_coinvariants(const CategoryPresentation& p, int l, int D) {
    detail::require_polynomial_arrows(p);
    int q = p.dim();
    VarContext vars{q, 0};
    auto monos = detail::monomials_up_to(q, D);
    auto tuples = detail::increasing_tuples(q, l);

    std::map<std::string, size_t> chart_index;
    for (size_t ci = 0; ci < p.charts.size(); ++ci) chart_index[p.charts[ci].id] = ci;
    std::map<detail::AnsatzLabel, long> label_index;
    {
        long idx = 0;
        for (size_t ci = 0; ci < p.charts.size(); ++ci)
            for (const auto& e : monos)
                for (const auto& t : tuples) label_index[{ci, e, t}] = idx++;
    }

    std::vector<std::map<long, Rational>> rows;
    for (const EmbeddingArrow& a : p.arrows) {
        if (a.is_identity) continue;
        size_t src_ci = chart_index.at(a.src);
        size_t dst_ci = chart_index.at(a.dst);
        for (const auto& e : monos) {
            for (const auto& t : tuples) {
                DifferentialForm w(vars, l);
                w.add_term(t, detail::monomial_expr(e));
                DifferentialForm pulled = pullback(a.map, w);
                std::map<long, Rational> row;
                row[label_index.at({dst_ci, e, t})] += 1;
                for (const auto& [slot, val] : detail::expand_form(pulled, q)) {
                    int deg = 0;
                    for (int x : slot.first) deg += x;
                    if (deg > D)
                        throw AnsatzError("pullback along " + a.id +
                                          " leaves the degree-" + std::to_string(D) +
                                          " ansatz");
                    row[label_index.at({src_ci, slot.first, slot.second})] -= val;
                }
                std::erase_if(row, [](const auto& kv) { return kv.second == 0; });
                if (!row.empty()) rows.push_back(std::move(row));
            }
        }
    }

    DenseRationalMatrix m(static_cast<long>(rows.size()), static_cast<long>(label_index.size()));
    for (size_t r = 0; r < rows.size(); ++r)
        for (const auto& [c, v] : rows[r]) m.at(static_cast<long>(r), c) = v;
    return static_cast<long>(label_index.size()) - rank(std::move(m));
}

// Exports an invariant form as the (0, l) component of a Cech-De Rham cochain
// with zero higher components (cochain-level comparison map). Invariance
// makes the horizontal differential of the result vanish.
inline CDRCochain invariant_cochain(const CategoryPresentation& p,
                                    const InvariantFormBasis& basis, size_t vec) {
    std::map<std::string, DifferentialForm> per_chart;
    for (size_t ci = 0; ci < p.charts.size(); ++ci)
        per_chart.emplace(p.charts[ci].id, basis.basis.at(vec).at(ci));
    CDRCochain c;
    c.total_degree = basis.form_degree;
    c.chart_dim = p.dim();
    c.eval_fn = [per_chart, l = basis.form_degree, q = p.dim()](const ArrowString& s,
                                                                const Chart& source) {
        VarContext vars{q, 0};
        if (!s.empty())
            return DifferentialForm::zero(vars, std::max(l - static_cast<int>(s.size()), 0));
        auto it = per_chart.find(source.id);
        return it == per_chart.end() ? DifferentialForm::zero(vars, l) : it->second;
    };
    return c;
}

}  // namespace leafspace

#endif
