#ifndef LEAFSPACE_CDR_HPP
#define LEAFSPACE_CDR_HPP

#include <functional>
#include <string>
#include <vector>

#include "leafspace/category.hpp"
#include "leafspace/form.hpp"

namespace leafspace {

// Arrow composition oracle: the table for presentations, symbolic map
// composition for free one-object models.
struct CochainContext {
    int q = 1;
    std::function<EmbeddingArrow(const EmbeddingArrow&, const EmbeddingArrow&)> compose;

    static CochainContext for_presentation(const CategoryPresentation& p) {
        CochainContext ctx;
        ctx.q = p.dim();
        ctx.compose = [&p](const EmbeddingArrow& g, const EmbeddingArrow& f) {
            const EmbeddingArrow* h = p.compose(g, f);
            if (!h)
                throw std::logic_error("composition " + g.id + "." + f.id + " not in table");
            return *h;
        };
        return ctx;
    }

    static CochainContext free_composition(int q) {
        CochainContext ctx;
        ctx.q = q;
        ctx.compose = [](const EmbeddingArrow& g, const EmbeddingArrow& f) {
            EmbeddingArrow h;
            h.id = g.id + "." + f.id;
            h.src = f.src;
            h.dst = g.dst;
            h.map = leafspace::compose(g.map, f.map);
            h.is_identity = false;
            return h;
        };
        return ctx;
    }
};

using ArrowString = std::vector<const EmbeddingArrow*>;

// Element of the Cech-De Rham total complex of a fixed total degree n: the
// component on a string of k arrows is a form of degree n-k on the source
// chart (zero outside the supported bidegrees). Components are produced
// lazily, one string at a time. Normalized: strings containing an identity
// arrow evaluate to zero.
struct CDRCochain {
    int total_degree = 0;
    int chart_dim = 1;
    std::function<DifferentialForm(const ArrowString&, const Chart&)> eval_fn;

    DifferentialForm operator()(const ArrowString& s, const Chart& source) const {
        int form_degree = total_degree - static_cast<int>(s.size());
        if (form_degree < 0 || form_degree > chart_dim)
            return DifferentialForm::zero(VarContext{chart_dim, 0}, std::max(form_degree, 0));
        for (const EmbeddingArrow* a : s)
            if (a->is_identity)
                return DifferentialForm::zero(VarContext{chart_dim, 0}, form_degree);
        return eval_fn(s, source);
    }

    static CDRCochain zero(int total_degree, int q) {
        CDRCochain c;
        c.total_degree = total_degree;
        c.chart_dim = q;
        c.eval_fn = [total_degree, q](const ArrowString& s, const Chart&) {
            return DifferentialForm::zero(VarContext{q, 0},
                                          std::max(total_degree - static_cast<int>(s.size()), 0));
        };
        return c;
    }
};

// composite map of a string prefix h_j ... h_1 as a single arrow
inline EmbeddingArrow string_composite(const CochainContext& ctx, const ArrowString& s,
                                       size_t length) {
    if (length == 0) throw std::invalid_argument("string_composite: empty prefix");
    EmbeddingArrow acc = *s[0];
    for (size_t i = 1; i < length; ++i) acc = ctx.compose(*s[i], acc);
    return acc;
}

// Product of the bigraded algebra:
// (a.b)(h_1..h_m) = sum_k (-1)^{k(m-k)} a(h_1..h_k) ^ (h_1* ... h_k*) b(h_{k+1}..h_m)
inline CDRCochain cochain_product(const CDRCochain& a, const CDRCochain& b,
                                  const CochainContext& ctx) {
    CDRCochain out;
    out.total_degree = a.total_degree + b.total_degree;
    out.chart_dim = a.chart_dim;
    out.eval_fn = [a, b, ctx, out](const ArrowString& s, const Chart& source) {
        int m = static_cast<int>(s.size());
        DifferentialForm acc =
            DifferentialForm::zero(VarContext{out.chart_dim, 0}, out.total_degree - m);
        for (int k = 0; k <= m; ++k) {
            ArrowString head(s.begin(), s.begin() + k);
            ArrowString tail(s.begin() + k, s.end());
            // the tail component lives on the chart reached after k arrows
            DifferentialForm left = a(head, source);
            if (left.is_zero()) continue;
            const Chart* mid_chart = &source;
            Chart tmp;
            if (k > 0) {
                tmp.id = s[static_cast<size_t>(k - 1)]->dst;
                tmp.dim = out.chart_dim;
                tmp.box = s[static_cast<size_t>(k - 1)]->map.codomain;
                mid_chart = &tmp;
            }
            DifferentialForm right = b(tail, *mid_chart);
            if (right.is_zero()) continue;
            if (k > 0) {
                EmbeddingArrow phi = string_composite(ctx, s, static_cast<size_t>(k));
                right = pullback(phi.map, right);
            }
            DifferentialForm term = wedge(left, right);
            int sign = (k * (m - k)) % 2 == 0 ? 1 : -1;
            acc = sign > 0 ? acc + term : acc - term;
        }
        return acc;
    };
    return out;
}

// Total differential D = delta + (-1)^k d on the normalized complex. On a
// string of m arrows: (Dc)(h_1..h_m) = (delta c)(h_1..h_m) + (-1)^m d(c(h_1..h_m)).
inline CDRCochain total_coboundary(const CDRCochain& c, const CochainContext& ctx) {
    CDRCochain out;
    out.total_degree = c.total_degree + 1;
    out.chart_dim = c.chart_dim;
    out.eval_fn = [c, ctx, out](const ArrowString& s, const Chart& source) {
        int m = static_cast<int>(s.size());
        DifferentialForm acc =
            DifferentialForm::zero(VarContext{out.chart_dim, 0}, out.total_degree - m);
        if (m >= 1) {
            // delta_0: drop h_1, pull the value back along it
            {
                Chart next;
                next.id = s[0]->dst;
                next.dim = out.chart_dim;
                next.box = s[0]->map.codomain;
                ArrowString tail(s.begin() + 1, s.end());
                DifferentialForm v = c(tail, next);
                if (!v.is_zero()) acc = acc + pullback(s[0]->map, v);
            }
            // inner faces
            for (int i = 1; i < m; ++i) {
                EmbeddingArrow comp = ctx.compose(*s[static_cast<size_t>(i)], *s[static_cast<size_t>(i - 1)]);
                ArrowString face;
                face.reserve(static_cast<size_t>(m - 1));
                for (int j = 0; j < m; ++j) {
                    if (j == i - 1) {
                        face.push_back(&comp);
                    } else if (j != i) {
                        face.push_back(s[static_cast<size_t>(j)]);
                    }
                }
                DifferentialForm v = c(face, source);
                if (!v.is_zero()) acc = i % 2 == 0 ? acc + v : acc - v;
            }
            // last face: forget h_m
            {
                ArrowString head(s.begin(), s.end() - 1);
                DifferentialForm v = c(head, source);
                if (!v.is_zero()) acc = m % 2 == 0 ? acc + v : acc - v;
            }
        }
        // vertical part
        DifferentialForm own = c(s, source);
        if (!own.is_zero()) {
            DifferentialForm d_own = exterior_d(own);
            acc = m % 2 == 0 ? acc + d_own : acc - d_own;
        }
        return acc;
    };
    return out;
}

inline CDRCochain cochain_sum(const CDRCochain& a, const CDRCochain& b, int sign_b = 1) {
    if (a.total_degree != b.total_degree)
        throw std::invalid_argument("cochain_sum: mixed total degrees");
    CDRCochain out;
    out.total_degree = a.total_degree;
    out.chart_dim = a.chart_dim;
    out.eval_fn = [a, b, sign_b](const ArrowString& s, const Chart& source) {
        DifferentialForm va = a(s, source);
        DifferentialForm vb = b(s, source);
        return sign_b > 0 ? va + vb : va - vb;
    };
    return out;
}

inline CDRCochain cochain_scale(const CDRCochain& a, const Rational& factor) {
    CDRCochain out = a;
    Expr f = Expr::constant(factor);
    const CDRCochain base = a;
    out.eval_fn = [base, f](const ArrowString& s, const Chart& source) {
        return f * base(s, source);
    };
    return out;
}

}  // namespace leafspace

#endif
