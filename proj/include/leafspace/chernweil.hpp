#ifndef LEAFSPACE_CHERNWEIL_HPP
#define LEAFSPACE_CHERNWEIL_HPP

#include <algorithm>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "leafspace/cdr.hpp"
#include "leafspace/cech.hpp"

namespace leafspace {

// Invariant polynomials are words in the trace powers c_i(A) = Tr(A^i); the
// word [1,1] is c_1^2, [2] is c_2, and so on. No 2*pi*i normalization is
// applied anywhere.
using TraceWord = std::vector<int>;

inline int word_degree(const TraceWord& w) {
    return std::accumulate(w.begin(), w.end(), 0);
}

struct CocycleDescriptor {
    enum class Kind { invariant_word, chern_character, u1, gv, bott_gv };
    Kind kind = Kind::invariant_word;
    TraceWord word;               // invariant_word
    int truncation = 0;           // chern_character
    std::vector<int> partition;   // bott_gv: partition of q
};

// One local connection matrix of 1-forms per chart; charts without an entry
// get the trivial (zero) connection.
struct ConnectionAssignment {
    int q = 1;
    std::map<std::string, MatrixForm> forms;

    static ConnectionAssignment trivial(int q) { return ConnectionAssignment{q, {}}; }

    bool is_trivial() const { return forms.empty(); }

    MatrixForm at(const std::string& chart_id) const {
        auto it = forms.find(chart_id);
        if (it != forms.end()) return it->second;
        return MatrixForm::zero(q, VarContext{q, 0}, 1);
    }
};

// connection 1-form J^{-1} dJ of an arrow's Jacobian
inline MatrixForm omega_h(const EmbeddingArrow& a) {
    int q = a.map.in_dim;
    ExprMatrix j = jacobian(a.map);
    Expr det = matrix_det(j);
    if (det.is_zero()) throw EvalError("omega_h: symbolically zero Jacobian determinant");
    ExprMatrix jinv = matrix_inverse(j, det);
    VarContext vars{q, 0};
    MatrixForm omega = MatrixForm::zero(q, vars, 1);
    for (int r = 0; r < q; ++r) {
        for (int c = 0; c < q; ++c) {
            DifferentialForm acc = DifferentialForm::zero(vars, 1);
            for (int k = 0; k < q; ++k) {
                // (dJ)_{kc} as a 1-form
                DifferentialForm dj(vars, 1);
                for (int l = 1; l <= q; ++l) {
                    Expr d = differentiate(j[static_cast<size_t>(k)][static_cast<size_t>(c)],
                                           chart_var(l));
                    if (!d.is_zero()) dj.add_term({chart_var(l)}, d);
                }
                acc = acc + jinv[static_cast<size_t>(r)][static_cast<size_t>(k)] * dj;
            }
            omega.at(r, c) = acc;
        }
    }
    return omega;
}

// Connection sequence of a string: entry 0 is the chosen connection on the
// source chart, entry i the transport of the chart-i connection along the
// composite h_i ... h_1, expressed in the source trivialization:
// J^{-1} (phi^* A) J + J^{-1} dJ.
inline std::vector<MatrixForm> string_connection_forms(const CochainContext& ctx,
                                                       const ArrowString& s, const Chart& source,
                                                       const ConnectionAssignment& conn) {
    std::vector<MatrixForm> out;
    out.push_back(conn.at(source.id));
    if (s.empty()) return out;
    EmbeddingArrow composite = *s[0];
    for (size_t i = 0; i < s.size(); ++i) {
        if (i > 0) composite = ctx.compose(*s[i], composite);
        MatrixForm omega = omega_h(composite);
        if (!conn.is_trivial()) {
            MatrixForm a = conn.at(composite.dst);
            bool zero = true;
            for (const auto& row : a.entries)
                for (const auto& e : row) zero = zero && e.is_zero();
            if (!zero) {
                ExprMatrix j = jacobian(composite.map);
                Expr det = matrix_det(j);
                ExprMatrix jinv = matrix_inverse(j, det);
                MatrixForm pulled = matrix_pullback(composite.map, a);
                omega = omega + matrix_sandwich(jinv, pulled, j);
            }
        }
        out.push_back(std::move(omega));
    }
    return out;
}

// Chern-Simons transgression of an invariant word over the simplex spanned by
// the given connection forms: build omega(t) = sum t_i omega_i on the simplex
// times the chart, take its curvature (dt-terms included), evaluate the trace
// word, and integrate along the simplex fiber. With the dt-first fiber
// convention the transgression needs no additional sign for the Stokes and
// cocycle identities to hold.
inline DifferentialForm cs_transgression(const TraceWord& word,
                                         const std::vector<MatrixForm>& forms, double tol) {
    int k = static_cast<int>(forms.size()) - 1;
    int q = forms.at(0).size;
    int p = word_degree(word);
    VarContext ambient{q, k};

    MatrixForm omega_t = MatrixForm::zero(q, ambient, 1);
    {
        // t_0 = 1 - t_1 - ... - t_k
        Expr t0 = Expr::constant(1);
        for (int i = 1; i <= k; ++i) t0 = t0 - Expr::variable(simplex_var(i));
        omega_t = omega_t + (t0 * matrix_promote(forms[0], k));
        for (int i = 1; i <= k; ++i)
            omega_t = omega_t +
                      (Expr::variable(simplex_var(i)) * matrix_promote(forms[static_cast<size_t>(i)], k));
    }
    MatrixForm curvature = matrix_exterior_d(omega_t) + matrix_wedge(omega_t, omega_t);

    DifferentialForm value = DifferentialForm::function(ambient, Expr::constant(1));
    for (int power : word) {
        MatrixForm m = curvature;
        for (int i = 1; i < power; ++i) m = matrix_wedge(m, curvature);
        DifferentialForm tr = matrix_trace(m);
        value = wedge(value, tr);
        if (value.is_zero()) break;
    }
    if (k == 0) return value;  // 2p-form on the chart, no integration
    if (value.is_zero() || 2 * p - k < 0 || 2 * p - k > q)
        return DifferentialForm::zero(VarContext{q, 0}, std::clamp(2 * p - k, 0, q));
    return fiber_integrate(value, tol);
}

// Transversal Chern-Weil cocycle of an invariant word: total degree 2p, the
// component on a string of k arrows is the transgression over the string's
// connection sequence.
inline CDRCochain cw_cocycle(const CochainContext& ctx, const TraceWord& word,
                             const ConnectionAssignment& conn, int max_k, double tol) {
    CDRCochain c;
    c.total_degree = 2 * word_degree(word);
    c.chart_dim = ctx.q;
    c.eval_fn = [ctx, word, conn, max_k, tol, c](const ArrowString& s, const Chart& source) {
        int k = static_cast<int>(s.size());
        if (k > max_k)
            return DifferentialForm::zero(VarContext{c.chart_dim, 0}, c.total_degree - k);
        std::vector<MatrixForm> forms = string_connection_forms(ctx, s, source, conn);
        return cs_transgression(word, forms, tol);
    };
    return c;
}

// log|det J| transgression cochain: U1 has the single component
// U1^{(1,0)}(h) = log|det J_h|.
inline CDRCochain u1_cocycle(const CochainContext& ctx) {
    CDRCochain c;
    c.total_degree = 1;
    c.chart_dim = ctx.q;
    c.eval_fn = [q = ctx.q](const ArrowString& s, const Chart&) {
        if (s.size() != 1)
            return DifferentialForm::zero(VarContext{q, 0},
                                          std::max(1 - static_cast<int>(s.size()), 0));
        Expr det = jacobian_det(s[0]->map);
        return DifferentialForm::function(VarContext{q, 0}, expr_log(expr_abs(det)));
    };
    return c;
}

namespace detail {

// Tr applied to the wedge product of consecutively pulled-back connection
// forms omega_{h_b} . (h_b)^*omega_{h_{b+1}} . ... over one partition block;
// `s` indexes arrows of the block in order, all composable.
inline DifferentialForm trace_block(const CochainContext& ctx, const ArrowString& block) {
    MatrixForm acc = omega_h(*block[0]);
    EmbeddingArrow composite = *block[0];
    for (size_t i = 1; i < block.size(); ++i) {
        MatrixForm next = matrix_pullback(composite.map, omega_h(*block[i]));
        acc = matrix_wedge(acc, next);
        if (i + 1 < block.size()) composite = ctx.compose(*block[i], composite);
    }
    return matrix_trace(acc);
}

}  // namespace detail

// Closed product formula for the Godbillon-Vey representative in bidegree
// (q+1, q): gv(h_1..h_{q+1}) = log|det J_{h_1}| h_1^*Tr(omega_{h_2})
// h_1^*h_2^*Tr(omega_{h_3}) ... ; the Bott variant groups the trailing trace
// factors by a partition of q. Assumes the trivial connection assignment.
inline CDRCochain gv_cocycle(const CochainContext& ctx, std::vector<int> partition = {}) {
    int q = ctx.q;
    if (partition.empty()) partition.assign(static_cast<size_t>(q), 1);
    int total = 0;
    for (int a : partition) {
        if (a <= 0) throw std::invalid_argument("gv partition entries must be positive");
        total += a;
    }
    if (total != q) throw std::invalid_argument("gv partition must sum to the codimension");

    CDRCochain c;
    c.total_degree = 2 * q + 1;
    c.chart_dim = q;
    c.eval_fn = [ctx, partition, q](const ArrowString& s, const Chart&) {
        VarContext vars{q, 0};
        if (static_cast<int>(s.size()) != q + 1)
            return DifferentialForm::zero(vars, 2 * q + 1 - static_cast<int>(s.size()));
        Expr det1 = jacobian_det(s[0]->map);
        DifferentialForm acc =
            DifferentialForm::function(vars, expr_log(expr_abs(det1)));
        size_t pos = 1;  // next arrow to consume
        for (int part : partition) {
            ArrowString block(s.begin() + static_cast<long>(pos),
                              s.begin() + static_cast<long>(pos + static_cast<size_t>(part)));
            DifferentialForm tr = detail::trace_block(ctx, block);
            // pull the block's trace back to the source chart along
            // h_{pos-1} ... h_1
            EmbeddingArrow phi = string_composite(ctx, s, pos);
            acc = wedge(acc, pullback(phi.map, tr));
            pos += static_cast<size_t>(part);
        }
        return acc;
    };
    return c;
}

// Truncated Chern character: sum_{i=0}^{N} (1/i!) cw(c_i), returned as its
// homogeneous pieces (total degree 2i). The i = 0 piece is the constant
// function q on every chart.
inline std::vector<CDRCochain> chern_character_cocycle(const CochainContext& ctx, int order,
                                                       const ConnectionAssignment& conn,
                                                       int max_k, double tol) {
    std::vector<CDRCochain> pieces;
    {
        CDRCochain c0;
        c0.total_degree = 0;
        c0.chart_dim = ctx.q;
        c0.eval_fn = [q = ctx.q](const ArrowString& s, const Chart&) {
            VarContext vars{q, 0};
            if (!s.empty()) return DifferentialForm::zero(vars, 0);
            return DifferentialForm::function(vars, Expr::constant(q));
        };
        pieces.push_back(std::move(c0));
    }
    for (int i = 1; i <= order; ++i) {
        CDRCochain ci = cw_cocycle(ctx, TraceWord{i}, conn, max_k, tol);
        pieces.push_back(cochain_scale(ci, make_rational(Integer(1), factorial(static_cast<unsigned>(i)))));
    }
    return pieces;
}

// Explicit chain homotopy between the Chern-Weil cocycles of two connection
// assignments, oriented so that D(H) = cw(conn) - cw(conn2): term i of the
// alternating sum transgresses over the interleaved sequence
// (conn2-transports of length i..k, conn-transports of length 0..i).
inline CDRCochain connection_homotopy(const CochainContext& ctx, const TraceWord& word,
                                      const ConnectionAssignment& conn,
                                      const ConnectionAssignment& conn2, int max_k, double tol) {
    CDRCochain h;
    h.total_degree = 2 * word_degree(word) - 1;
    h.chart_dim = ctx.q;
    h.eval_fn = [ctx, word, conn, conn2, max_k, tol, h](const ArrowString& s,
                                                        const Chart& source) {
        int k = static_cast<int>(s.size());
        int degree = h.total_degree - k;
        if (k > max_k) return DifferentialForm::zero(VarContext{h.chart_dim, 0}, degree);
        std::vector<MatrixForm> seq1 = string_connection_forms(ctx, s, source, conn);
        std::vector<MatrixForm> seq2 = string_connection_forms(ctx, s, source, conn2);
        DifferentialForm acc = DifferentialForm::zero(VarContext{h.chart_dim, 0}, degree);
        for (int i = 0; i <= k; ++i) {
            std::vector<MatrixForm> interleaved;
            for (int j = i; j <= k; ++j) interleaved.push_back(seq2[static_cast<size_t>(j)]);
            for (int j = 0; j <= i; ++j) interleaved.push_back(seq1[static_cast<size_t>(j)]);
            DifferentialForm term = cs_transgression(word, interleaved, tol);
            if (term.is_zero()) continue;
            acc = i % 2 == 0 ? acc + term : acc - term;
        }
        return acc;
    };
    return h;
}

struct StokesReport {
    double max_residual = 0.0;
    long terms_checked = 0;
};

// Residual of the Stokes identity for the transgression: for a string's
// connection sequence, [k_tilde, d] applied to a trace word (which is closed
// in the Weil algebra, so the commutator reduces to -(-1)^k d k_tilde)
// against the alternating sum of the face transgressions.
inline StokesReport stokes_check(const CochainContext& ctx, const CategoryPresentation& p,
                                 const ConnectionAssignment& conn, const TraceWord& word,
                                 int max_k, double tol, int points_per_chart,
                                 uint64_t seed = 0) {
    StokesReport rep;
    Sampler sampler(p.hash() ^ seed);
    for (int k = 1; k <= max_k; ++k) {
        for (const NerveString& s : enumerate_nerve(p, k)) {
            std::vector<MatrixForm> forms =
                string_connection_forms(ctx, s.arrows, *s.source, conn);
            DifferentialForm lhs = cs_transgression(word, forms, tol);
            DifferentialForm d_lhs = exterior_d(lhs);
            int sign = (k + 1) % 2 == 0 ? 1 : -1;  // -(-1)^k
            DifferentialForm commutator =
                sign > 0 ? d_lhs : DifferentialForm::zero(d_lhs.vars(), d_lhs.degree()) - d_lhs;

            DifferentialForm faces =
                DifferentialForm::zero(VarContext{ctx.q, 0}, lhs.degree() + 1);
            for (int i = 0; i <= k; ++i) {
                std::vector<MatrixForm> sub;
                for (int j = 0; j <= k; ++j)
                    if (j != i) sub.push_back(forms[static_cast<size_t>(j)]);
                DifferentialForm f = cs_transgression(word, sub, tol);
                if (f.is_zero()) continue;
                faces = i % 2 == 0 ? faces + f : faces - f;
            }
            DifferentialForm resid = commutator - faces;
            for (const EvalPoint& pt :
                 detail::sample_points(s.source->box, sampler, points_per_chart)) {
                rep.max_residual = std::max(rep.max_residual, max_abs_coefficient(resid, pt));
                ++rep.terms_checked;
            }
        }
    }
    return rep;
}

// Global sign s in D(U1) = s * C1, fixed once against a built-in probe arrow
// (x -> x + x^3 on a small interval) and shared by every report.
inline int transgression_sign_flag() {
    static const int flag = [] {
        Chart u;
        u.id = "probe";
        u.dim = 1;
        u.box = {Interval{make_rational(-1, 2), make_rational(1, 2)}};
        EmbeddingArrow h;
        h.id = "probe_h";
        h.src = h.dst = "probe";
        h.map.in_dim = h.map.out_dim = 1;
        h.map.components = {parse_expr("x1 + x1^3", VarContext{1, 0})};
        h.map.domain = h.map.codomain = u.box;

        CochainContext ctx = CochainContext::free_composition(1);
        CDRCochain u1 = u1_cocycle(ctx);
        CDRCochain du1 = total_coboundary(u1, ctx);
        CDRCochain c1 = cw_cocycle(ctx, TraceWord{1}, ConnectionAssignment::trivial(1), 3, 1e-10);

        ArrowString s{&h};
        EvalPoint pt;
        pt.chart = {0.1};
        double a = evaluate(du1(s, u).coefficient({chart_var(1)}), pt);
        double b = evaluate(c1(s, u).coefficient({chart_var(1)}), pt);
        if (b == 0.0 || !std::isfinite(a / b)) throw EvalError("sign calibration failed");
        return a / b > 0 ? 1 : -1;
    }();
    return flag;
}

}  // namespace leafspace

#endif
