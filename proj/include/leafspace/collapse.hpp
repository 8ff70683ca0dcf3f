#ifndef LEAFSPACE_COLLAPSE_HPP
#define LEAFSPACE_COLLAPSE_HPP

#include <functional>
#include <string>
#include <vector>

#include "leafspace/cdr.hpp"
#include "leafspace/chernweil.hpp"

namespace leafspace {

// Free one-object model: named embeddings of a box around the origin into
// itself, with no closure requirement. Strings compose symbolically.
struct OneObjectModel {
    int q = 1;
    Chart chart;                       // the single chart, box star-shaped around 0
    std::vector<EmbeddingArrow> maps;  // src = dst = chart.id

    const EmbeddingArrow* map(const std::string& id) const {
        for (const EmbeddingArrow& a : maps)
            if (a.id == id) return &a;
        return nullptr;
    }

    CochainContext context() const { return CochainContext::free_composition(q); }

    void check() const {
        if (static_cast<int>(chart.box.size()) != q)
            throw std::invalid_argument("one-object model: box/dimension mismatch");
        std::vector<double> origin(static_cast<size_t>(q), 0.0);
        for (const Interval& iv : chart.box)
            if (!(iv.lo_d() < 0.0 && iv.hi_d() > 0.0))
                throw std::invalid_argument("one-object model: 0 must be interior to the box");
        (void)origin;
    }
};

struct CubePathError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The nested s-cube of a string of embeddings:
//   I(t_1..t_s) = sigma_s( sigma_{s-1}( ... sigma_1(0) t_1 ... ) t_{s-1} ) t_s,
// built symbolically in the cube coordinates. Stage points are validated to
// stay inside the model box on a dense grid (poles of the maps must stay
// clear of every scaling path).
inline SmoothMap cube_map(const OneObjectModel& model, const ArrowString& sigmas,
                          int grid_per_axis = 50) {
    int s = static_cast<int>(sigmas.size());
    int q = model.q;
    if (s == 0) throw std::invalid_argument("cube_map: empty string");

    auto apply_sigma = [&](const EmbeddingArrow& a, const std::vector<Expr>& pt) {
        std::map<Var, Expr> bind;
        for (int i = 0; i < q; ++i) bind.emplace(chart_var(i + 1), pt[static_cast<size_t>(i)]);
        std::vector<Expr> out;
        for (const Expr& c : a.map.components) out.push_back(substitute(c, bind));
        return out;
    };

    // stages[j] = point after applying sigma_{j+1}; expressions in the cube
    // coordinates x1..x_{j} (stage 0 is the constant sigma_1(0))
    std::vector<std::vector<Expr>> stages;
    {
        std::vector<Expr> zero(static_cast<size_t>(q), Expr::constant(0));
        stages.push_back(apply_sigma(*sigmas[0], zero));
        for (int j = 1; j < s; ++j) {
            std::vector<Expr> scaled;
            for (const Expr& c : stages.back())
                scaled.push_back(c * Expr::variable(chart_var(j)));
            stages.push_back(apply_sigma(*sigmas[static_cast<size_t>(j)], scaled));
        }
    }
    std::vector<Expr> final_components;
    for (const Expr& c : stages.back())
        final_components.push_back(c * Expr::variable(chart_var(s)));

    // dense path validation: every stage point and every scaled intermediate
    // must stay inside the model box
    {
        int g = grid_per_axis;
        std::vector<double> coords(static_cast<size_t>(s), 0.0);
        std::function<void(int)> sweep = [&](int axis) {
            if (axis == s) {
                EvalPoint p;
                p.chart = coords;
                for (int j = 0; j < s; ++j) {
                    std::vector<double> v;
                    for (const Expr& c : stages[static_cast<size_t>(j)]) {
                        double x = evaluate(c, p);
                        v.push_back(j + 1 < s ? x * coords[static_cast<size_t>(j)]
                                              : x * coords[static_cast<size_t>(s - 1)]);
                    }
                    if (!box_contains(model.chart.box, v))
                        throw CubePathError("cube path exits the model box at stage " +
                                            std::to_string(j + 1));
                }
                return;
            }
            for (int i = 0; i <= g; ++i) {
                coords[static_cast<size_t>(axis)] = static_cast<double>(i) / g;
                sweep(axis + 1);
            }
        };
        sweep(0);
    }

    SmoothMap m;
    m.in_dim = s;
    m.out_dim = q;
    m.components = std::move(final_components);
    Interval unit{make_rational(0), make_rational(1)};
    m.domain.assign(static_cast<size_t>(s), unit);
    m.codomain = model.chart.box;
    return m;
}

// Collapse of a total-degree-n cochain to the constant-coefficient Cech
// cocycle:
//   u~(s_1..s_n) = sum_s (-1)^{n(s-1)+s(s-1)/2} int_{I_{s_1..s_s}} u_{n-s}(s_{s+1}..s_n)
// with the s = 0 term evaluating the 0-form component at the origin.
inline double collapse_cocycle(const OneObjectModel& model, const CDRCochain& u,
                               const ArrowString& sigmas, double tol) {
    int n = static_cast<int>(sigmas.size());
    if (u.total_degree != n)
        throw std::invalid_argument("collapse_cocycle: string length must equal total degree");
    QuadratureOptions opts;
    opts.tol = tol;
    opts.budget = quadrature_budget_default();

    double total = 0.0;
    for (int s = 0; s <= n; ++s) {
        ArrowString rest(sigmas.begin() + s, sigmas.end());
        DifferentialForm comp = u(rest, model.chart);  // form of degree s
        if (comp.is_zero()) continue;
        double value = 0.0;
        if (s == 0) {
            EvalPoint origin;
            origin.chart.assign(static_cast<size_t>(model.q), 0.0);
            value = evaluate(comp.coefficient({}), origin);
        } else {
            ArrowString head(sigmas.begin(), sigmas.begin() + s);
            SmoothMap cube = cube_map(model, head);
            DifferentialForm pulled = pullback(cube, comp);
            std::vector<Var> cube_vars;
            for (int i = 1; i <= s; ++i) cube_vars.push_back(chart_var(i));
            Expr integrand = pulled.coefficient(cube_vars);
            if (integrand.is_zero()) continue;
            EvalPoint none;
            value = integrate_region(integrand, Region::cube(), cube_vars, none, opts);
        }
        long e = static_cast<long>(n) * (s - 1) + static_cast<long>(s) * (s - 1) / 2;
        total += (((e % 2) + 2) % 2 == 0 ? 1.0 : -1.0) * value;
    }
    return total;
}

// Thurston's integral for the universal Godbillon-Vey cocycle in codimension
// one:
//   gv~(s1,s2,s3) = int_0^{s1(0)} log|s2'(t)| (s3''(s2(t)) / s3'(s2(t))) s2'(t) dt.
inline double thurston_gv(const OneObjectModel& model, const EmbeddingArrow& s1,
                          const EmbeddingArrow& s2, const EmbeddingArrow& s3, double tol) {
    if (model.q != 1) throw std::invalid_argument("thurston_gv: codimension one only");
    Var x = chart_var(1);
    Expr f2 = s2.map.components[0];
    Expr d2 = differentiate(f2, x);
    Expr f3 = s3.map.components[0];
    Expr d3 = differentiate(f3, x);
    Expr dd3 = differentiate(d3, x);
    std::map<Var, Expr> via_s2{{x, f2}};
    Expr integrand = expr_log(expr_abs(d2)) * substitute(dd3 / d3, via_s2) * d2;

    EvalPoint origin;
    origin.chart = {0.0};
    double upper = evaluate(s1.map.components[0], origin);

    // precondition: integrand finite along the (sampled) segment
    for (int i = 0; i <= 50; ++i) {
        EvalPoint p;
        p.chart = {upper * i / 50.0};
        try {
            (void)evaluate(integrand, p);
        } catch (const EvalError& e) {
            throw EvalError(std::string("thurston_gv: integrand singular on the path: ") +
                            e.what());
        }
    }

    QuadratureOptions opts;
    opts.tol = tol;
    opts.budget = quadrature_budget_default();
    EvalPoint none;
    return integrate_region(integrand, Region::interval(0.0, upper), std::vector<Var>{x}, none,
                            opts);
}

struct CechCocycleReport {
    double max_residual = 0.0;
    long tuples_checked = 0;
};

// Residual of the constant-coefficient Cech cocycle identity
// sum_i (-1)^i u~(d_i-face) over the supplied (n+1)-tuples; inner faces
// compose symbolically, delta_0 has no coefficient action.
inline CechCocycleReport cech_cocycle_check(
    const OneObjectModel& model, const std::function<double(const ArrowString&)>& u_tilde,
    int degree, const std::vector<ArrowString>& tuples) {
    CochainContext ctx = model.context();
    CechCocycleReport rep;
    std::vector<EmbeddingArrow> composites;  // owns synthesized arrows
    composites.reserve(tuples.size() * static_cast<size_t>(degree + 1));
    for (const ArrowString& t : tuples) {
        if (static_cast<int>(t.size()) != degree + 1)
            throw std::invalid_argument("cech_cocycle_check: tuple of wrong length");
        double sum = 0.0;
        for (int i = 0; i <= degree + 1; ++i) {
            ArrowString face;
            if (i == 0) {
                face.assign(t.begin() + 1, t.end());
            } else if (i == degree + 1) {
                face.assign(t.begin(), t.end() - 1);
            } else {
                composites.push_back(
                    ctx.compose(*t[static_cast<size_t>(i)], *t[static_cast<size_t>(i - 1)]));
                for (int j = 0; j <= degree; ++j) {
                    if (j == i - 1) {
                        face.push_back(&composites.back());
                    } else if (j != i) {
                        face.push_back(t[static_cast<size_t>(j)]);
                    }
                }
            }
            sum += (i % 2 == 0 ? 1.0 : -1.0) * u_tilde(face);
        }
        rep.max_residual = std::max(rep.max_residual, std::abs(sum));
        ++rep.tuples_checked;
    }
    return rep;
}

}  // namespace leafspace

#endif
