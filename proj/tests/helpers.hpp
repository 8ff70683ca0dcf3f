#ifndef LEAFSPACE_TEST_HELPERS_HPP
#define LEAFSPACE_TEST_HELPERS_HPP

#include <random>
#include <string>
#include <vector>

#include "leafspace/form.hpp"
#include "leafspace/scenario.hpp"

namespace test_helpers {

using namespace leafspace;

inline std::string fixture(const std::string& name) {
    return std::string(LEAFSPACE_FIXTURE_DIR) + "/" + name;
}

// random rational polynomial in q chart variables, degree <= max_deg
inline Expr random_polynomial(std::mt19937& rng, int q, int max_deg = 3, int terms = 4) {
    std::uniform_int_distribution<int> coeff(-4, 4);
    std::uniform_int_distribution<int> den(1, 3);
    std::uniform_int_distribution<int> deg(0, max_deg);
    Expr e = Expr::constant(0);
    for (int t = 0; t < terms; ++t) {
        Expr term = Expr::constant(make_rational(coeff(rng), den(rng)));
        int budget = deg(rng);
        for (int i = 1; i <= q && budget > 0; ++i) {
            std::uniform_int_distribution<int> part(0, budget);
            int e_i = part(rng);
            budget -= e_i;
            if (e_i > 0) term = term * expr_pow(Expr::variable(chart_var(i)), e_i);
        }
        e = e + term;
    }
    return e;
}

inline DifferentialForm random_form(std::mt19937& rng, int q, int degree) {
    DifferentialForm w(VarContext{q, 0}, degree);
    std::vector<std::vector<Var>> tuples;
    std::vector<Var> cur;
    std::function<void(int)> rec = [&](int start) {
        if (static_cast<int>(cur.size()) == degree) {
            tuples.push_back(cur);
            return;
        }
        for (int i = start; i <= q; ++i) {
            cur.push_back(chart_var(i));
            rec(i + 1);
            cur.pop_back();
        }
    };
    rec(1);
    for (const auto& t : tuples) w.add_term(t, random_polynomial(rng, q));
    return w;
}

// random polynomial self-map close to the identity (invertible on small boxes)
inline SmoothMap random_near_identity_map(std::mt19937& rng, int q) {
    std::uniform_int_distribution<int> num(-2, 2);
    SmoothMap m;
    m.in_dim = m.out_dim = q;
    Interval iv{make_rational(-1, 2), make_rational(1, 2)};
    m.domain.assign(static_cast<size_t>(q), iv);
    m.codomain.assign(static_cast<size_t>(q), iv);
    for (int i = 1; i <= q; ++i) {
        Expr comp = Expr::variable(chart_var(i));
        for (int j = 1; j <= q; ++j) {
            Expr pert = Expr::constant(make_rational(num(rng), 20)) *
                        expr_pow(Expr::variable(chart_var(j)), 2);
            comp = comp + pert;
        }
        m.components.push_back(comp);
    }
    return m;
}

inline EvalPoint random_point(std::mt19937& rng, int q, double lo = -0.4, double hi = 0.4) {
    std::uniform_real_distribution<double> dist(lo, hi);
    EvalPoint p;
    for (int i = 0; i < q; ++i) p.chart.push_back(dist(rng));
    return p;
}

inline double form_distance(const DifferentialForm& a, const DifferentialForm& b,
                            const EvalPoint& p) {
    return max_abs_coefficient(a - b, p);
}

inline EmbeddingArrow make_arrow(const std::string& id, const std::string& expr,
                                 const Box& box) {
    EmbeddingArrow a;
    a.id = id;
    a.src = a.dst = "R";
    a.map.in_dim = a.map.out_dim = 1;
    a.map.components = {parse_expr(expr, VarContext{1, 0})};
    a.map.domain = a.map.codomain = box;
    return a;
}

}  // namespace test_helpers

#endif
