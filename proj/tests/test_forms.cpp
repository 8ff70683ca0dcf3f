#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "leafspace/form.hpp"

using namespace leafspace;
using test_helpers::form_distance;
using test_helpers::random_form;
using test_helpers::random_near_identity_map;
using test_helpers::random_point;

TEST_CASE("wedge basics") {
    VarContext q2{2, 0};
    DifferentialForm dx1(q2, 1), dx2(q2, 1);
    dx1.add_term({chart_var(1)}, Expr::constant(1));
    dx2.add_term({chart_var(2)}, Expr::constant(1));

    REQUIRE(wedge(dx1, dx1).is_zero());

    DifferentialForm a(q2, 1), b(q2, 1);
    a.add_term({chart_var(1)}, Expr::variable(chart_var(1)));
    b.add_term({chart_var(2)}, Expr::variable(chart_var(2)));
    DifferentialForm ab = wedge(a, b);
    EvalPoint p;
    p.chart = {2.0, 3.0};
    REQUIRE(evaluate(ab.coefficient({chart_var(1), chart_var(2)}), p) == Catch::Approx(6.0));
}

TEST_CASE("graded antisymmetry at random points") {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        DifferentialForm a = random_form(rng, 3, 1);
        DifferentialForm b = random_form(rng, 3, 1);
        DifferentialForm lhs = wedge(a, b) + wedge(b, a);  // odd degrees: sign -1
        EvalPoint p = random_point(rng, 3);
        REQUIRE(max_abs_coefficient(lhs, p) < 1e-10);
    }
}

TEST_CASE("exterior derivative basics") {
    VarContext q2{2, 0};
    DifferentialForm w(q2, 1);
    w.add_term({chart_var(2)}, Expr::variable(chart_var(1)));  // x1 dx2
    DifferentialForm dw = exterior_d(w);
    EvalPoint p;
    p.chart = {0.3, 0.7};
    REQUIRE(evaluate(dw.coefficient({chart_var(1), chart_var(2)}), p) == Catch::Approx(1.0));

    DifferentialForm c = DifferentialForm::function(q2, Expr::constant(5));
    REQUIRE(exterior_d(c).is_zero());
}

TEST_CASE("d squared vanishes on random forms") {
    std::mt19937 rng(9);
    for (int trial = 0; trial < 25; ++trial) {
        int q = 2 + (trial % 2);
        int deg = trial % q;
        DifferentialForm w = random_form(rng, q, deg);
        DifferentialForm ddw = exterior_d(exterior_d(w));
        for (int i = 0; i < 10; ++i) {
            EvalPoint p = random_point(rng, q);
            REQUIRE(max_abs_coefficient(ddw, p) < 1e-10);
        }
    }
}

TEST_CASE("Leibniz rule on random forms") {
    std::mt19937 rng(13);
    for (int trial = 0; trial < 15; ++trial) {
        int q = 2;
        int da = trial % 2, db = (trial / 2) % 2;
        DifferentialForm a = random_form(rng, q, da);
        DifferentialForm b = random_form(rng, q, db);
        DifferentialForm lhs = exterior_d(wedge(a, b));
        DifferentialForm rhs = wedge(exterior_d(a), b);
        DifferentialForm sgn = da % 2 == 0 ? wedge(a, exterior_d(b))
                                           : DifferentialForm::zero(a.vars(), da + db + 1) -
                                                 wedge(a, exterior_d(b));
        rhs = rhs + sgn;
        EvalPoint p = random_point(rng, q);
        REQUIRE(form_distance(lhs, rhs, p) < 1e-10);
    }
}

TEST_CASE("pullback basics") {
    VarContext q1{1, 0};
    Box box{Interval{make_rational(-1), make_rational(1)}};
    SmoothMap ident = SmoothMap::identity(1, box);

    DifferentialForm w(q1, 1);
    w.add_term({chart_var(1)}, Expr::variable(chart_var(1)));  // x dx
    REQUIRE(form_distance(pullback(ident, w), w, EvalPoint{{0.4}, {}}) < 1e-14);

    SmoothMap dbl = ident;
    dbl.components = {parse_expr("2*x1", q1)};
    DifferentialForm dx(q1, 1);
    dx.add_term({chart_var(1)}, Expr::constant(1));
    DifferentialForm pulled = pullback(dbl, dx);
    EvalPoint p;
    p.chart = {0.3};
    REQUIRE(evaluate(pulled.coefficient({chart_var(1)}), p) == Catch::Approx(2.0));

    SmoothMap sq = ident;
    sq.components = {parse_expr("x1^2", q1)};
    DifferentialForm xdx = w;
    DifferentialForm got = pullback(sq, xdx);  // expect 2 x^3 dx
    REQUIRE(evaluate(got.coefficient({chart_var(1)}), p) == Catch::Approx(2 * 0.3 * 0.3 * 0.3));
}

TEST_CASE("pullback functoriality and compatibility with d") {
    std::mt19937 rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        int q = 2;
        SmoothMap f = random_near_identity_map(rng, q);
        SmoothMap g = random_near_identity_map(rng, q);
        DifferentialForm w = random_form(rng, q, 1);

        DifferentialForm via_composite = pullback(compose(g, f), w);
        DifferentialForm via_steps = pullback(f, pullback(g, w));
        EvalPoint p = random_point(rng, q, -0.2, 0.2);
        REQUIRE(form_distance(via_composite, via_steps, p) < 1e-10);

        DifferentialForm d_then_pull = pullback(f, exterior_d(w));
        DifferentialForm pull_then_d = exterior_d(pullback(f, w));
        REQUIRE(form_distance(d_then_pull, pull_then_d, p) < 1e-10);
    }
}

TEST_CASE("fiber integration selects the dt-block") {
    VarContext amb{1, 1};  // t1 and x1
    SECTION("t1 dt1 ^ dx1 integrates to dx1/2") {
        DifferentialForm w(amb, 2);
        w.add_term({simplex_var(1), chart_var(1)}, Expr::variable(simplex_var(1)));
        DifferentialForm out = fiber_integrate(w, 1e-9);
        REQUIRE(out.degree() == 1);
        EvalPoint p;
        p.chart = {0.0};
        REQUIRE(evaluate(out.coefficient({chart_var(1)}), p) == Catch::Approx(0.5));
        REQUIRE_FALSE(contains_integral(out.coefficient({chart_var(1)})));
    }
    SECTION("forms without the full dt-block die") {
        DifferentialForm w(amb, 1);
        w.add_term({chart_var(1)}, Expr::variable(chart_var(1)));
        REQUIRE(fiber_integrate(w, 1e-9).is_zero());
    }
    SECTION("dt1 ^ x1 dx1 keeps the chart coefficient") {
        DifferentialForm w(amb, 2);
        w.add_term({simplex_var(1), chart_var(1)}, Expr::variable(chart_var(1)));
        DifferentialForm out = fiber_integrate(w, 1e-9);
        EvalPoint p;
        p.chart = {0.8};
        REQUIRE(evaluate(out.coefficient({chart_var(1)}), p) == Catch::Approx(0.8));
    }
    SECTION("non-polynomial t-dependence falls back to a lazy node") {
        DifferentialForm w(amb, 2);
        w.add_term({simplex_var(1), chart_var(1)},
                   expr_exp(Expr::variable(simplex_var(1))));
        DifferentialForm out = fiber_integrate(w, 1e-10);
        Expr c = out.coefficient({chart_var(1)});
        REQUIRE(contains_integral(c));
        EvalPoint p;
        p.chart = {0.0};
        REQUIRE(evaluate(c, p) == Catch::Approx(std::exp(1.0) - 1.0).margin(1e-8));
    }
}

TEST_CASE("exact simplex moments match quadrature") {
    // integral over the 2-simplex of t1^2 t2 is 2!/(2+3)! = 1/60
    REQUIRE(simplex_moment({2, 1}) == make_rational(1, 60));
    Expr e = parse_expr("t1^2*t2", VarContext{0, 2});
    QuadratureOptions opts;
    EvalPoint none;
    std::vector<Var> tv{simplex_var(1), simplex_var(2)};
    REQUIRE(integrate_region(e, Region::simplex(), tv, none, opts) ==
            Catch::Approx(1.0 / 60.0).margin(1e-9));
}

TEST_CASE("trace of a wedge square of 1-form matrices vanishes") {
    std::mt19937 rng(31);
    VarContext q2{2, 0};
    MatrixForm m = MatrixForm::zero(2, q2, 1);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) m.at(i, j) = random_form(rng, 2, 1);
    DifferentialForm tr = matrix_trace(matrix_wedge(m, m));
    EvalPoint p = random_point(rng, 2);
    REQUIRE(max_abs_coefficient(tr, p) < 1e-10);
}
