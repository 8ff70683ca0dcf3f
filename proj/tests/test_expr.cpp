#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "leafspace/expr.hpp"

using namespace leafspace;

TEST_CASE("parser produces exact ASTs") {
    VarContext q1{1, 0};
    Expr v = parse_expr("x1", q1);
    REQUIRE(v.kind() == ExprKind::variable);
    REQUIRE(v.node().var == chart_var(1));

    Expr m = parse_expr("(2*x1 - 1)/(x1 + 3)", q1);
    REQUIRE(m.kind() == ExprKind::div);

    // rational literals fold exactly
    Expr r = parse_expr("3/4", q1);
    REQUIRE(r.is_constant());
    REQUIRE(r.constant_value() == make_rational(3, 4));
    Expr dec = parse_expr("0.5", q1);
    REQUIRE(dec.constant_value() == make_rational(1, 2));
}

TEST_CASE("parser rejects undeclared variables with a position") {
    VarContext q1{1, 0};
    REQUIRE_THROWS_AS(parse_expr("x7", q1), ParseError);
    REQUIRE_THROWS_AS(parse_expr("t1", q1), ParseError);
    try {
        parse_expr("x1 + x7", q1);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        REQUIRE(std::string(e.what()).find("x7") != std::string::npos);
        REQUIRE(e.position == 5);
    }
}

TEST_CASE("t0 expands to the complementary simplex coordinate") {
    VarContext ctx{1, 2};
    Expr e = parse_expr("t0 + t1 + t2", ctx);
    EvalPoint p;
    p.simplex = {0.3, 0.2};
    REQUIRE(evaluate(e, p) == Catch::Approx(1.0));
}

TEST_CASE("evaluation and error reporting") {
    VarContext q1{1, 0};
    Expr sq = parse_expr("x1^2", q1);
    EvalPoint p;
    p.chart = {3.0};
    REQUIRE(evaluate(sq, p) == Catch::Approx(9.0));

    Expr bad = parse_expr("log(abs(x1))", q1);
    EvalPoint zero;
    zero.chart = {0.0};
    REQUIRE_THROWS_AS(evaluate(bad, zero), EvalError);
}

TEST_CASE("integral nodes evaluate lazily by quadrature") {
    Expr t = Expr::variable(simplex_var(1));
    Expr node = expr_integral(t, {simplex_var(1)}, Region::interval(0, 1), 1e-10);
    EvalPoint p;
    REQUIRE(evaluate(node, p) == Catch::Approx(0.5).margin(1e-9));

    // nested node over the same variable is rejected
    REQUIRE_THROWS_AS(expr_integral(node, {simplex_var(1)}, Region::interval(0, 1), 1e-8),
                      std::invalid_argument);
}

TEST_CASE("differentiation: base rules") {
    VarContext q1{1, 0};
    Var x = chart_var(1);
    Expr sq = parse_expr("x1^2", q1);
    Expr d = differentiate(sq, x);
    EvalPoint p;
    p.chart = {1.7};
    REQUIRE(evaluate(d, p) == Catch::Approx(3.4));

    // d log|x| = 1/x on both sides of zero
    Expr l = parse_expr("log(abs(x1))", q1);
    Expr dl = differentiate(l, x);
    for (double v : {0.5, -0.5, 2.0, -2.0}) {
        EvalPoint q;
        q.chart = {v};
        REQUIRE(evaluate(dl, q) == Catch::Approx(1.0 / v).epsilon(1e-12));
    }
}

TEST_CASE("quotient rule against central finite differences") {
    VarContext q1{1, 0};
    Expr e = parse_expr("(2*x1 - 1)/(x1 + 3)", q1);
    Expr d = differentiate(e, chart_var(1));
    const double h = 1e-5;
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int i = 0; i < 10; ++i) {
        double x = dist(rng);
        EvalPoint p, pl, pr;
        p.chart = {x};
        pl.chart = {x - h};
        pr.chart = {x + h};
        double fd = (evaluate(e, pr) - evaluate(e, pl)) / (2 * h);
        REQUIRE(std::abs(evaluate(d, p) - fd) < 1e-6);
    }
}

TEST_CASE("substitution is exact and composes with evaluation") {
    VarContext q1{1, 0};
    Var x = chart_var(1);
    Expr e = parse_expr("x1^2", q1);

    Expr same = substitute(e, {{x, Expr::variable(x)}});
    REQUIRE(structurally_equal(same, e));

    Expr shifted = substitute(e, {{x, parse_expr("x1 + 1", q1)}});
    EvalPoint p;
    p.chart = {2.0};
    REQUIRE(evaluate(shifted, p) == Catch::Approx(9.0));

    // chain property at random points
    std::mt19937 rng(11);
    Expr f = test_helpers::random_polynomial(rng, 1);
    Expr g = test_helpers::random_polynomial(rng, 1);
    Expr fg = substitute(f, {{x, g}});
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int i = 0; i < 20; ++i) {
        EvalPoint pt;
        pt.chart = {dist(rng)};
        EvalPoint mid;
        mid.chart = {evaluate(g, pt)};
        REQUIRE(evaluate(fg, pt) == Catch::Approx(evaluate(f, mid)).margin(1e-12));
    }
}

TEST_CASE("differentiation under an integral node") {
    // with respect to a bound variable: rejected
    Expr t = Expr::variable(simplex_var(1));
    Expr x = Expr::variable(chart_var(1));
    Expr node = expr_integral(x * t, {simplex_var(1)}, Region::interval(0, 1), 1e-10);
    REQUIRE_THROWS_AS(differentiate(node, simplex_var(1)), EvalError);

    // with respect to a free variable: Leibniz rule
    Expr d = differentiate(node, chart_var(1));
    EvalPoint p;
    p.chart = {5.0};
    REQUIRE(evaluate(d, p) == Catch::Approx(0.5).margin(1e-9));
}

TEST_CASE("printer round-trips through the parser") {
    VarContext ctx{2, 1};
    for (const char* text :
         {"x1", "(2*x1 - 1)/(x1 + 3)", "x1^2*x2 - 4*x2^3", "exp(x1) + log(abs(x2))",
          "sin(x1)*cos(x2)", "1/2 + t1*x1", "-x1 + 3", "x1^-2"}) {
        Expr e = parse_expr(text, ctx);
        Expr back = parse_expr(to_string(e), ctx);
        INFO(text << " -> " << to_string(e));
        REQUIRE(structurally_equal(e, back));
    }
}

TEST_CASE("free variable bookkeeping skips bound variables") {
    Expr t = Expr::variable(simplex_var(1));
    Expr x = Expr::variable(chart_var(1));
    Expr node = expr_integral(x * t, {simplex_var(1)}, Region::simplex(), 1e-8);
    auto vars = free_vars(node);
    REQUIRE(vars == std::vector<Var>{chart_var(1)});
    REQUIRE(depends_on(node, chart_var(1)));
    REQUIRE_FALSE(depends_on(node, simplex_var(1)));
}

TEST_CASE("polynomial expansion extracts monomials over chosen variables") {
    VarContext ctx{1, 2};
    Expr e = parse_expr("(t1 + x1)^2 - t2*x1", ctx);
    std::vector<Var> tvars{simplex_var(1), simplex_var(2)};
    auto poly = expand_polynomial(e, tvars);
    REQUIRE(poly.has_value());
    // t1^2 coefficient is 1
    Expr c = poly->terms.at({2, 0});
    REQUIRE(c.is_constant());
    REQUIRE(c.constant_value() == 1);
    // non-polynomial occurrences fail
    Expr bad = parse_expr("exp(t1)", ctx);
    REQUIRE_FALSE(expand_polynomial(bad, tvars).has_value());
    // but transcendental coefficients of the *other* variables are fine
    Expr ok = parse_expr("exp(x1)*t1", ctx);
    REQUIRE(expand_polynomial(ok, tvars).has_value());
}
