#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "leafspace/basic.hpp"
#include "leafspace/cech.hpp"

using namespace leafspace;

namespace {

// quarter-turn rotation action of Z/4 on a square box: the box maps onto
// itself exactly, so the presentation closes in two dimensions
CategoryPresentation z4_rotation() {
    CategoryPresentation p;
    Interval iv{make_rational(-2), make_rational(2)};
    Chart u{"U", 2, {iv, iv}};
    p.charts = {u};
    VarContext q2{2, 0};
    auto arrow = [&](const std::string& id, const std::string& e1, const std::string& e2) {
        EmbeddingArrow a;
        a.id = id;
        a.src = a.dst = "U";
        a.map.in_dim = a.map.out_dim = 2;
        a.map.components = {parse_expr(e1, q2), parse_expr(e2, q2)};
        a.map.domain = a.map.codomain = u.box;
        return a;
    };
    p.arrows = {arrow("r1", "-x2", "x1"), arrow("r2", "-x1", "-x2"),
                arrow("r3", "x2", "-x1")};
    p.table[{"r1", "r1"}] = "r2";
    p.table[{"r1", "r2"}] = "r3";
    p.table[{"r1", "r3"}] = "id_U";
    p.table[{"r2", "r1"}] = "r3";
    p.table[{"r2", "r2"}] = "id_U";
    p.table[{"r2", "r3"}] = "r1";
    p.table[{"r3", "r1"}] = "id_U";
    p.table[{"r3", "r2"}] = "r1";
    p.table[{"r3", "r3"}] = "r2";
    p.finalize();
    return p;
}

}  // namespace

TEST_CASE("quarter-turn action validates and has trivial rational cohomology") {
    CategoryPresentation p = z4_rotation();
    ValidationReport rep = validate_presentation(p);
    CAPTURE(rep.failures);
    REQUIRE(rep.ok);

    // rotations preserve orientation
    Sampler sampler(p.hash());
    for (const EmbeddingArrow& a : p.arrows) REQUIRE(orientation_sign(a, sampler) == 1);

    // finite groups have no rational cohomology above degree zero
    BettiTable t = betti(p, Coefficient::trivial, 4);
    REQUIRE(t.betti == std::vector<long>{1, 0, 0, 0, 0});

    // orientation coefficients are untwisted here, so duality still pairs up
    REQUIRE(duality_check(p, 2, 4).pass);

    for (Coefficient c : {Coefficient::trivial, Coefficient::orientation})
        for (int k = 0; k <= 4; ++k)
            REQUIRE(multiply(coboundary_matrix(p, k + 1, c), coboundary_matrix(p, k, c))
                        .is_zero());
}

TEST_CASE("rotation-invariant polynomial forms") {
    CategoryPresentation p = z4_rotation();

    // degree <= 2 invariant functions: span{1, x^2 + y^2}
    InvariantFormBasis f0 = invariant_forms(p, 0, 2);
    REQUIRE(f0.dimension() == 2);

    // linear-coefficient invariant 1-forms: span{x dx + y dy, y dx - x dy}
    InvariantFormBasis f1 = invariant_forms(p, 1, 1);
    REQUIRE(f1.dimension() == 2);

    // and the invariance equations hold exactly
    for (const auto& vec : f1.basis) {
        for (const EmbeddingArrow& a : p.arrows) {
            if (a.is_identity) continue;
            DifferentialForm resid = pullback(a.map, vec[0]) - vec[0];
            REQUIRE(detail::expand_form(resid, 2).empty());
        }
    }

    // top-degree forms with constant coefficients: dx ^ dy is rotation
    // invariant (the Jacobian determinant is one)
    InvariantFormBasis f2 = invariant_forms(p, 2, 0);
    REQUIRE(f2.dimension() == 1);
}

TEST_CASE("basic cohomology of the rotation action in two dimensions") {
    CategoryPresentation p = z4_rotation();
    BasicCohomologyTable t = basic_cohomology(p, 2, 2);
    REQUIRE(t.invariant_dims.size() == 3);
    // level 0 bound 2: {1, x^2+y^2}; level 1 bound 1: the two forms above;
    // level 2 bound 0: {dx^dy}
    REQUIRE(t.invariant_dims == std::vector<long>{2, 2, 1});
    // d(x^2+y^2) = 2(x dx + y dy) and d(y dx - x dy) = -2 dx^dy:
    // everything above degree zero cancels
    REQUIRE(t.betti == std::vector<long>{1, 0, 0});
}
