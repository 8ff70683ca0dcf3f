#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "helpers.hpp"
#include "leafspace/cech.hpp"
#include "leafspace/report.hpp"
#include "leafspace/scenario.hpp"

using namespace leafspace;
using test_helpers::fixture;

TEST_CASE("all bundled fixtures load and validate") {
    for (const char* name :
         {"single-chart.scn", "z2-reflection.scn", "circle-cover.scn", "translations-q1.scn",
          "mobius-elliptic3.scn", "mobius-free-q1.scn"}) {
        INFO(name);
        REQUIRE_NOTHROW(load_scenario(fixture(name)));
    }
}

TEST_CASE("fixture structure") {
    Scenario z2 = load_scenario(fixture("z2-reflection.scn"));
    REQUIRE(z2.name == "z2-reflection");
    REQUIRE(z2.presentation->charts.size() == 1);
    REQUIRE(z2.presentation->arrows.size() == 2);  // g and the identity

    Scenario mob = load_scenario(fixture("mobius-elliptic3.scn"));
    REQUIRE(mob.presentation->charts.size() == 3);
    REQUIRE(mob.presentation->arrows.size() == 9);  // 6 arrows + 3 identities

    Scenario free = load_scenario(fixture("mobius-free-q1.scn"));
    REQUIRE(free.model.has_value());
    REQUIRE(free.model->maps.size() == 5);
    REQUIRE_FALSE(free.tasks.empty());
}

TEST_CASE("unresolved chart references are reported by id") {
    std::istringstream in(R"([chart] id=U, dim=1, box=[0,1]
[embedding] id=h, src=U, dst=MISSING, map="x1")");
    try {
        parse_scenario(in);
        FAIL("expected ScenarioError");
    } catch (const ScenarioError& e) {
        REQUIRE(std::string(e.what()).find("MISSING") != std::string::npos);
        REQUIRE(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("malformed input is rejected with line numbers") {
    {
        std::istringstream in("[chart] id=U, dim=1, box=[1,0]");
        REQUIRE_THROWS_AS(parse_scenario(in), ScenarioError);
    }
    {
        std::istringstream in("not a section");
        REQUIRE_THROWS_AS(parse_scenario(in), ScenarioError);
    }
    {
        std::istringstream in(R"([chart] id=U, dim=1, box=[0,1]
[model] kind=one-object, dim=1, box=[-1,1])");
        REQUIRE_THROWS_AS(parse_scenario(in), ScenarioError);
    }
    {
        std::istringstream in("[scenario] name=empty");
        REQUIRE_THROWS_AS(parse_scenario(in), ScenarioError);
    }
}

TEST_CASE("invalid presentations fail loading with the failure list") {
    // image of 3x escapes the box
    std::istringstream in(R"([chart] id=U, dim=1, box=[-2,2]
[embedding] id=h, src=U, dst=U, map="3*x1"
[compose] h.h=h)");
    Scenario sc = parse_scenario(in);
    REQUIRE(sc.presentation.has_value());
    ValidationReport rep = validate_presentation(*sc.presentation);
    REQUIRE_FALSE(rep.ok);
}

TEST_CASE("reports are deterministic") {
    Scenario sc = load_scenario(fixture("z2-reflection.scn"));
    auto run = [&]() {
        Json rep = make_report(sc.name, "betti");
        BettiTable t = betti(*sc.presentation, Coefficient::trivial, 6, 0);
        rep["betti"] = t.betti;
        return rep.dump();
    };
    REQUIRE(run() == run());
}

TEST_CASE("task parameters are preserved") {
    Scenario sc = load_scenario(fixture("mobius-free-q1.scn"));
    bool found = false;
    for (const Task& t : sc.tasks) {
        if (t.command == "collapse-check") {
            found = true;
            REQUIRE(t.params.count("triples") == 1);
        }
    }
    REQUIRE(found);
}

TEST_CASE("table rendering walks the JSON document") {
    Json j = make_report("demo", "betti");
    j["betti"] = {1, 1, 0};
    std::ostringstream os;
    print_table(j, os);
    REQUIRE(os.str().find("betti") != std::string::npos);
    REQUIRE(os.str().find("demo") != std::string::npos);
}
