// Acceptance suite: every criterion prints one [PASS]/[FAIL] line with its
// measured quantity and runtime. The binary exits nonzero if any criterion
// fails. Tolerances are pinned here, not configurable.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "leafspace/basic.hpp"
#include "leafspace/cech.hpp"
#include "leafspace/chernweil.hpp"
#include "leafspace/collapse.hpp"
#include "leafspace/scenario.hpp"

using namespace leafspace;

namespace {

std::string fixture(const std::string& name) {
    return std::string(LEAFSPACE_FIXTURE_DIR) + "/" + name;
}

const std::vector<std::string> kPresentations = {
    "single-chart.scn", "z2-reflection.scn", "circle-cover.scn", "translations-q1.scn",
    "mobius-elliptic3.scn"};

Scenario& load(const std::string& name) {
    static std::map<std::string, Scenario> cache;
    auto it = cache.find(name);
    if (it == cache.end()) it = cache.emplace(name, load_scenario(fixture(name))).first;
    return it->second;
}

struct Harness {
    int failures = 0;
    int index = 0;

    void run(const std::string& label, double time_budget_s,
             const std::function<std::string()>& body) {
        ++index;
        auto start = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = true;
        try {
            detail = body();
        } catch (const std::exception& e) {
            ok = false;
            detail = std::string("exception: ") + e.what();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                          .count();
        if (ok && time_budget_s > 0 && secs > time_budget_s) {
            ok = false;
            detail += " [over time budget]";
        }
        if (!ok) ++failures;
        std::ostringstream line;
        line << (ok ? "[PASS] " : "[FAIL] ") << "criterion " << index << ": " << label << " ("
             << detail << ", " << std::fixed << secs << "s)";
        std::cout << line.str() << "\n";
    }
};

std::vector<EvalPoint> chart_points(const Chart& c, int n, uint64_t seed = 1) {
    return detail::sample_points(c.box, Sampler(seed), n);
}

double closedness_residual(const CategoryPresentation& p, const CDRCochain& dc, int max_len,
                           int points) {
    double r = 0.0;
    for (int k = 1; k <= max_len; ++k) {
        for (const NerveString& s : enumerate_nerve(p, k)) {
            int fd = dc.total_degree - k;
            if (fd < 0 || fd > dc.chart_dim) continue;
            DifferentialForm v = dc(s.arrows, *s.source);
            if (v.is_zero()) continue;
            for (const EvalPoint& pt : chart_points(*s.source, points))
                r = std::max(r, max_abs_coefficient(v, pt));
        }
    }
    return r;
}

}  // namespace

int main() {
    Harness h;

    // 1. exact delta^2 = 0 on every bundled presentation
    h.run("delta^2 = 0 exactly, all presentations, both coefficient systems, degrees <= 8",
          10.0, [] {
              long checked = 0;
              for (const auto& name : kPresentations) {
                  const CategoryPresentation& p = *load(name).presentation;
                  for (Coefficient c : {Coefficient::trivial, Coefficient::orientation}) {
                      for (int k = 0; k <= 8; ++k) {
                          auto a = coboundary_matrix(p, k + 1, c);
                          auto b = coboundary_matrix(p, k, c);
                          if (!multiply(a, b).is_zero())
                              throw std::runtime_error(name + " k=" + std::to_string(k));
                          ++checked;
                      }
                  }
              }
              return "products checked: " + std::to_string(checked);
          });

    // 2. points-foliation sanity
    h.run("circle-cover Betti = (1,1,0,...), single-chart = (1,0,...)", 1.0, [] {
        BettiTable c = betti(*load("circle-cover.scn").presentation, Coefficient::trivial, 8);
        BettiTable s = betti(*load("single-chart.scn").presentation, Coefficient::trivial, 8);
        for (int k = 0; k <= 8; ++k) {
            long want_c = k == 0 || k == 1 ? 1 : 0;
            long want_s = k == 0 ? 1 : 0;
            if (c.betti[static_cast<size_t>(k)] != want_c) throw std::runtime_error("circle");
            if (s.betti[static_cast<size_t>(k)] != want_s) throw std::runtime_error("single");
        }
        std::ostringstream os;
        os << "b(circle) = 1,1,0,..; b(single) = 1,0,..";
        return os.str();
    });

    // 3. finite-group sanity
    h.run("z2-reflection trivial Betti = (1,0,0,...) through degree 8", 1.0, [] {
        BettiTable t = betti(*load("z2-reflection.scn").presentation, Coefficient::trivial, 8);
        for (int k = 0; k <= 8; ++k)
            if (t.betti[static_cast<size_t>(k)] != (k == 0 ? 1 : 0))
                throw std::runtime_error("degree " + std::to_string(k));
        return std::string("b = 1,0,0,...");
    });

    // 4. Poincare duality dimension check
    h.run("duality_check passes on all bundled presentations, degrees <= 6", 5.0, [] {
        for (const auto& name : kPresentations) {
            DualityReport d = duality_check(*load(name).presentation, 1, 6);
            if (!d.pass) throw std::runtime_error(name);
        }
        return "all pairs equal";
    });

    // 5. Chern-Simons Stokes identity
    h.run("Stokes residual < 1e-6 on mobius-elliptic3, strings <= 3, 10 points", 60.0, [] {
        const CategoryPresentation& p = *load("mobius-elliptic3.scn").presentation;
        CochainContext ctx = CochainContext::for_presentation(p);
        StokesReport r1 =
            stokes_check(ctx, p, ConnectionAssignment::trivial(1), {1}, 3, 1e-8, 10);
        StokesReport r2 =
            stokes_check(ctx, p, ConnectionAssignment::trivial(1), {1, 1}, 3, 1e-8, 10);
        double r = std::max(r1.max_residual, r2.max_residual);
        if (r >= 1e-6) throw std::runtime_error("residual " + std::to_string(r));
        std::ostringstream os;
        os << "max residual " << r;
        return os.str();
    });

    // 6. closedness of the transversal cocycles
    h.run("D(cw(c1)) and D(gv) residual < 1e-6 on mobius-elliptic3", 60.0, [] {
        const CategoryPresentation& p = *load("mobius-elliptic3.scn").presentation;
        CochainContext ctx = CochainContext::for_presentation(p);
        CDRCochain c1 = cw_cocycle(ctx, {1}, ConnectionAssignment::trivial(1), 3, 1e-8);
        CDRCochain gv = gv_cocycle(ctx);
        double r = std::max(closedness_residual(p, total_coboundary(c1, ctx), 3, 10),
                            closedness_residual(p, total_coboundary(gv, ctx), 3, 10));
        if (r >= 1e-6) throw std::runtime_error("residual " + std::to_string(r));
        std::ostringstream os;
        os << "max residual " << r;
        return os.str();
    });

    // 7. Bott vanishing at chain level
    h.run("every c1^2 component < 1e-10 on mobius-elliptic3 (q = 1)", 30.0, [] {
        const CategoryPresentation& p = *load("mobius-elliptic3.scn").presentation;
        CochainContext ctx = CochainContext::for_presentation(p);
        CDRCochain c = cw_cocycle(ctx, {1, 1}, ConnectionAssignment::trivial(1), 4, 1e-8);
        double r = 0.0;
        for (int k = 0; k <= 4; ++k)
            for (const NerveString& s : enumerate_nerve(p, k)) {
                DifferentialForm v = c(s.arrows, *s.source);
                for (const EvalPoint& pt : chart_points(*s.source, 10))
                    r = std::max(r, max_abs_coefficient(v, pt));
            }
        if (r >= 1e-10) throw std::runtime_error("residual " + std::to_string(r));
        std::ostringstream os;
        os << "max |coefficient| " << r;
        return os.str();
    });

    // 8. connection independence via the explicit homotopy
    h.run("D(H) - (cw(conn) - cw(conn')) residual < 1e-6 on mobius-elliptic3", 120.0, [] {
        const CategoryPresentation& p = *load("mobius-elliptic3.scn").presentation;
        CochainContext ctx = CochainContext::for_presentation(p);
        ConnectionAssignment trivial = ConnectionAssignment::trivial(1);
        ConnectionAssignment other(1, {});
        for (const Chart& c : p.charts) {
            MatrixForm a = MatrixForm::zero(1, VarContext{1, 0}, 1);
            a.at(0, 0).add_term({chart_var(1)}, parse_expr("x1^2/10", VarContext{1, 0}));
            other.forms.emplace(c.id, a);
        }
        CDRCochain H = connection_homotopy(ctx, {1}, trivial, other, 3, 1e-8);
        CDRCochain dh = total_coboundary(H, ctx);
        CDRCochain diff = cochain_sum(cw_cocycle(ctx, {1}, trivial, 3, 1e-8),
                                      cw_cocycle(ctx, {1}, other, 3, 1e-8), -1);
        double r = 0.0;
        for (int k = 1; k <= 2; ++k)
            for (const NerveString& s : enumerate_nerve(p, k))
                for (const EvalPoint& pt : chart_points(*s.source, 10)) {
                    DifferentialForm lhs = dh(s.arrows, *s.source);
                    DifferentialForm rhs = diff(s.arrows, *s.source);
                    r = std::max(r, max_abs_coefficient(lhs - rhs, pt));
                }
        if (r >= 1e-6) throw std::runtime_error("residual " + std::to_string(r));
        std::ostringstream os;
        os << "max residual " << r;
        return os.str();
    });

    // 9. transgression calibration
    h.run("delta(U1) = 0, D(U1) = s C1 with one global sign, U1 C1^q = s gv (q = 1)", 60.0,
          [] {
              int s_flag = transgression_sign_flag();
              double delta_r = 0.0, ratio_r = 0.0, prod_r = 0.0;
              for (const auto& name : kPresentations) {
                  const CategoryPresentation& p = *load(name).presentation;
                  CochainContext ctx = CochainContext::for_presentation(p);
                  CDRCochain u1 = u1_cocycle(ctx);
                  CDRCochain du1 = total_coboundary(u1, ctx);
                  CDRCochain c1 =
                      cw_cocycle(ctx, {1}, ConnectionAssignment::trivial(1), 3, 1e-8);
                  // delta U1 = 0: the (2,0) component of D(U1)
                  for (const NerveString& s : enumerate_nerve(p, 2)) {
                      DifferentialForm v = du1(s.arrows, *s.source);
                      for (const EvalPoint& pt : chart_points(*s.source, 10))
                          delta_r = std::max(delta_r, max_abs_coefficient(v, pt));
                  }
                  // D(U1) = s C1 on every arrow
                  for (const NerveString& s : enumerate_nerve(p, 1)) {
                      DifferentialForm lhs = du1(s.arrows, *s.source);
                      DifferentialForm rhs = c1(s.arrows, *s.source);
                      for (const EvalPoint& pt : chart_points(*s.source, 10)) {
                          double a = evaluate(lhs.coefficient({chart_var(1)}), pt);
                          double b = evaluate(rhs.coefficient({chart_var(1)}), pt);
                          ratio_r = std::max(ratio_r, std::abs(a - s_flag * b));
                      }
                  }
                  // product route against the closed gv formula
                  CDRCochain prod = cochain_product(u1, c1, ctx);
                  CDRCochain gv = gv_cocycle(ctx);
                  for (const NerveString& s : enumerate_nerve(p, 2)) {
                      DifferentialForm lhs = prod(s.arrows, *s.source);
                      DifferentialForm rhs = gv(s.arrows, *s.source);
                      for (const EvalPoint& pt : chart_points(*s.source, 10)) {
                          double a = evaluate(lhs.coefficient({chart_var(1)}), pt);
                          double b = evaluate(rhs.coefficient({chart_var(1)}), pt);
                          prod_r = std::max(prod_r, std::abs(a - s_flag * b));
                      }
                  }
              }
              if (delta_r >= 1e-10)
                  throw std::runtime_error("delta(U1) residual " + std::to_string(delta_r));
              if (ratio_r >= 1e-10)
                  throw std::runtime_error("D(U1) - s C1 residual " + std::to_string(ratio_r));
              if (prod_r >= 1e-6)
                  throw std::runtime_error("product residual " + std::to_string(prod_r));
              std::ostringstream os;
              os << "s = " << s_flag << ", residuals " << delta_r << " / " << ratio_r << " / "
                 << prod_r;
              return os.str();
          });

    // 10. collapse against the Thurston oracle
    h.run("|collapse(gv) - thurston| < 1e-5 on three triples incl. a frozen reference", 60.0,
          [] {
              const OneObjectModel& m = *load("mobius-free-q1.scn").model;
              CochainContext ctx = m.context();
              CDRCochain gv = gv_cocycle(ctx);
              const double kRef = 0.0323155426145930382451999357595;  // 50-digit oracle
              struct Case {
                  const char *a, *b, *c;
              };
              double disc = 0.0;
              for (const Case& tc : {Case{"m1", "m5", "m3"}, Case{"m3", "m1", "m5"},
                                     Case{"m1", "m4", "m3"}, Case{"m2", "m5", "m3"}}) {
                  ArrowString t{m.map(tc.a), m.map(tc.b), m.map(tc.c)};
                  double th = thurston_gv(m, *t[0], *t[1], *t[2], 1e-8);
                  double col = collapse_cocycle(m, gv, t, 1e-8);
                  disc = std::max(disc, std::abs(th - col));
              }
              double th_ref =
                  thurston_gv(m, *m.map("m1"), *m.map("m5"), *m.map("m3"), 1e-10);
              if (std::abs(th_ref - kRef) >= 1e-6)
                  throw std::runtime_error("reference mismatch " + std::to_string(th_ref));
              if (disc >= 1e-5)
                  throw std::runtime_error("discrepancy " + std::to_string(disc));
              std::ostringstream os;
              os << "max discrepancy " << disc << ", reference delta "
                 << std::abs(th_ref - kRef);
              return os.str();
          });

    // 11. Thurston cocycle identity
    h.run("Cech coboundary residual < 1e-4 over 20 sampled 4-tuples", 120.0, [] {
        const OneObjectModel& m = *load("mobius-free-q1.scn").model;
        std::vector<const EmbeddingArrow*> pool{m.map("m1"), m.map("m3"), m.map("m4"),
                                                m.map("m5")};
        std::vector<ArrowString> tuples;
        std::mt19937 rng(2024);
        std::uniform_int_distribution<size_t> pick(0, pool.size() - 1);
        while (tuples.size() < 20) {
            ArrowString t{pool[pick(rng)], pool[pick(rng)], pool[pick(rng)], pool[pick(rng)]};
            tuples.push_back(std::move(t));
        }
        auto u = [&](const ArrowString& s) {
            return thurston_gv(m, *s[0], *s[1], *s[2], 1e-8);
        };
        CechCocycleReport rep = cech_cocycle_check(m, u, 3, tuples);
        if (rep.max_residual >= 1e-4)
            throw std::runtime_error("residual " + std::to_string(rep.max_residual));
        std::ostringstream os;
        os << "max residual " << rep.max_residual << " over " << rep.tuples_checked
           << " tuples";
        return os.str();
    });

    // 12. symbolic calculus suite
    h.run("d^2 = 0, Leibniz, pullback functoriality, derivative vs finite differences", 5.0,
          [] {
              std::mt19937 rng(99);
              double worst = 0.0;
              for (int trial = 0; trial < 100; ++trial) {
                  int q = 1 + (trial % 2);
                  // d^2 = 0
                  {
                      DifferentialForm w = test_helpers::random_form(rng, q, trial % q);
                      DifferentialForm dd = exterior_d(exterior_d(w));
                      EvalPoint pt = test_helpers::random_point(rng, q);
                      worst = std::max(worst, max_abs_coefficient(dd, pt));
                      if (max_abs_coefficient(dd, pt) >= 1e-10)
                          throw std::runtime_error("d^2");
                  }
                  // Leibniz
                  {
                      DifferentialForm a = test_helpers::random_form(rng, q, 0);
                      DifferentialForm b = test_helpers::random_form(rng, q, q - 1);
                      DifferentialForm lhs = exterior_d(wedge(a, b));
                      DifferentialForm rhs =
                          wedge(exterior_d(a), b) + wedge(a, exterior_d(b));
                      EvalPoint pt = test_helpers::random_point(rng, q);
                      if (max_abs_coefficient(lhs - rhs, pt) >= 1e-10)
                          throw std::runtime_error("leibniz");
                  }
                  // pullback functoriality and d-compatibility
                  {
                      SmoothMap f = test_helpers::random_near_identity_map(rng, q);
                      SmoothMap g = test_helpers::random_near_identity_map(rng, q);
                      DifferentialForm w = test_helpers::random_form(rng, q, 1);
                      EvalPoint pt = test_helpers::random_point(rng, q, -0.2, 0.2);
                      DifferentialForm d1 = pullback(compose(g, f), w);
                      DifferentialForm d2 = pullback(f, pullback(g, w));
                      if (max_abs_coefficient(d1 - d2, pt) >= 1e-10)
                          throw std::runtime_error("functoriality");
                      DifferentialForm e1 = pullback(f, exterior_d(w));
                      DifferentialForm e2 = exterior_d(pullback(f, w));
                      if (max_abs_coefficient(e1 - e2, pt) >= 1e-10)
                          throw std::runtime_error("pullback-d");
                  }
                  // derivative against central finite differences
                  {
                      Expr e = test_helpers::random_polynomial(rng, 1);
                      Expr d = differentiate(e, chart_var(1));
                      std::uniform_real_distribution<double> dist(-0.8, 0.8);
                      double x = dist(rng);
                      const double step = 1e-5;
                      EvalPoint pl, pr, pc;
                      pl.chart = {x - step};
                      pr.chart = {x + step};
                      pc.chart = {x};
                      double fd =
                          (evaluate(e, pr) - evaluate(e, pl)) / (2 * step);
                      double sym = evaluate(d, pc);
                      double scale = std::max(1.0, std::abs(sym));
                      if (std::abs(sym - fd) / scale >= 1e-6)
                          throw std::runtime_error("finite differences");
                  }
              }
              return std::string("100 randomized cases");
          });

    // 13. basic-cohomology ansatz dimensions
    h.run("z2-reflection invariant_forms: dim(l=0,D=2) = 2 and dim(l=1,D=2) = 1", 5.0, [] {
        const CategoryPresentation& p = *load("z2-reflection.scn").presentation;
        InvariantFormBasis f0 = invariant_forms(p, 0, 2);
        InvariantFormBasis f1 = invariant_forms(p, 1, 2);
        if (f0.dimension() != 2) throw std::runtime_error("l=0 dim");
        if (f1.dimension() != 1) throw std::runtime_error("l=1 dim");
        return std::string("dims 2 and 1, exact");
    });

    std::cout << (h.failures == 0 ? "ALL CRITERIA PASSED" : "FAILURES PRESENT") << " ("
              << (13 - h.failures) << "/13)\n";
    return h.failures == 0 ? 0 : 1;
}
