#ifndef LEAFSPACE_CATEGORY_HPP
#define LEAFSPACE_CATEGORY_HPP

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "leafspace/sampling.hpp"
#include "leafspace/smooth_map.hpp"

namespace leafspace {

struct Chart {
    std::string id;
    int dim = 0;
    Box box;
};

struct EmbeddingArrow {
    std::string id;
    std::string src;
    std::string dst;
    SmoothMap map;
    bool is_identity = false;
};

// Finite presentation of an embedding category: charts, embedding arrows and
// an explicit composition table. Identity arrows are implicit ("id_<chart>")
// and added on finalize.
struct CategoryPresentation {
    std::vector<Chart> charts;
    std::vector<EmbeddingArrow> arrows;
    // (g, f) -> g.f  for dst(f) == src(g), all by arrow id
    std::map<std::pair<std::string, std::string>, std::string> table;

    const Chart* chart(const std::string& id) const {
        for (const Chart& c : charts)
            if (c.id == id) return &c;
        return nullptr;
    }
    const EmbeddingArrow* arrow(const std::string& id) const {
        for (const EmbeddingArrow& a : arrows)
            if (a.id == id) return &a;
        return nullptr;
    }
    int dim() const { return charts.empty() ? 0 : charts.front().dim; }

    // composite arrow g.f from the table (identities resolved implicitly)
    const EmbeddingArrow* compose(const EmbeddingArrow& g, const EmbeddingArrow& f) const {
        if (f.is_identity) return &g;
        if (g.is_identity) return &f;
        auto it = table.find({g.id, f.id});
        if (it == table.end()) return nullptr;
        return arrow(it->second);
    }

    // Adds identity arrows and sorts charts/arrows by id; call once after
    // construction.
    void finalize() {
        std::sort(charts.begin(), charts.end(),
                  [](const Chart& a, const Chart& b) { return a.id < b.id; });
        for (const Chart& c : charts) {
            std::string id = "id_" + c.id;
            if (!arrow(id)) {
                EmbeddingArrow a;
                a.id = id;
                a.src = a.dst = c.id;
                a.map = SmoothMap::identity(c.dim, c.box);
                a.is_identity = true;
                arrows.push_back(std::move(a));
            }
        }
        std::sort(arrows.begin(), arrows.end(),
                  [](const EmbeddingArrow& a, const EmbeddingArrow& b) { return a.id < b.id; });
    }

    // canonical content hash; drives the reproducible sample-point sequence
    uint64_t hash() const {
        std::ostringstream os;
        for (const Chart& c : charts) {
            os << "C|" << c.id << '|' << c.dim;
            for (const Interval& iv : c.box) os << '|' << iv.lo.get_str() << ',' << iv.hi.get_str();
        }
        for (const EmbeddingArrow& a : arrows) {
            os << "A|" << a.id << '|' << a.src << '|' << a.dst;
            for (const Expr& e : a.map.components) os << '|' << to_string(e);
        }
        for (const auto& [gf, h] : table) os << "T|" << gf.first << '|' << gf.second << '|' << h;
        return fnv1a(os.str());
    }
};

struct ValidationReport {
    bool ok = true;
    std::vector<std::string> failures;

    void fail(std::string msg) {
        ok = false;
        failures.push_back(std::move(msg));
    }
};

inline constexpr int kValidationSamples = 25;
inline constexpr double kMapConsistencyTol = 1e-9;

namespace detail {

inline std::vector<EvalPoint> sample_points(const Box& box, const Sampler& sampler, int count) {
    std::vector<EvalPoint> pts;
    auto bounds = box_bounds(box);
    for (int j = 0; j < count; ++j) {
        EvalPoint p;
        p.chart = sampler.in_box(bounds, j);
        pts.push_back(std::move(p));
    }
    return pts;
}

}  // namespace detail

// Constant sign of det(Jacobian) over the arrow's domain box, checked on the
// presentation's reproducible sample points. Throws on a detected sign change
// or a vanishing determinant.
inline int orientation_sign(const EmbeddingArrow& a, const Sampler& sampler) {
    Expr det = jacobian_det(a.map);
    int sign = 0;
    for (const EvalPoint& p : detail::sample_points(a.map.domain, sampler, kValidationSamples)) {
        double v = evaluate(det, p);
        if (std::abs(v) < 1e-12)
            throw EvalError("orientation_sign: vanishing Jacobian determinant on arrow " + a.id);
        int s = v > 0 ? 1 : -1;
        if (sign == 0) sign = s;
        if (s != sign)
            throw EvalError("orientation_sign: inconsistent orientation on arrow " + a.id);
    }
    return sign;
}

inline int orientation_sign(const CategoryPresentation& p, const EmbeddingArrow& a,
                            uint64_t seed = 0) {
    return orientation_sign(a, Sampler(p.hash() ^ seed));
}

inline ValidationReport validate_presentation(const CategoryPresentation& p, uint64_t seed = 0) {
    ValidationReport rep;
    Sampler sampler(p.hash() ^ seed);

    std::set<std::string> chart_ids;
    for (const Chart& c : p.charts) {
        if (!chart_ids.insert(c.id).second) rep.fail("duplicate chart id " + c.id);
        if (c.dim != p.dim()) rep.fail("chart " + c.id + " has mismatched dimension");
        if (static_cast<int>(c.box.size()) != c.dim)
            rep.fail("chart " + c.id + " box/dimension mismatch");
    }
    std::set<std::string> arrow_ids;
    for (const EmbeddingArrow& a : p.arrows) {
        if (!arrow_ids.insert(a.id).second) rep.fail("duplicate arrow id " + a.id);
        const Chart* s = p.chart(a.src);
        const Chart* d = p.chart(a.dst);
        if (!s) {
            rep.fail("arrow " + a.id + " references unknown source chart " + a.src);
            continue;
        }
        if (!d) {
            rep.fail("arrow " + a.id + " references unknown target chart " + a.dst);
            continue;
        }
        if (a.map.in_dim != s->dim || a.map.out_dim != d->dim) {
            rep.fail("arrow " + a.id + " map dimension mismatch");
            continue;
        }
        bool bad_vars = false;
        for (const Expr& comp : a.map.components)
            for (Var v : free_vars(comp))
                if (v.kind != VarKind::chart || v.index < 1 || v.index > s->dim) bad_vars = true;
        if (bad_vars) {
            rep.fail("arrow " + a.id + " uses variables outside x1..x" +
                     std::to_string(s->dim));
            continue;
        }
        if (a.is_identity) {
            bool ident = true;
            for (int i = 0; i < a.map.in_dim; ++i) {
                const Expr& c = a.map.components[static_cast<size_t>(i)];
                if (!(c.kind() == ExprKind::variable && c.node().var == chart_var(i + 1)))
                    ident = false;
            }
            if (!ident) rep.fail("identity arrow " + a.id + " does not carry the identity map");
        }
        // embedding validation: image in the target box, nonzero Jacobian
        Expr det = jacobian_det(a.map);
        for (const EvalPoint& pt : detail::sample_points(s->box, sampler, kValidationSamples)) {
            try {
                std::vector<double> img = apply_map(a.map, pt.chart);
                if (!box_contains(d->box, img)) {
                    std::ostringstream os;
                    os << "arrow " << a.id << ": image escapes target box at sample (";
                    for (size_t i = 0; i < pt.chart.size(); ++i)
                        os << (i ? "," : "") << pt.chart[i];
                    os << ")";
                    rep.fail(os.str());
                    break;
                }
                if (std::abs(evaluate(det, pt)) < 1e-12) {
                    rep.fail("arrow " + a.id + ": vanishing Jacobian determinant at sample");
                    break;
                }
            } catch (const EvalError& e) {
                rep.fail("arrow " + a.id + ": " + e.what());
                break;
            }
        }
    }
    if (!rep.ok) return rep;

    // closure of the table
    for (const EmbeddingArrow& f : p.arrows) {
        for (const EmbeddingArrow& g : p.arrows) {
            if (f.dst != g.src) continue;
            const EmbeddingArrow* h = p.compose(g, f);
            if (!h) {
                rep.fail("missing composition entry " + g.id + "." + f.id);
                continue;
            }
            if (h->src != f.src || h->dst != g.dst)
                rep.fail("composition " + g.id + "." + f.id + "=" + h->id +
                         " has wrong endpoints");
        }
    }
    if (!rep.ok) return rep;

    // identity laws
    for (const EmbeddingArrow& f : p.arrows) {
        auto check_id = [&](const std::string& gid, const std::string& fid,
                            const std::string& expect) {
            auto it = p.table.find({gid, fid});
            if (it != p.table.end() && it->second != expect)
                rep.fail("identity law violated: " + gid + "." + fid + "=" + it->second);
        };
        check_id("id_" + f.dst, f.id, f.id);
        check_id(f.id, "id_" + f.src, f.id);
    }

    // associativity of the table
    for (const EmbeddingArrow& f : p.arrows) {
        for (const EmbeddingArrow& g : p.arrows) {
            if (f.dst != g.src) continue;
            for (const EmbeddingArrow& h : p.arrows) {
                if (g.dst != h.src) continue;
                const EmbeddingArrow* gf = p.compose(g, f);
                const EmbeddingArrow* hg = p.compose(h, g);
                if (!gf || !hg) continue;
                const EmbeddingArrow* l = p.compose(h, *gf);
                const EmbeddingArrow* r = p.compose(*hg, f);
                if (!l || !r || l->id != r->id)
                    rep.fail("associativity fails on (" + h.id + "," + g.id + "," + f.id + ")");
            }
        }
    }

    // numeric consistency of the table with actual map composition
    for (const auto& [gf, hid] : p.table) {
        const EmbeddingArrow* g = p.arrow(gf.first);
        const EmbeddingArrow* f = p.arrow(gf.second);
        const EmbeddingArrow* h = p.arrow(hid);
        if (!g || !f) {
            rep.fail("composition entry references unknown arrow " + gf.first + "." + gf.second);
            continue;
        }
        if (!h) {
            rep.fail("composition entry " + gf.first + "." + gf.second +
                     " maps to unknown arrow " + hid);
            continue;
        }
        const Chart* s = p.chart(f->src);
        for (const EvalPoint& pt : detail::sample_points(s->box, sampler, kValidationSamples)) {
            std::vector<double> via = apply_map(g->map, apply_map(f->map, pt.chart));
            std::vector<double> direct = apply_map(h->map, pt.chart);
            double err = 0;
            for (size_t i = 0; i < via.size(); ++i)
                err = std::max(err, std::abs(via[i] - direct[i]));
            if (err > kMapConsistencyTol) {
                std::ostringstream os;
                os << "composition " << g->id << "." << f->id << "=" << hid
                   << " numerically inconsistent (err " << err << ")";
                rep.fail(os.str());
                break;
            }
        }
    }

    // orientation consistency: flag arrows whose Jacobian sign is not
    // constant (multiplicativity over the table then comes for free)
    for (const EmbeddingArrow& a : p.arrows) {
        try {
            orientation_sign(a, sampler);
        } catch (const EvalError& e) {
            rep.fail(e.what());
        }
    }
    return rep;
}

// String of composable non-identity arrows; degree 0 strings carry the chart.
struct NerveString {
    const Chart* source = nullptr;
    std::vector<const EmbeddingArrow*> arrows;

    int degree() const { return static_cast<int>(arrows.size()); }
};

// All composable k-tuples of non-identity arrows, ordered lexicographically
// by arrow id (degree 0 lists the charts).
inline std::vector<NerveString> enumerate_nerve(const CategoryPresentation& p, int k) {
    std::vector<NerveString> out;
    if (k == 0) {
        for (const Chart& c : p.charts) out.push_back(NerveString{&c, {}});
        return out;
    }
    std::vector<const EmbeddingArrow*> sorted;
    for (const EmbeddingArrow& a : p.arrows)
        if (!a.is_identity) sorted.push_back(&a);
    // arrows are already sorted by id after finalize()

    std::vector<const EmbeddingArrow*> current;
    std::function<void()> extend = [&]() {
        if (static_cast<int>(current.size()) == k) {
            out.push_back(NerveString{p.chart(current.front()->src), current});
            return;
        }
        for (const EmbeddingArrow* a : sorted) {
            if (!current.empty() && current.back()->dst != a->src) continue;
            current.push_back(a);
            extend();
            current.pop_back();
        }
    };
    extend();
    return out;
}

}  // namespace leafspace

#endif
