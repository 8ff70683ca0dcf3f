#ifndef LEAFSPACE_SCENARIO_HPP
#define LEAFSPACE_SCENARIO_HPP

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "leafspace/category.hpp"
#include "leafspace/collapse.hpp"

namespace leafspace {

struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Task {
    std::string command;
    std::map<std::string, std::string> params;
};

// A scenario: one presentation (category or free one-object model), optional
// task defaults, and metadata.
struct Scenario {
    std::string name;
    std::string description;
    std::optional<CategoryPresentation> presentation;
    std::optional<OneObjectModel> model;
    std::vector<Task> tasks;

    int dim() const {
        if (presentation) return presentation->dim();
        if (model) return model->q;
        return 0;
    }
};

namespace detail {

inline Rational parse_scalar(const std::string& text, int line) {
    try {
        auto slash = text.find('/');
        std::string s = text;
        bool neg = false;
        if (!s.empty() && s[0] == '-') {
            neg = true;
            s = s.substr(1);
        }
        Rational r;
        if (slash != std::string::npos) {
            slash = s.find('/');
            r = make_rational(Integer(s.substr(0, slash), 10), Integer(s.substr(slash + 1), 10));
        } else {
            r = parse_decimal(s);
        }
        return neg ? Rational(-r) : r;
    } catch (const std::exception&) {
        throw ScenarioError("line " + std::to_string(line) + ": bad number '" + text + "'");
    }
}

inline Box parse_box(const std::string& text, int line) {
    std::string body = text;
    if (body.size() < 2 || body.front() != '[' || body.back() != ']')
        throw ScenarioError("line " + std::to_string(line) + ": box must look like [a,b;...]");
    body = body.substr(1, body.size() - 2);
    Box box;
    std::istringstream ss(body);
    std::string axis;
    while (std::getline(ss, axis, ';')) {
        auto comma = axis.find(',');
        if (comma == std::string::npos)
            throw ScenarioError("line " + std::to_string(line) + ": box axis needs 'lo,hi'");
        Interval iv;
        iv.lo = parse_scalar(axis.substr(0, comma), line);
        iv.hi = parse_scalar(axis.substr(comma + 1), line);
        if (!(iv.lo < iv.hi))
            throw ScenarioError("line " + std::to_string(line) + ": empty box interval");
        box.push_back(std::move(iv));
    }
    if (box.empty()) throw ScenarioError("line " + std::to_string(line) + ": empty box");
    return box;
}

// splits "key=value, key=value" respecting quotes and brackets
inline std::map<std::string, std::string> parse_fields(const std::string& text, int line) {
    std::map<std::string, std::string> out;
    std::vector<std::string> parts;
    std::string cur;
    int depth = 0;
    bool quoted = false;
    for (char c : text) {
        if (c == '"') quoted = !quoted;
        if (!quoted) {
            if (c == '[' || c == '(') ++depth;
            if (c == ']' || c == ')') --depth;
            if (c == ',' && depth == 0) {
                parts.push_back(cur);
                cur.clear();
                continue;
            }
        }
        cur += c;
    }
    if (!cur.empty()) parts.push_back(cur);
    auto trim = [](std::string s) {
        size_t b = s.find_first_not_of(" \t");
        size_t e = s.find_last_not_of(" \t");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    for (const std::string& part : parts) {
        std::string p = trim(part);
        if (p.empty()) continue;
        auto eq = p.find('=');
        if (eq == std::string::npos)
            throw ScenarioError("line " + std::to_string(line) + ": expected key=value in '" +
                                p + "'");
        std::string key = trim(p.substr(0, eq));
        std::string val = trim(p.substr(eq + 1));
        if (val.size() >= 2 && val.front() == '"' && val.back() == '"')
            val = val.substr(1, val.size() - 2);
        out[key] = val;
    }
    return out;
}

inline std::vector<Expr> parse_map_components(const std::string& text, int q, int line) {
    std::vector<Expr> comps;
    std::istringstream ss(text);
    std::string piece;
    while (std::getline(ss, piece, ';')) {
        try {
            comps.push_back(parse_expr(piece, VarContext{q, 0}));
        } catch (const ParseError& e) {
            throw ScenarioError("line " + std::to_string(line) + ": " + e.what());
        }
    }
    if (static_cast<int>(comps.size()) != q)
        throw ScenarioError("line " + std::to_string(line) + ": map needs " + std::to_string(q) +
                            " component(s)");
    return comps;
}

}  // namespace detail

// Parses the sectioned scenario text format:
//   [scenario]  name=..., description=...
//   [chart]     id=..., dim=..., box=[lo,hi;...]
//   [embedding] id=..., src=..., dst=..., map="expr1; expr2"
//   [compose]   g.f=h          (identities implicit as id_<chart>)
//   [model]     kind=one-object, dim=..., box=[lo,hi;...]
//   [map]       id=..., expr="..."
//   [task]      command=..., key=value...
inline Scenario parse_scenario(std::istream& in) {
    Scenario sc;
    CategoryPresentation cat;
    bool has_cat = false;
    OneObjectModel model;
    bool has_model = false;

    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = raw;
        size_t b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        if (s[b] == '#') continue;
        if (s[b] != '[')
            throw ScenarioError("line " + std::to_string(line) + ": expected a [section]");
        size_t e = s.find(']', b);
        if (e == std::string::npos)
            throw ScenarioError("line " + std::to_string(line) + ": unterminated section name");
        std::string section = s.substr(b + 1, e - b - 1);
        std::string rest = s.substr(e + 1);

        if (section == "scenario") {
            auto f = detail::parse_fields(rest, line);
            if (f.count("name")) sc.name = f["name"];
            if (f.count("description")) sc.description = f["description"];
            // reserved: transition data other than the normal bundle's
            // Jacobians is not implemented
            if (f.count("bundle") && f["bundle"] != "normal")
                throw ScenarioError("line " + std::to_string(line) +
                                    ": only the normal bundle is supported");
        } else if (section == "chart") {
            auto f = detail::parse_fields(rest, line);
            if (!f.count("id") || !f.count("dim") || !f.count("box"))
                throw ScenarioError("line " + std::to_string(line) +
                                    ": [chart] needs id, dim, box");
            Chart c;
            c.id = f["id"];
            c.dim = std::stoi(f["dim"]);
            if (c.dim < 1 || c.dim > 4)
                throw ScenarioError("line " + std::to_string(line) +
                                    ": supported chart dimensions are 1..4");
            c.box = detail::parse_box(f["box"], line);
            cat.charts.push_back(std::move(c));
            has_cat = true;
        } else if (section == "embedding") {
            auto f = detail::parse_fields(rest, line);
            if (!f.count("id") || !f.count("src") || !f.count("dst") || !f.count("map"))
                throw ScenarioError("line " + std::to_string(line) +
                                    ": [embedding] needs id, src, dst, map");
            EmbeddingArrow a;
            a.id = f["id"];
            a.src = f["src"];
            a.dst = f["dst"];
            const Chart* src = nullptr;
            const Chart* dst = nullptr;
            for (const Chart& c : cat.charts) {
                if (c.id == a.src) src = &c;
                if (c.id == a.dst) dst = &c;
            }
            if (!src)
                throw ScenarioError("line " + std::to_string(line) +
                                    ": embedding references undeclared source chart '" + a.src +
                                    "'");
            if (!dst)
                throw ScenarioError("line " + std::to_string(line) +
                                    ": embedding references undeclared target chart '" + a.dst +
                                    "'");
            a.map.in_dim = src->dim;
            a.map.out_dim = dst->dim;
            a.map.components = detail::parse_map_components(f["map"], src->dim, line);
            a.map.domain = src->box;
            a.map.codomain = dst->box;
            cat.arrows.push_back(std::move(a));
            has_cat = true;
        } else if (section == "compose") {
            auto f = detail::parse_fields(rest, line);
            for (const auto& [key, val] : f) {
                auto dot = key.find('.');
                if (dot == std::string::npos)
                    throw ScenarioError("line " + std::to_string(line) +
                                        ": [compose] entries look like g.f=h");
                cat.table[{key.substr(0, dot), key.substr(dot + 1)}] = val;
            }
            has_cat = true;
        } else if (section == "model") {
            auto f = detail::parse_fields(rest, line);
            if (f.count("kind") && f["kind"] != "one-object")
                throw ScenarioError("line " + std::to_string(line) +
                                    ": only one-object models are supported");
            model.q = f.count("dim") ? std::stoi(f["dim"]) : 1;
            if (!f.count("box"))
                throw ScenarioError("line " + std::to_string(line) + ": [model] needs box");
            model.chart.id = "R";
            model.chart.dim = model.q;
            model.chart.box = detail::parse_box(f["box"], line);
            has_model = true;
        } else if (section == "map") {
            auto f = detail::parse_fields(rest, line);
            if (!has_model)
                throw ScenarioError("line " + std::to_string(line) +
                                    ": [map] requires a preceding [model]");
            if (!f.count("id") || !f.count("expr"))
                throw ScenarioError("line " + std::to_string(line) + ": [map] needs id, expr");
            EmbeddingArrow a;
            a.id = f["id"];
            a.src = a.dst = model.chart.id;
            a.map.in_dim = a.map.out_dim = model.q;
            a.map.components = detail::parse_map_components(f["expr"], model.q, line);
            a.map.domain = a.map.codomain = model.chart.box;
            model.maps.push_back(std::move(a));
        } else if (section == "task") {
            auto f = detail::parse_fields(rest, line);
            if (!f.count("command"))
                throw ScenarioError("line " + std::to_string(line) + ": [task] needs command");
            Task t;
            t.command = f["command"];
            f.erase("command");
            t.params = std::move(f);
            sc.tasks.push_back(std::move(t));
        } else {
            throw ScenarioError("line " + std::to_string(line) + ": unknown section [" +
                                section + "]");
        }
    }

    if (has_cat && has_model)
        throw ScenarioError("scenario mixes a category presentation with a one-object model");
    if (has_cat) {
        cat.finalize();
        sc.presentation = std::move(cat);
    } else if (has_model) {
        model.check();
        sc.model = std::move(model);
    } else {
        throw ScenarioError("scenario declares no presentation");
    }
    return sc;
}

// Loads and fully validates a scenario file; validation failures are errors.
inline Scenario load_scenario(const std::string& path, uint64_t seed = 0) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario file " + path);
    Scenario sc = parse_scenario(in);
    if (sc.name.empty()) sc.name = path;
    if (sc.presentation) {
        ValidationReport rep = validate_presentation(*sc.presentation, seed);
        if (!rep.ok) {
            std::string msg = "scenario " + sc.name + " failed validation:";
            for (const std::string& f : rep.failures) msg += "\n  - " + f;
            throw ScenarioError(msg);
        }
    }
    return sc;
}

}  // namespace leafspace

#endif
