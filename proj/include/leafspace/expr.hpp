#ifndef LEAFSPACE_EXPR_HPP
#define LEAFSPACE_EXPR_HPP

#include <algorithm>
#include <cctype>
#include <cmath>
#include <compare>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "leafspace/quadrature.hpp"
#include "leafspace/rational.hpp"

namespace leafspace {

struct EvalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ParseError : std::runtime_error {
    size_t position;
    ParseError(const std::string& msg, size_t pos)
        : std::runtime_error(msg + " (at offset " + std::to_string(pos) + ")"), position(pos) {}
};

// Variables are either simplex parameters t1..tk or chart coordinates x1..xq.
// Simplex parameters sort first; differential-form index tuples rely on this.
enum class VarKind : int { simplex = 0, chart = 1 };

struct Var {
    VarKind kind;
    int index;  // 1-based

    friend auto operator<=>(const Var&, const Var&) = default;
};

inline Var chart_var(int i) { return Var{VarKind::chart, i}; }
inline Var simplex_var(int i) { return Var{VarKind::simplex, i}; }

inline std::string var_name(Var v) {
    return (v.kind == VarKind::chart ? "x" : "t") + std::to_string(v.index);
}

struct VarContext {
    int chart_dim = 0;
    int simplex_dim = 0;

    bool declares(Var v) const {
        int n = v.kind == VarKind::chart ? chart_dim : simplex_dim;
        return v.index >= 1 && v.index <= n;
    }
};

// Integration region for definite-integral nodes and integrate_region.
struct Region {
    enum class Kind { box, simplex, cube, interval };
    Kind kind = Kind::box;
    // box: one (lo,hi) pair per variable. interval: single oriented pair,
    // lo > hi allowed. simplex/cube need no bounds.
    std::vector<std::pair<double, double>> bounds;

    static Region box(std::vector<std::pair<double, double>> b) {
        return Region{Kind::box, std::move(b)};
    }
    static Region simplex() { return Region{Kind::simplex, {}}; }
    static Region cube() { return Region{Kind::cube, {}}; }
    static Region interval(double a, double b) { return Region{Kind::interval, {{a, b}}}; }
};

enum class ExprKind {
    constant,
    variable,
    add,
    sub,
    mul,
    div,
    pow,
    exp_fn,
    log_fn,
    abs_fn,
    sin_fn,
    cos_fn,
    integral,
};

class Expr;

struct ExprNode {
    ExprKind kind;
    Rational value;            // constant
    Var var{VarKind::chart, 0};
    int exponent = 0;          // pow
    std::vector<Expr> kids;
    // integral payload
    std::vector<Var> int_vars;
    Region region;
    double tol = 1e-8;
};

class Expr {
  public:
    Expr() = default;

    ExprKind kind() const { return node_->kind; }
    const ExprNode& node() const { return *node_; }
    bool is_constant() const { return node_->kind == ExprKind::constant; }
    const Rational& constant_value() const { return node_->value; }
    bool is_zero() const { return is_constant() && node_->value == 0; }
    bool is_one() const { return is_constant() && node_->value == 1; }
    const std::shared_ptr<const ExprNode>& ptr() const { return node_; }

    static Expr constant(Rational r) {
        ExprNode n;
        n.kind = ExprKind::constant;
        n.value = std::move(r);
        return make(std::move(n));
    }
    static Expr constant(long v) { return constant(Rational(v)); }
    static Expr variable(Var v) {
        ExprNode n;
        n.kind = ExprKind::variable;
        n.var = v;
        return make(std::move(n));
    }

    static Expr make(ExprNode n) { return Expr(std::make_shared<const ExprNode>(std::move(n))); }

  private:
    explicit Expr(std::shared_ptr<const ExprNode> n) : node_(std::move(n)) {}
    std::shared_ptr<const ExprNode> node_ = zero_node();

    static std::shared_ptr<const ExprNode> zero_node() {
        static const std::shared_ptr<const ExprNode> z = [] {
            auto n = std::make_shared<ExprNode>();
            n->kind = ExprKind::constant;
            n->value = Rational(0);
            return std::shared_ptr<const ExprNode>(n);
        }();
        return z;
    }
};

inline bool structurally_equal(const Expr& a, const Expr& b) {
    if (a.ptr() == b.ptr()) return true;
    const ExprNode& x = a.node();
    const ExprNode& y = b.node();
    if (x.kind != y.kind) return false;
    switch (x.kind) {
        case ExprKind::constant: return x.value == y.value;
        case ExprKind::variable: return x.var == y.var;
        case ExprKind::pow:
            if (x.exponent != y.exponent) return false;
            break;
        case ExprKind::integral:
            if (x.int_vars != y.int_vars || x.region.kind != y.region.kind) return false;
            break;
        default: break;
    }
    if (x.kids.size() != y.kids.size()) return false;
    for (size_t i = 0; i < x.kids.size(); ++i)
        if (!structurally_equal(x.kids[i], y.kids[i])) return false;
    return true;
}

// --- smart constructors (conservative simplification) ---

inline Expr operator+(const Expr& a, const Expr& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.is_constant() && b.is_constant())
        return Expr::constant(a.constant_value() + b.constant_value());
    ExprNode n;
    n.kind = ExprKind::add;
    n.kids = {a, b};
    return Expr::make(std::move(n));
}

inline Expr operator-(const Expr& a, const Expr& b) {
    if (b.is_zero()) return a;
    if (a.is_constant() && b.is_constant())
        return Expr::constant(a.constant_value() - b.constant_value());
    if (structurally_equal(a, b)) return Expr::constant(0);
    ExprNode n;
    n.kind = ExprKind::sub;
    n.kids = {a, b};
    return Expr::make(std::move(n));
}

inline Expr operator*(const Expr& a, const Expr& b) {
    if (a.is_zero() || b.is_zero()) return Expr::constant(0);
    if (a.is_one()) return b;
    if (b.is_one()) return a;
    if (a.is_constant() && b.is_constant())
        return Expr::constant(a.constant_value() * b.constant_value());
    ExprNode n;
    n.kind = ExprKind::mul;
    n.kids = {a, b};
    return Expr::make(std::move(n));
}

inline Expr operator/(const Expr& a, const Expr& b) {
    if (b.is_constant()) {
        if (b.constant_value() == 0) throw EvalError("symbolic division by constant zero");
        if (a.is_constant()) return Expr::constant(a.constant_value() / b.constant_value());
        if (b.is_one()) return a;
    }
    if (a.is_zero()) return Expr::constant(0);
    ExprNode n;
    n.kind = ExprKind::div;
    n.kids = {a, b};
    return Expr::make(std::move(n));
}

inline Expr operator-(const Expr& a) { return Expr::constant(-1) * a; }

inline Expr expr_pow(const Expr& a, int e) {
    if (e == 0) return Expr::constant(1);
    if (e == 1) return a;
    if (a.is_constant()) return Expr::constant(rational_pow(a.constant_value(), e));
    ExprNode n;
    n.kind = ExprKind::pow;
    n.exponent = e;
    n.kids = {a};
    return Expr::make(std::move(n));
}

namespace detail {
inline Expr unary(ExprKind k, const Expr& a) {
    ExprNode n;
    n.kind = k;
    n.kids = {a};
    return Expr::make(std::move(n));
}
}  // namespace detail

inline Expr expr_exp(const Expr& a) {
    if (a.is_zero()) return Expr::constant(1);
    return detail::unary(ExprKind::exp_fn, a);
}
inline Expr expr_log(const Expr& a) {
    if (a.is_one()) return Expr::constant(0);
    return detail::unary(ExprKind::log_fn, a);
}
inline Expr expr_abs(const Expr& a) {
    if (a.is_constant()) return Expr::constant(abs(a.constant_value()));
    return detail::unary(ExprKind::abs_fn, a);
}
inline Expr expr_sin(const Expr& a) {
    if (a.is_zero()) return Expr::constant(0);
    return detail::unary(ExprKind::sin_fn, a);
}
inline Expr expr_cos(const Expr& a) {
    if (a.is_zero()) return Expr::constant(1);
    return detail::unary(ExprKind::cos_fn, a);
}

inline bool depends_on(const Expr& e, Var v) {
    const ExprNode& n = e.node();
    if (n.kind == ExprKind::variable) return n.var == v;
    if (n.kind == ExprKind::integral) {
        // bound variables shadow nothing here: a node never re-binds an outer
        // variable of the same name (enforced at construction)
        for (Var iv : n.int_vars)
            if (iv == v) return false;
    }
    for (const Expr& k : n.kids)
        if (depends_on(k, v)) return true;
    return false;
}

inline void collect_vars(const Expr& e, std::vector<Var>& out) {
    const ExprNode& n = e.node();
    if (n.kind == ExprKind::variable) {
        if (std::find(out.begin(), out.end(), n.var) == out.end()) out.push_back(n.var);
        return;
    }
    if (n.kind == ExprKind::integral) {
        std::vector<Var> inner;
        collect_vars(n.kids[0], inner);
        for (Var v : inner) {
            if (std::find(n.int_vars.begin(), n.int_vars.end(), v) != n.int_vars.end()) continue;
            if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
        }
        return;
    }
    for (const Expr& k : n.kids) collect_vars(k, out);
}

inline std::vector<Var> free_vars(const Expr& e) {
    std::vector<Var> out;
    collect_vars(e, out);
    std::sort(out.begin(), out.end());
    return out;
}

inline bool contains_integral(const Expr& e) {
    if (e.kind() == ExprKind::integral) return true;
    for (const Expr& k : e.node().kids)
        if (contains_integral(k)) return true;
    return false;
}

inline Expr expr_integral(const Expr& integrand, std::vector<Var> vars, Region region,
                          double tol) {
    if (tol <= 0) throw std::invalid_argument("integral node needs tol > 0");
    // reject re-binding a variable already bound by an inner integral
    std::function<void(const Expr&)> check = [&](const Expr& e) {
        const ExprNode& n = e.node();
        if (n.kind == ExprKind::integral) {
            for (Var v : vars)
                for (Var w : n.int_vars)
                    if (v == w)
                        throw std::invalid_argument(
                            "nested definite integral over the same variable: " + var_name(v));
        }
        for (const Expr& k : n.kids) check(k);
    };
    check(integrand);
    ExprNode n;
    n.kind = ExprKind::integral;
    n.kids = {integrand};
    n.int_vars = std::move(vars);
    n.region = std::move(region);
    n.tol = tol;
    return Expr::make(std::move(n));
}

// --- evaluation ---

struct EvalPoint {
    std::vector<double> chart;    // values of x1..xq
    std::vector<double> simplex;  // values of t1..tk

    double operator[](Var v) const {
        const auto& a = v.kind == VarKind::chart ? chart : simplex;
        size_t i = static_cast<size_t>(v.index - 1);
        if (i >= a.size()) throw EvalError("unbound variable " + var_name(v));
        return a[i];
    }
    void set(Var v, double value) {
        auto& a = v.kind == VarKind::chart ? chart : simplex;
        size_t i = static_cast<size_t>(v.index - 1);
        if (a.size() <= i) a.resize(i + 1, 0.0);
        a[i] = value;
    }
};

std::string to_string(const Expr& e);
double evaluate(const Expr& e, const EvalPoint& p);

inline double integrate_region(const Expr& e, const Region& region, std::span<const Var> vars,
                               const EvalPoint& outer, const QuadratureOptions& opts) {
    int dim = static_cast<int>(vars.size());
    if (dim == 0) return evaluate(e, outer);
    auto lower = [&region](int i, std::span<const double>) -> double {
        switch (region.kind) {
            case Region::Kind::box: return region.bounds[static_cast<size_t>(i)].first;
            case Region::Kind::interval: return region.bounds[0].first;
            default: return 0.0;
        }
    };
    auto upper = [&region](int i, std::span<const double> outer_coords) -> double {
        switch (region.kind) {
            case Region::Kind::box: return region.bounds[static_cast<size_t>(i)].second;
            case Region::Kind::interval: return region.bounds[0].second;
            case Region::Kind::cube: return 1.0;
            case Region::Kind::simplex: {
                double s = 0.0;
                for (double t : outer_coords) s += t;
                return 1.0 - s;
            }
        }
        return 1.0;
    };
    auto f = [&](std::span<const double> coords) -> double {
        EvalPoint p = outer;
        for (int i = 0; i < dim; ++i) p.set(vars[static_cast<size_t>(i)], coords[static_cast<size_t>(i)]);
        return evaluate(e, p);
    };
    return integrate_iterated(f, dim, lower, upper, opts);
}

inline double evaluate(const Expr& e, const EvalPoint& p) {
    const ExprNode& n = e.node();
    auto check = [&](double v) -> double {
        if (!std::isfinite(v))
            throw EvalError("non-finite value in subexpression: " + to_string(e));
        return v;
    };
    switch (n.kind) {
        case ExprKind::constant: return to_double(n.value);
        case ExprKind::variable: return p[n.var];
        case ExprKind::add: return check(evaluate(n.kids[0], p) + evaluate(n.kids[1], p));
        case ExprKind::sub: return check(evaluate(n.kids[0], p) - evaluate(n.kids[1], p));
        case ExprKind::mul: return check(evaluate(n.kids[0], p) * evaluate(n.kids[1], p));
        case ExprKind::div: {
            double denom = evaluate(n.kids[1], p);
            if (denom == 0.0) throw EvalError("division by zero in: " + to_string(e));
            return check(evaluate(n.kids[0], p) / denom);
        }
        case ExprKind::pow: return check(std::pow(evaluate(n.kids[0], p), n.exponent));
        case ExprKind::exp_fn: return check(std::exp(evaluate(n.kids[0], p)));
        case ExprKind::log_fn: {
            double v = evaluate(n.kids[0], p);
            if (v <= 0.0) throw EvalError("log of non-positive value in: " + to_string(e));
            return check(std::log(v));
        }
        case ExprKind::abs_fn: return std::abs(evaluate(n.kids[0], p));
        case ExprKind::sin_fn: return std::sin(evaluate(n.kids[0], p));
        case ExprKind::cos_fn: return std::cos(evaluate(n.kids[0], p));
        case ExprKind::integral: {
            QuadratureOptions opts;
            opts.tol = n.tol;
            opts.budget = quadrature_budget_default();
            return integrate_region(n.kids[0], n.region, n.int_vars, p, opts);
        }
    }
    throw EvalError("corrupt expression node");
}

// --- differentiation ---

inline Expr differentiate(const Expr& e, Var v) {
    const ExprNode& n = e.node();
    switch (n.kind) {
        case ExprKind::constant: return Expr::constant(0);
        case ExprKind::variable: return Expr::constant(n.var == v ? 1 : 0);
        case ExprKind::add: return differentiate(n.kids[0], v) + differentiate(n.kids[1], v);
        case ExprKind::sub: return differentiate(n.kids[0], v) - differentiate(n.kids[1], v);
        case ExprKind::mul:
            return differentiate(n.kids[0], v) * n.kids[1] +
                   n.kids[0] * differentiate(n.kids[1], v);
        case ExprKind::div: {
            const Expr& u = n.kids[0];
            const Expr& w = n.kids[1];
            return (differentiate(u, v) * w - u * differentiate(w, v)) / expr_pow(w, 2);
        }
        case ExprKind::pow: {
            const Expr& u = n.kids[0];
            return Expr::constant(n.exponent) * expr_pow(u, n.exponent - 1) *
                   differentiate(u, v);
        }
        case ExprKind::exp_fn: return e * differentiate(n.kids[0], v);
        case ExprKind::log_fn: {
            const Expr& u = n.kids[0];
            // d log|u| = u'/u, valid away from zeros of u
            if (u.kind() == ExprKind::abs_fn) {
                const Expr& w = u.node().kids[0];
                return differentiate(w, v) / w;
            }
            return differentiate(u, v) / u;
        }
        case ExprKind::abs_fn: {
            const Expr& u = n.kids[0];
            return (u / e) * differentiate(u, v);
        }
        case ExprKind::sin_fn: return expr_cos(n.kids[0]) * differentiate(n.kids[0], v);
        case ExprKind::cos_fn:
            return Expr::constant(-1) * expr_sin(n.kids[0]) * differentiate(n.kids[0], v);
        case ExprKind::integral: {
            for (Var iv : n.int_vars)
                if (iv == v)
                    throw EvalError(
                        "cannot differentiate an integral with respect to its own "
                        "integration variable " +
                        var_name(v));
            // region bounds are variable-free, so differentiation passes under
            // the integral sign
            Expr dint = differentiate(n.kids[0], v);
            if (dint.is_zero()) return Expr::constant(0);
            return expr_integral(dint, n.int_vars, n.region, n.tol);
        }
    }
    throw EvalError("corrupt expression node");
}

// --- substitution ---

inline Expr substitute(const Expr& e, const std::map<Var, Expr>& bindings) {
    const ExprNode& n = e.node();
    switch (n.kind) {
        case ExprKind::constant: return e;
        case ExprKind::variable: {
            auto it = bindings.find(n.var);
            return it == bindings.end() ? e : it->second;
        }
        case ExprKind::integral: {
            std::map<Var, Expr> inner = bindings;
            for (Var iv : n.int_vars) inner.erase(iv);
            if (inner.empty()) return e;
            Expr body = substitute(n.kids[0], inner);
            return expr_integral(body, n.int_vars, n.region, n.tol);
        }
        default: break;
    }
    std::vector<Expr> kids;
    kids.reserve(n.kids.size());
    bool changed = false;
    for (const Expr& k : n.kids) {
        kids.push_back(substitute(k, bindings));
        changed = changed || kids.back().ptr() != k.ptr();
    }
    if (!changed) return e;
    switch (n.kind) {
        case ExprKind::add: return kids[0] + kids[1];
        case ExprKind::sub: return kids[0] - kids[1];
        case ExprKind::mul: return kids[0] * kids[1];
        case ExprKind::div: return kids[0] / kids[1];
        case ExprKind::pow: return expr_pow(kids[0], n.exponent);
        case ExprKind::exp_fn: return expr_exp(kids[0]);
        case ExprKind::log_fn: return expr_log(kids[0]);
        case ExprKind::abs_fn: return expr_abs(kids[0]);
        case ExprKind::sin_fn: return expr_sin(kids[0]);
        case ExprKind::cos_fn: return expr_cos(kids[0]);
        default: break;
    }
    throw EvalError("corrupt expression node");
}

// --- printing ---

namespace detail {

inline int precedence(ExprKind k) {
    switch (k) {
        case ExprKind::add:
        case ExprKind::sub: return 1;
        case ExprKind::mul:
        case ExprKind::div: return 2;
        case ExprKind::pow: return 3;
        default: return 4;
    }
}

inline void print_expr(std::ostream& os, const Expr& e, int parent_prec) {
    const ExprNode& n = e.node();
    int prec = precedence(n.kind);
    bool parens = prec < parent_prec;
    switch (n.kind) {
        case ExprKind::constant: {
            if (n.value < 0) {
                os << '(' << n.value.get_str() << ')';
            } else {
                os << n.value.get_str();
            }
            return;
        }
        case ExprKind::variable: os << var_name(n.var); return;
        case ExprKind::add:
            if (parens) os << '(';
            print_expr(os, n.kids[0], prec);
            os << " + ";
            print_expr(os, n.kids[1], prec + 1);
            if (parens) os << ')';
            return;
        case ExprKind::sub:
            if (parens) os << '(';
            print_expr(os, n.kids[0], prec);
            os << " - ";
            print_expr(os, n.kids[1], prec + 1);
            if (parens) os << ')';
            return;
        case ExprKind::mul:
            if (parens) os << '(';
            print_expr(os, n.kids[0], prec);
            os << "*";
            print_expr(os, n.kids[1], prec + 1);
            if (parens) os << ')';
            return;
        case ExprKind::div:
            if (parens) os << '(';
            print_expr(os, n.kids[0], prec);
            os << "/";
            print_expr(os, n.kids[1], prec + 1);
            if (parens) os << ')';
            return;
        case ExprKind::pow:
            print_expr(os, n.kids[0], prec + 1);
            os << "^" << n.exponent;
            return;
        case ExprKind::exp_fn: os << "exp("; break;
        case ExprKind::log_fn: os << "log("; break;
        case ExprKind::abs_fn: os << "abs("; break;
        case ExprKind::sin_fn: os << "sin("; break;
        case ExprKind::cos_fn: os << "cos("; break;
        case ExprKind::integral: {
            os << "integral[";
            for (size_t i = 0; i < n.int_vars.size(); ++i) {
                if (i) os << ',';
                os << var_name(n.int_vars[i]);
            }
            os << "](";
            print_expr(os, n.kids[0], 0);
            os << ')';
            return;
        }
        default: break;
    }
    print_expr(os, n.kids[0], 0);
    os << ')';
}

}  // namespace detail

inline std::string to_string(const Expr& e) {
    std::ostringstream os;
    detail::print_expr(os, e, 0);
    return os.str();
}

// --- parser ---
//
// expr   := ['-'] term (('+'|'-') term)*
// term   := factor (('*'|'/') factor)*
// factor := base ('^' integer)?
// base   := number | ident | '(' expr ')' | func '(' expr ')'
// func   := exp | log | abs | sin | cos
// ident  := x1..xq | t0..tk     (t0 expands to 1 - t1 - ... - tk)
// number := decimal literal, stored exactly

namespace detail {

class Parser {
  public:
    Parser(std::string_view text, const VarContext& ctx) : text_(text), ctx_(ctx) {}

    Expr parse() {
        Expr e = parse_expr();
        skip_ws();
        if (pos_ != text_.size()) throw ParseError("unexpected trailing input", pos_);
        return e;
    }

  private:
    std::string_view text_;
    VarContext ctx_;
    size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    Expr parse_expr() {
        bool neg = false;
        skip_ws();
        if (peek() == '-') {
            ++pos_;
            neg = true;
        }
        Expr e = parse_term();
        if (neg) e = -e;
        while (true) {
            char c = peek();
            if (c == '+') {
                ++pos_;
                e = e + parse_term();
            } else if (c == '-') {
                ++pos_;
                e = e - parse_term();
            } else {
                return e;
            }
        }
    }

    Expr parse_term() {
        Expr e = parse_factor();
        while (true) {
            char c = peek();
            if (c == '*') {
                ++pos_;
                e = e * parse_factor();
            } else if (c == '/') {
                ++pos_;
                e = e / parse_factor();
            } else {
                return e;
            }
        }
    }

    Expr parse_factor() {
        Expr base = parse_base();
        if (eat('^')) {
            skip_ws();
            bool neg = eat('-');
            size_t start = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                ++pos_;
            if (pos_ == start) throw ParseError("expected integer exponent", pos_);
            int e = std::stoi(std::string(text_.substr(start, pos_ - start)));
            return expr_pow(base, neg ? -e : e);
        }
        return base;
    }

    Expr parse_base() {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            Expr e = parse_expr();
            if (!eat(')')) throw ParseError("expected ')'", pos_);
            return e;
        }
        if (c == '-') {  // unary minus on a base, e.g. 2*-x1 is rejected but -(..) handled at expr level
            throw ParseError("unexpected '-'", pos_);
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c))) return parse_ident();
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

    Expr parse_number() {
        size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
            ++pos_;
        std::string tok(text_.substr(start, pos_ - start));
        if (tok == "." || std::count(tok.begin(), tok.end(), '.') > 1)
            throw ParseError("malformed number '" + tok + "'", start);
        return Expr::constant(parse_decimal(tok));
    }

    Expr parse_ident() {
        size_t start = pos_;
        while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        std::string name(text_.substr(start, pos_ - start));
        if (name == "exp" || name == "log" || name == "abs" || name == "sin" || name == "cos") {
            if (!eat('(')) throw ParseError("expected '(' after " + name, pos_);
            Expr arg = parse_expr();
            if (!eat(')')) throw ParseError("expected ')'", pos_);
            if (name == "exp") return expr_exp(arg);
            if (name == "log") return expr_log(arg);
            if (name == "abs") return expr_abs(arg);
            if (name == "sin") return expr_sin(arg);
            return expr_cos(arg);
        }
        size_t digit_start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if ((name != "x" && name != "t") || pos_ == digit_start)
            throw ParseError("unknown identifier '" + name + "'", start);
        int idx = std::stoi(std::string(text_.substr(digit_start, pos_ - digit_start)));
        if (name == "t" && idx == 0) {
            if (ctx_.simplex_dim < 1)
                throw ParseError("undeclared variable 't0' (no simplex context)", start);
            Expr e = Expr::constant(1);
            for (int i = 1; i <= ctx_.simplex_dim; ++i) e = e - Expr::variable(simplex_var(i));
            return e;
        }
        Var v = name == "x" ? chart_var(idx) : simplex_var(idx);
        if (!ctx_.declares(v))
            throw ParseError("undeclared variable '" + var_name(v) + "'", start);
        return Expr::variable(v);
    }
};

}  // namespace detail

inline Expr parse_expr(std::string_view text, const VarContext& ctx) {
    return detail::Parser(text, ctx).parse();
}

// --- polynomial expansion over a chosen variable list ---
//
// Writes e as sum of monomials in `vars` with coefficients free of those
// variables. Fails (nullopt) when e is not polynomial in them.

struct PolyExpansion {
    // exponent vector (aligned with the var list) -> coefficient expression
    std::map<std::vector<int>, Expr> terms;
};

namespace detail {

inline bool depends_on_any(const Expr& e, std::span<const Var> vars) {
    for (Var v : vars)
        if (depends_on(e, v)) return true;
    return false;
}

inline void poly_add_term(PolyExpansion& p, std::vector<int> exps, const Expr& coeff) {
    if (coeff.is_zero()) return;
    auto it = p.terms.find(exps);
    if (it == p.terms.end()) {
        p.terms.emplace(std::move(exps), coeff);
    } else {
        it->second = it->second + coeff;
        if (it->second.is_zero()) p.terms.erase(it);
    }
}

inline PolyExpansion poly_combine(const PolyExpansion& a, const PolyExpansion& b, int sign) {
    PolyExpansion out = a;
    for (const auto& [e, c] : b.terms)
        poly_add_term(out, e, sign < 0 ? -c : c);
    return out;
}

inline PolyExpansion poly_mul(const PolyExpansion& a, const PolyExpansion& b, size_t nvars) {
    PolyExpansion out;
    for (const auto& [ea, ca] : a.terms) {
        for (const auto& [eb, cb] : b.terms) {
            std::vector<int> e(nvars);
            for (size_t i = 0; i < nvars; ++i) e[i] = ea[i] + eb[i];
            poly_add_term(out, std::move(e), ca * cb);
        }
    }
    return out;
}

inline std::optional<PolyExpansion> poly_expand_impl(const Expr& e, std::span<const Var> vars) {
    const size_t nv = vars.size();
    if (!depends_on_any(e, vars)) {
        PolyExpansion p;
        poly_add_term(p, std::vector<int>(nv, 0), e);
        return p;
    }
    const ExprNode& n = e.node();
    switch (n.kind) {
        case ExprKind::variable: {
            PolyExpansion p;
            std::vector<int> exps(nv, 0);
            for (size_t i = 0; i < nv; ++i)
                if (vars[i] == n.var) exps[i] = 1;
            poly_add_term(p, std::move(exps), Expr::constant(1));
            return p;
        }
        case ExprKind::add:
        case ExprKind::sub: {
            auto a = poly_expand_impl(n.kids[0], vars);
            auto b = poly_expand_impl(n.kids[1], vars);
            if (!a || !b) return std::nullopt;
            return poly_combine(*a, *b, n.kind == ExprKind::add ? 1 : -1);
        }
        case ExprKind::mul: {
            auto a = poly_expand_impl(n.kids[0], vars);
            auto b = poly_expand_impl(n.kids[1], vars);
            if (!a || !b) return std::nullopt;
            return poly_mul(*a, *b, nv);
        }
        case ExprKind::div: {
            if (depends_on_any(n.kids[1], vars)) return std::nullopt;
            auto a = poly_expand_impl(n.kids[0], vars);
            if (!a) return std::nullopt;
            PolyExpansion out;
            for (const auto& [exps, c] : a->terms) poly_add_term(out, exps, c / n.kids[1]);
            return out;
        }
        case ExprKind::pow: {
            if (n.exponent < 0) return std::nullopt;
            auto a = poly_expand_impl(n.kids[0], vars);
            if (!a) return std::nullopt;
            PolyExpansion acc;
            poly_add_term(acc, std::vector<int>(nv, 0), Expr::constant(1));
            for (int i = 0; i < n.exponent; ++i) acc = poly_mul(acc, *a, nv);
            return acc;
        }
        default: return std::nullopt;  // transcendental of the selected vars
    }
}

}  // namespace detail

inline std::optional<PolyExpansion> expand_polynomial(const Expr& e, std::span<const Var> vars) {
    return detail::poly_expand_impl(e, vars);
}

}  // namespace leafspace

#endif
