#ifndef LEAFSPACE_RATIONAL_HPP
#define LEAFSPACE_RATIONAL_HPP

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace leafspace {

// Exact rational scalar. mpq_class does not canonicalize on construction,
// so all entry points go through make_rational / parse_decimal.
using Rational = mpq_class;
using Integer = mpz_class;

inline Rational make_rational(long num, long den = 1) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    Rational r(num, den);
    r.canonicalize();
    return r;
}

inline Rational make_rational(const Integer& num, const Integer& den) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    Rational r(num, den);
    r.canonicalize();
    return r;
}

inline double to_double(const Rational& r) { return r.get_d(); }

inline bool is_integer(const Rational& r) { return r.get_den() == 1; }

// Parses "123" or "12.75" into an exact rational.
inline Rational parse_decimal(const std::string& text) {
    auto dot = text.find('.');
    if (dot == std::string::npos) {
        return Rational(Integer(text, 10));
    }
    std::string whole = text.substr(0, dot);
    std::string frac = text.substr(dot + 1);
    if (frac.empty()) return Rational(Integer(whole.empty() ? "0" : whole, 10));
    Integer num(whole.empty() ? "0" : whole, 10);
    Integer den(1);
    for (size_t i = 0; i < frac.size(); ++i) den *= 10;
    num = num * den + Integer(frac, 10);
    return make_rational(num, den);
}

inline Rational rational_pow(const Rational& base, long e) {
    if (e == 0) return Rational(1);
    if (base == 0 && e < 0) throw std::domain_error("0 raised to negative power");
    Rational acc(1);
    Rational b = base;
    unsigned long n = e < 0 ? static_cast<unsigned long>(-e) : static_cast<unsigned long>(e);
    while (n > 0) {
        if (n & 1) acc *= b;
        b *= b;
        n >>= 1;
    }
    if (e < 0) return Rational(1) / acc;
    return acc;
}

inline Integer factorial(unsigned n) {
    Integer f(1);
    for (unsigned i = 2; i <= n; ++i) f *= static_cast<long>(i);
    return f;
}

// exact value of the simplex moment: integral over the standard k-simplex
// {t_i >= 0, sum t_i <= 1} of t_1^{a_1} ... t_k^{a_k}.
inline Rational simplex_moment(const std::vector<int>& exps) {
    Integer num(1);
    unsigned total = static_cast<unsigned>(exps.size());
    for (int a : exps) {
        num *= factorial(static_cast<unsigned>(a));
        total += static_cast<unsigned>(a);
    }
    return make_rational(num, factorial(total));
}

}  // namespace leafspace

#endif
