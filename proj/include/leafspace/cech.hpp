#ifndef LEAFSPACE_CECH_HPP
#define LEAFSPACE_CECH_HPP

#include <map>
#include <string>
#include <vector>

#include "leafspace/category.hpp"
#include "leafspace/sparse_matrix.hpp"

namespace leafspace {

enum class Coefficient { trivial, orientation };
enum class Direction { cohomology, homology };

inline std::string coefficient_name(Coefficient c) {
    return c == Coefficient::trivial ? "trivial" : "orientation";
}

namespace detail {

inline std::string string_key(const NerveString& s) {
    if (s.arrows.empty()) return "@" + s.source->id;
    std::string k;
    for (const EmbeddingArrow* a : s.arrows) {
        k += a->id;
        k += '|';
    }
    return k;
}

struct NerveIndex {
    std::vector<NerveString> strings;
    std::map<std::string, long> index;

    explicit NerveIndex(std::vector<NerveString> ss) : strings(std::move(ss)) {
        for (size_t i = 0; i < strings.size(); ++i)
            index.emplace(string_key(strings[i]), static_cast<long>(i));
    }
};

inline std::map<std::string, int> arrow_signs(const CategoryPresentation& p, uint64_t seed) {
    std::map<std::string, int> signs;
    Sampler sampler(p.hash() ^ seed);
    for (const EmbeddingArrow& a : p.arrows) signs[a.id] = orientation_sign(a, sampler);
    return signs;
}

}  // namespace detail

// Matrix of the horizontal differential delta = sum (-1)^i delta_i on the
// normalized bar complex of the presentation, from degree k to degree k+1
// (cohomology) or its transpose with the same orientation twisting (homology,
// i.e. the compact-support direction).
inline SparseRationalMatrix coboundary_matrix(const CategoryPresentation& p, int k,
                                              Coefficient coeff,
                                              Direction dir = Direction::cohomology,
                                              uint64_t seed = 0) {
    detail::NerveIndex dom(enumerate_nerve(p, k));
    detail::NerveIndex cod(enumerate_nerve(p, k + 1));
    std::map<std::string, int> signs;
    if (coeff == Coefficient::orientation) signs = detail::arrow_signs(p, seed);

    SparseRationalMatrix m;
    m.rows = static_cast<long>(cod.strings.size());
    m.cols = static_cast<long>(dom.strings.size());

    std::map<std::pair<long, long>, Rational> acc;
    for (size_t row = 0; row < cod.strings.size(); ++row) {
        const NerveString& s = cod.strings[row];
        const auto& h = s.arrows;  // length k+1
        auto add = [&](const std::string& face_key, long sgn) {
            auto it = dom.index.find(face_key);
            if (it == dom.index.end())
                throw std::logic_error("nerve face not enumerated: " + face_key);
            acc[{static_cast<long>(row), it->second}] += sgn;
        };

        // delta_0: drop h1, coefficient action of h1
        {
            long action = 1;
            if (coeff == Coefficient::orientation) action = signs.at(h.front()->id);
            if (k == 0) {
                add("@" + h.front()->dst, action);
            } else {
                NerveString face{p.chart(h[1]->src), {h.begin() + 1, h.end()}};
                add(detail::string_key(face), action);
            }
        }
        // inner faces: compose adjacent arrows; identity composites are
        // degenerate and contribute zero in the normalized complex
        for (int i = 1; i <= k; ++i) {
            const EmbeddingArrow* c = p.compose(*h[static_cast<size_t>(i)], *h[static_cast<size_t>(i - 1)]);
            if (!c) throw std::logic_error("presentation not closed under composition");
            if (c->is_identity) continue;
            NerveString face;
            face.source = s.source;
            for (int j = 0; j <= k; ++j) {
                if (j == i - 1) {
                    face.arrows.push_back(c);
                } else if (j != i) {
                    face.arrows.push_back(h[static_cast<size_t>(j)]);
                }
            }
            add(detail::string_key(face), i % 2 == 0 ? 1 : -1);
        }
        // last face: forget h_{k+1}
        {
            long sgn = (k + 1) % 2 == 0 ? 1 : -1;
            if (k == 0) {
                add("@" + h.front()->src, sgn);
            } else {
                NerveString face{s.source, {h.begin(), h.end() - 1}};
                add(detail::string_key(face), sgn);
            }
        }
    }
    for (auto& [rc, v] : acc)
        if (v != 0) m.entries.emplace_back(rc.first, rc.second, std::move(v));
    return dir == Direction::cohomology ? m : transpose(m);
}

struct BettiTable {
    std::vector<long> betti;  // degrees 0..N
};

// Exact Betti numbers b_k = dim C^k - rank(delta^k) - rank(delta^{k-1}).
inline BettiTable betti(const CategoryPresentation& p, Coefficient coeff, int max_degree,
                        uint64_t seed = 0) {
    BettiTable t;
    std::vector<long> dims;
    std::vector<long> ranks;  // rank of delta^k
    for (int k = 0; k <= max_degree; ++k) {
        dims.push_back(static_cast<long>(enumerate_nerve(p, k).size()));
        ranks.push_back(rank(coboundary_matrix(p, k, coeff, Direction::cohomology, seed)));
    }
    for (int k = 0; k <= max_degree; ++k) {
        long b = dims[static_cast<size_t>(k)] - ranks[static_cast<size_t>(k)] -
                 (k > 0 ? ranks[static_cast<size_t>(k - 1)] : 0);
        t.betti.push_back(b);
    }
    return t;
}

// Homology of the transpose complex (compact supports): H_n computed from
// boundary matrices d_n = transpose(delta^{n-1}).
inline BettiTable homology(const CategoryPresentation& p, Coefficient coeff, int max_degree,
                           uint64_t seed = 0) {
    BettiTable t;
    std::vector<long> dims;
    std::vector<long> ranks;  // rank of d_{n+1}: C_{n+1} -> C_n
    for (int n = 0; n <= max_degree; ++n) {
        dims.push_back(static_cast<long>(enumerate_nerve(p, n).size()));
        ranks.push_back(rank(coboundary_matrix(p, n, coeff, Direction::homology, seed)));
    }
    for (int n = 0; n <= max_degree; ++n) {
        long b = dims[static_cast<size_t>(n)] - ranks[static_cast<size_t>(n)] -
                 (n > 0 ? ranks[static_cast<size_t>(n - 1)] : 0);
        t.betti.push_back(b);
    }
    return t;
}

struct DualityReport {
    struct Pair {
        int n;
        long orientation_cohomology;  // dim H^n(O)
        long compact_cohomology;      // dim H_c^{q-n}, via twisted homology
        bool pass;
    };
    std::vector<Pair> pairs;
    bool pass = true;
};

// Poincare-duality dimension check: H^n with orientation coefficients against
// H_c^{q-n}, the latter realized as degree-n homology of the presentation
// with orientation coefficients (each box chart contributes H^q_c = R twisted
// by orientation).
inline DualityReport duality_check(const CategoryPresentation& p, int codim, int max_degree,
                                   uint64_t seed = 0) {
    if (codim != p.dim())
        throw std::invalid_argument("duality_check: codimension must equal chart dimension");
    BettiTable lhs = betti(p, Coefficient::orientation, max_degree, seed);
    BettiTable rhs = homology(p, Coefficient::orientation, max_degree, seed);
    DualityReport rep;
    for (int n = 0; n <= max_degree; ++n) {
        long l = lhs.betti[static_cast<size_t>(n)];
        long r = rhs.betti[static_cast<size_t>(n)];
        rep.pairs.push_back({n, l, r, l == r});
        rep.pass = rep.pass && l == r;
    }
    return rep;
}

}  // namespace leafspace

#endif
