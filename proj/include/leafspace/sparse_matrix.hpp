#ifndef LEAFSPACE_SPARSE_MATRIX_HPP
#define LEAFSPACE_SPARSE_MATRIX_HPP

#include <algorithm>
#include <map>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "leafspace/rational.hpp"

namespace leafspace {

// Exact sparse matrix over the rationals, entries stored as coordinate
// triples. Duplicate coordinates and explicit zeros are rejected.
struct SparseRationalMatrix {
    long rows = 0;
    long cols = 0;
    std::vector<std::tuple<long, long, Rational>> entries;

    void add(long r, long c, Rational v) {
        if (v == 0) return;
        if (r < 0 || r >= rows || c < 0 || c >= cols)
            throw std::out_of_range("sparse matrix index out of range");
        entries.emplace_back(r, c, std::move(v));
    }

    bool is_zero() const { return entries.empty(); }
};

inline SparseRationalMatrix multiply(const SparseRationalMatrix& a,
                                     const SparseRationalMatrix& b) {
    if (a.cols != b.rows) throw std::invalid_argument("sparse multiply: shape mismatch");
    std::map<std::pair<long, long>, Rational> acc;
    std::vector<std::vector<std::pair<long, Rational>>> b_rows(static_cast<size_t>(b.rows));
    for (const auto& [r, c, v] : b.entries) b_rows[static_cast<size_t>(r)].push_back({c, v});
    for (const auto& [r, c, v] : a.entries) {
        for (const auto& [bc, bv] : b_rows[static_cast<size_t>(c)]) {
            Rational& slot = acc[{r, bc}];
            slot += v * bv;
        }
    }
    SparseRationalMatrix out;
    out.rows = a.rows;
    out.cols = b.cols;
    for (auto& [rc, v] : acc)
        if (v != 0) out.entries.emplace_back(rc.first, rc.second, std::move(v));
    return out;
}

inline SparseRationalMatrix transpose(const SparseRationalMatrix& a) {
    SparseRationalMatrix out;
    out.rows = a.cols;
    out.cols = a.rows;
    out.entries.reserve(a.entries.size());
    for (const auto& [r, c, v] : a.entries) out.entries.emplace_back(c, r, v);
    return out;
}

// Exact rank by fraction-free (Bareiss) elimination over the integers with
// Markowitz pivot selection. Rows are first scaled by their denominator lcm;
// the Bareiss update keeps every intermediate entry an integer minor, so the
// divisions below are exact.
inline long rank(const SparseRationalMatrix& m) {
    using Row = std::map<long, Integer>;
    std::vector<Row> rows(static_cast<size_t>(m.rows));
    for (const auto& [r, c, v] : m.entries) {
        Row& row = rows[static_cast<size_t>(r)];
        auto it = row.find(c);
        if (it != row.end()) throw std::invalid_argument("duplicate sparse entry");
        row.emplace(c, Integer(0));
    }
    {
        std::vector<Integer> scale(static_cast<size_t>(m.rows), Integer(1));
        for (const auto& [r, c, v] : m.entries) {
            Integer& s = scale[static_cast<size_t>(r)];
            s = s * v.get_den() / gcd(s, v.get_den());
        }
        for (const auto& [r, c, v] : m.entries)
            rows[static_cast<size_t>(r)][c] = v.get_num() * (scale[static_cast<size_t>(r)] / v.get_den());
    }

    std::vector<bool> row_done(static_cast<size_t>(m.rows), false);
    std::vector<long> col_count(static_cast<size_t>(m.cols), 0);
    auto recount_cols = [&]() {
        std::fill(col_count.begin(), col_count.end(), 0L);
        for (long r = 0; r < m.rows; ++r) {
            if (row_done[static_cast<size_t>(r)]) continue;
            for (const auto& [c, v] : rows[static_cast<size_t>(r)])
                if (v != 0) ++col_count[static_cast<size_t>(c)];
        }
    };

    Integer prev_pivot(1);
    long rk = 0;
    while (true) {
        recount_cols();
        long best_r = -1, best_c = -1;
        long best_score = -1;
        for (long r = 0; r < m.rows; ++r) {
            if (row_done[static_cast<size_t>(r)]) continue;
            long rn = 0;
            for (const auto& [c, v] : rows[static_cast<size_t>(r)])
                if (v != 0) ++rn;
            if (rn == 0) continue;
            for (const auto& [c, v] : rows[static_cast<size_t>(r)]) {
                if (v == 0) continue;
                long score = (rn - 1) * (col_count[static_cast<size_t>(c)] - 1);
                if (best_score < 0 || score < best_score ||
                    (score == best_score && (r < best_r || (r == best_r && c < best_c)))) {
                    best_score = score;
                    best_r = r;
                    best_c = c;
                }
            }
        }
        if (best_r < 0) break;

        const Row pivot_row = rows[static_cast<size_t>(best_r)];
        const Integer pivot = pivot_row.at(best_c);
        row_done[static_cast<size_t>(best_r)] = true;
        ++rk;

        for (long r = 0; r < m.rows; ++r) {
            if (row_done[static_cast<size_t>(r)]) continue;
            Row& row = rows[static_cast<size_t>(r)];
            Integer mult(0);
            if (auto it = row.find(best_c); it != row.end()) mult = it->second;
            // full Bareiss update (applies even where mult == 0) keeps the
            // exact-division invariant
            Row updated;
            auto apply = [&](long c, const Integer& rv, const Integer& pv) {
                Integer nv = (pivot * rv - mult * pv) / prev_pivot;
                if (nv != 0) updated.emplace(c, std::move(nv));
            };
            auto it_r = row.begin();
            auto it_p = pivot_row.begin();
            while (it_r != row.end() || it_p != pivot_row.end()) {
                if (it_p == pivot_row.end() || (it_r != row.end() && it_r->first < it_p->first)) {
                    apply(it_r->first, it_r->second, Integer(0));
                    ++it_r;
                } else if (it_r == row.end() || it_p->first < it_r->first) {
                    apply(it_p->first, Integer(0), it_p->second);
                    ++it_p;
                } else {
                    apply(it_r->first, it_r->second, it_p->second);
                    ++it_r;
                    ++it_p;
                }
            }
            updated.erase(best_c);
            row = std::move(updated);
        }
        prev_pivot = pivot;
    }
    return rk;
}

// Dense exact matrix, used where a kernel basis (not just a rank) is needed.
struct DenseRationalMatrix {
    long rows = 0, cols = 0;
    std::vector<std::vector<Rational>> a;

    DenseRationalMatrix() = default;
    DenseRationalMatrix(long r, long c)
        : rows(r), cols(c), a(static_cast<size_t>(r), std::vector<Rational>(static_cast<size_t>(c), Rational(0))) {}

    Rational& at(long r, long c) { return a[static_cast<size_t>(r)][static_cast<size_t>(c)]; }
    const Rational& at(long r, long c) const {
        return a[static_cast<size_t>(r)][static_cast<size_t>(c)];
    }
};

// Gauss-Jordan to reduced row echelon form; returns pivot columns.
inline std::vector<long> rref(DenseRationalMatrix& m) {
    std::vector<long> pivots;
    long r = 0;
    for (long c = 0; c < m.cols && r < m.rows; ++c) {
        long pr = -1;
        for (long i = r; i < m.rows; ++i)
            if (m.at(i, c) != 0) {
                pr = i;
                break;
            }
        if (pr < 0) continue;
        std::swap(m.a[static_cast<size_t>(pr)], m.a[static_cast<size_t>(r)]);
        Rational inv = Rational(1) / m.at(r, c);
        for (long j = c; j < m.cols; ++j) m.at(r, j) *= inv;
        for (long i = 0; i < m.rows; ++i) {
            if (i == r || m.at(i, c) == 0) continue;
            Rational f = m.at(i, c);
            for (long j = c; j < m.cols; ++j) m.at(i, j) -= f * m.at(r, j);
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

// Basis of the right kernel {x : Mx = 0}.
inline std::vector<std::vector<Rational>> kernel_basis(DenseRationalMatrix m) {
    std::vector<long> pivots = rref(m);
    std::vector<bool> is_pivot(static_cast<size_t>(m.cols), false);
    for (long c : pivots) is_pivot[static_cast<size_t>(c)] = true;
    std::vector<std::vector<Rational>> basis;
    for (long free_c = 0; free_c < m.cols; ++free_c) {
        if (is_pivot[static_cast<size_t>(free_c)]) continue;
        std::vector<Rational> v(static_cast<size_t>(m.cols), Rational(0));
        v[static_cast<size_t>(free_c)] = 1;
        for (size_t pi = 0; pi < pivots.size(); ++pi)
            v[static_cast<size_t>(pivots[pi])] = -m.at(static_cast<long>(pi), free_c);
        basis.push_back(std::move(v));
    }
    return basis;
}

inline long rank(DenseRationalMatrix m) { return static_cast<long>(rref(m).size()); }

}  // namespace leafspace

#endif
