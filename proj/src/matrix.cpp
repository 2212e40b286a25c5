#include "orbitq/matrix.hpp"

#include <algorithm>

namespace orbitq {

std::vector<std::vector<Rational>> kernel_basis(const RatMatrix& m) {
    size_t nr = m.rows(), nc = m.cols();
    // Row-reduce a working copy, tracking pivot columns.
    std::vector<std::vector<Rational>> rows;
    rows.reserve(nr);
    for (size_t i = 0; i < nr; ++i) {
        std::vector<Rational> r(nc);
        for (size_t j = 0; j < nc; ++j) r[j] = m.at(i, j);
        rows.push_back(std::move(r));
    }
    std::vector<int> pivot_col;
    size_t rank_rows = 0;
    for (size_t col = 0; col < nc && rank_rows < nr; ++col) {
        size_t sel = rank_rows;
        while (sel < nr && rows[sel][col].is_zero()) ++sel;
        if (sel == nr) continue;
        std::swap(rows[sel], rows[rank_rows]);
        Rational inv = rows[rank_rows][col].inverse();
        for (auto& x : rows[rank_rows]) x *= inv;
        for (size_t i = 0; i < nr; ++i) {
            if (i == rank_rows) continue;
            Rational f = rows[i][col];
            if (f.is_zero()) continue;
            for (size_t j = col; j < nc; ++j) rows[i][j] -= f * rows[rank_rows][j];
        }
        pivot_col.push_back(static_cast<int>(col));
        ++rank_rows;
    }
    std::vector<bool> is_pivot(nc, false);
    for (int c : pivot_col) is_pivot[c] = true;
    std::vector<std::vector<Rational>> basis;
    for (size_t freec = 0; freec < nc; ++freec) {
        if (is_pivot[freec]) continue;
        std::vector<Rational> v(nc, Rational(0));
        v[freec] = Rational(1);
        for (size_t k = 0; k < pivot_col.size(); ++k) {
            v[pivot_col[k]] = -rows[k][freec];
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

bool solve(const RatMatrix& m, const std::vector<Rational>& b, std::vector<Rational>& x) {
    size_t nr = m.rows(), nc = m.cols();
    if (b.size() != nr) throw std::invalid_argument("solve: rhs size mismatch");
    std::vector<std::vector<Rational>> rows;
    rows.reserve(nr);
    for (size_t i = 0; i < nr; ++i) {
        std::vector<Rational> r(nc + 1);
        for (size_t j = 0; j < nc; ++j) r[j] = m.at(i, j);
        r[nc] = b[i];
        rows.push_back(std::move(r));
    }
    std::vector<int> pivot_col;
    size_t rank_rows = 0;
    for (size_t col = 0; col < nc && rank_rows < nr; ++col) {
        size_t sel = rank_rows;
        while (sel < nr && rows[sel][col].is_zero()) ++sel;
        if (sel == nr) continue;
        std::swap(rows[sel], rows[rank_rows]);
        Rational inv = rows[rank_rows][col].inverse();
        for (auto& v : rows[rank_rows]) v *= inv;
        for (size_t i = 0; i < nr; ++i) {
            if (i == rank_rows) continue;
            Rational f = rows[i][col];
            if (f.is_zero()) continue;
            for (size_t j = col; j <= nc; ++j) rows[i][j] -= f * rows[rank_rows][j];
        }
        pivot_col.push_back(static_cast<int>(col));
        ++rank_rows;
    }
    for (size_t i = rank_rows; i < nr; ++i)
        if (!rows[i][nc].is_zero()) return false;
    x.assign(nc, Rational(0));
    for (size_t k = 0; k < pivot_col.size(); ++k) x[pivot_col[k]] = rows[k][nc];
    return true;
}

namespace {

// Pivot preference: fewest terms, then lowest total degree.
bool better_pivot(const MultiPoly& a, const MultiPoly& b) {
    if (a.term_count() != b.term_count()) return a.term_count() < b.term_count();
    return a.total_degree() < b.total_degree();
}

struct BareissState {
    std::vector<std::vector<MultiPoly>> a;
    size_t nr, nc;
};

// Runs fraction-free elimination; returns the number of pivots and, when
// det_out is non-null (square full elimination), the determinant.
size_t bareiss_run(Matrix<MultiPoly>& mm, MultiPoly* det_out) {
    size_t nr = mm.rows(), nc = mm.cols();
    if (nr == 0 || nc == 0) {
        if (det_out) *det_out = MultiPoly();
        return 0;
    }
    VarSetPtr vars = mm.at(0, 0).vars();
    std::vector<std::vector<MultiPoly>> a(nr, std::vector<MultiPoly>(nc));
    for (size_t i = 0; i < nr; ++i)
        for (size_t j = 0; j < nc; ++j) a[i][j] = mm.at(i, j);

    MultiPoly prev = MultiPoly::constant(vars, Rational(1));
    size_t piv = 0;
    int det_sign = 1;
    size_t steps = std::min(nr, nc);
    for (size_t k = 0; k < steps; ++k) {
        // Find the "smallest" nonzero pivot in the remaining block.
        size_t bi = nr, bj = nc;
        for (size_t i = k; i < nr; ++i) {
            for (size_t j = k; j < nc; ++j) {
                if (a[i][j].is_zero()) continue;
                if (bi == nr || better_pivot(a[i][j], a[bi][bj])) {
                    bi = i;
                    bj = j;
                }
            }
        }
        if (bi == nr) break;  // remaining block is zero
        if (bi != k) {
            std::swap(a[bi], a[k]);
            det_sign = -det_sign;
        }
        if (bj != k) {
            for (size_t i = 0; i < nr; ++i) std::swap(a[i][bj], a[i][k]);
            det_sign = -det_sign;
        }
        const MultiPoly pivot = a[k][k];
        for (size_t i = k + 1; i < nr; ++i) {
            for (size_t j = k + 1; j < nc; ++j) {
                MultiPoly t = a[i][j] * pivot - a[i][k] * a[k][j];
                a[i][j] = t.is_zero() ? t : t.exact_div(prev);
            }
            a[i][k] = MultiPoly::zero(vars);
        }
        prev = pivot;
        ++piv;
    }
    if (det_out) {
        if (nr != nc) throw std::invalid_argument("bareiss_det: matrix not square");
        if (piv < nr) {
            *det_out = MultiPoly::zero(vars);
        } else {
            *det_out = det_sign > 0 ? a[nr - 1][nr - 1] : -a[nr - 1][nr - 1];
        }
    }
    return piv;
}

// Effective variables appearing anywhere in the matrix.
std::vector<size_t> effective_vars(const Matrix<MultiPoly>& m) {
    if (m.rows() == 0 || m.cols() == 0) return {};
    size_t nv = m.at(0, 0).vars() ? m.at(0, 0).vars()->size() : 0;
    std::vector<bool> used(nv, false);
    for (size_t i = 0; i < m.rows(); ++i)
        for (size_t j = 0; j < m.cols(); ++j)
            for (const auto& [e, c] : m.at(i, j).terms())
                for (size_t v = 0; v < nv; ++v)
                    if (e[v] != 0) used[v] = true;
    std::vector<size_t> out;
    for (size_t v = 0; v < nv; ++v)
        if (used[v]) out.push_back(v);
    return out;
}

size_t rank_at_point(const Matrix<MultiPoly>& m, const std::vector<Rational>& values) {
    RowReducer rr;
    for (size_t i = 0; i < m.rows(); ++i) {
        std::vector<Rational> row(m.cols());
        for (size_t j = 0; j < m.cols(); ++j) row[j] = m.at(i, j).evaluate(values);
        rr.add(std::move(row));
    }
    return rr.rank();
}

}  // namespace

size_t bareiss_rank(Matrix<MultiPoly> m) { return bareiss_run(m, nullptr); }

MultiPoly bareiss_det(Matrix<MultiPoly> m) {
    MultiPoly det;
    bareiss_run(m, &det);
    return det;
}

size_t rank_over_fractions(const PolyMatrix& m, const FractionRankOptions& opts) {
    if (m.rows() == 0 || m.cols() == 0) return 0;
    VarSetPtr vars = m.at(0, 0).vars();
    size_t nv = vars ? vars->size() : 0;

    // Clear denominators row by row (row scaling by a nonzero polynomial
    // preserves rank over the fraction field).
    Matrix<MultiPoly> p(m.rows(), m.cols(), MultiPoly::zero(vars));
    for (size_t i = 0; i < m.rows(); ++i) {
        MultiPoly row_mult = MultiPoly::constant(vars, Rational(1));
        for (size_t j = 0; j < m.cols(); ++j) {
            const MultiPoly& d = m.at(i, j).den();
            if (!d.is_constant()) row_mult = row_mult * d;
        }
        for (size_t j = 0; j < m.cols(); ++j) {
            const FractionElement& f = m.at(i, j);
            MultiPoly scaled = f.num() * row_mult;
            p.at(i, j) = f.den().is_constant()
                             ? scaled * f.den().constant_value().inverse()
                             : scaled.exact_div(f.den());
        }
    }

    auto vars_used = effective_vars(p);
    size_t steps = std::min(p.rows(), p.cols());

    if (vars_used.empty()) {
        // Constant matrix.
        std::vector<Rational> zero_vals(nv, Rational(0));
        return rank_at_point(p, zero_vals);
    }

    // Deterministic evaluation path: minors are univariate (or dehomogenize
    // to univariate) of bounded degree, so sampling beyond that bound is a
    // proof, not a heuristic.
    bool univariate = vars_used.size() == 1;
    bool bihomogeneous = false;
    int homog_deg = 0;
    if (vars_used.size() == 2) {
        bihomogeneous = true;
        std::vector<int> w(nv, 0);
        w[vars_used[0]] = 1;
        w[vars_used[1]] = 1;
        bool first = true;
        for (size_t i = 0; i < p.rows() && bihomogeneous; ++i) {
            for (size_t j = 0; j < p.cols() && bihomogeneous; ++j) {
                const MultiPoly& e = p.at(i, j);
                if (e.is_zero()) continue;
                int d = 0;
                if (!e.homogeneous(w, &d)) {
                    bihomogeneous = false;
                    break;
                }
                if (first) {
                    homog_deg = d;
                    first = false;
                } else if (d != homog_deg) {
                    bihomogeneous = false;
                }
            }
        }
    }
    if (univariate || bihomogeneous) {
        // Exponent window of the pivot variable across the whole matrix: a
        // size-r minor has at most r*(hi-lo) nonzero roots in that variable.
        size_t var = vars_used[0];
        int lo = 0, hi = 0;
        bool seen = false;
        for (size_t i = 0; i < p.rows(); ++i)
            for (size_t j = 0; j < p.cols(); ++j)
                for (const auto& [e, c] : p.at(i, j).terms()) {
                    lo = seen ? std::min(lo, e[var]) : e[var];
                    hi = seen ? std::max(hi, e[var]) : e[var];
                    seen = true;
                }
        int maxdeg = hi - lo;
        size_t points = static_cast<size_t>(maxdeg) * steps + 1;
        size_t best = 0;
        for (size_t t = 0; t < points; ++t) {
            std::vector<Rational> vals(nv, Rational(0));
            // Distinct nonzero points (Laurent variables need nonzero values).
            vals[vars_used[0]] = Rational(static_cast<long>(t) + 1);
            if (bihomogeneous) vals[vars_used[1]] = Rational(1);
            best = std::max(best, rank_at_point(p, vals));
            if (best == steps) break;
        }
        return best;
    }

    // General path: random-specialization lower bound, then fraction-free
    // elimination (authoritative).
    uint64_t s = opts.precheck_seed;
    auto next = [&s]() {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        return s;
    };
    std::vector<Rational> vals(nv);
    for (size_t v = 0; v < nv; ++v) vals[v] = Rational(static_cast<long>(next() % 1999) + 1);
    size_t lower = rank_at_point(p, vals);
    if (lower == steps) return lower;
    return bareiss_rank(p);
}

RatMatrix specialize(const PolyMatrix& m, const std::vector<Rational>& assignment) {
    RatMatrix r(m.rows(), m.cols(), Rational(0));
    for (size_t i = 0; i < m.rows(); ++i) {
        for (size_t j = 0; j < m.cols(); ++j) {
            try {
                r.at(i, j) = m.at(i, j).evaluate(assignment);
            } catch (const std::domain_error&) {
                throw std::domain_error("specialize: denominator vanishes at entry (" +
                                        std::to_string(i) + "," + std::to_string(j) + ")");
            }
        }
    }
    return r;
}

}  // namespace orbitq
