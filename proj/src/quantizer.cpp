#include "orbitq/quantizer.hpp"

#include "orbitq/rng.hpp"

#include <algorithm>
#include <map>

namespace orbitq {

namespace {

std::vector<std::string> ring_names(int m) {
    std::vector<std::string> names;
    for (int j = 0; j < m; ++j) names.push_back("l" + std::to_string(j + 1));
    names.push_back("h");
    return names;
}

}  // namespace

Quantizer::Quantizer(const ChevalleyBasis& cb, const ParabolicDatum& pd, int depth_cap)
    : cb_(cb), pd_(pd), m_(pd.levi.m()), ring_(VarSet::make(ring_names(m_))), h_var_(m_),
      tv_(verma_basis(pd, depth_cap)), actions_(cb_, tv_, ring_), h_poly_(MultiPoly::variable(ring_, m_)) {
    for (int j = 0; j < m_; ++j) lambda_polys_.push_back(MultiPoly::variable(ring_, j));
    for (int x = 0; x < cb_.dim(); ++x) {
        GeneratorAction ga = actions_.rescaled_action(x, h_var_);
        SliceOp op;
        op.mat = ga.dense(tv_.dim(), ring_);
        op.climb = ga.climb;
        op.trust = ga.overflow_depth;
        gen_ops_.push_back(std::move(op));
    }
}

RatMatrix Quantizer::flatten(const std::vector<const Matrix<MultiPoly>*>& ops, int cols) {
    // Collect the coordinate set (row, col, exponent vector) across all ops.
    std::map<std::tuple<size_t, size_t, std::vector<int>>, size_t> index;
    for (const auto* op : ops) {
        for (size_t i = 0; i < op->rows(); ++i)
            for (size_t j = 0; j < std::min(op->cols(), static_cast<size_t>(cols)); ++j)
                for (const auto& [e, c] : op->at(i, j).terms())
                    index.emplace(std::make_tuple(i, j, e), 0);
    }
    size_t k = 0;
    for (auto& [key, v] : index) v = k++;
    RatMatrix out(ops.size(), index.size(), Rational(0));
    for (size_t r = 0; r < ops.size(); ++r) {
        const auto* op = ops[r];
        for (size_t i = 0; i < op->rows(); ++i)
            for (size_t j = 0; j < std::min(op->cols(), static_cast<size_t>(cols)); ++j)
                for (const auto& [e, c] : op->at(i, j).terms())
                    out.at(r, index.at(std::make_tuple(i, j, e))) = c;
    }
    return out;
}

std::vector<GradedSlice> Quantizer::build_slices(int d_max) {
    std::vector<GradedSlice> slices;
    GradedSlice s0;
    s0.degree = 0;
    SliceOp id;
    id.mat = Matrix<MultiPoly>::identity(tv_.dim(), MultiPoly::zero(ring_),
                                         MultiPoly::constant(ring_, Rational(1)));
    id.climb = 0;
    id.trust = tv_.depth_cap;
    s0.spanning.push_back(std::move(id));
    s0.basis_indices = {0};
    s0.rank = 1;
    s0.window = tv_.depth_cap;
    slices.push_back(std::move(s0));

    for (int d = 1; d <= d_max; ++d) {
        GradedSlice s;
        s.degree = d;
        const GradedSlice& prev = slices.back();
        for (int bi : prev.basis_indices) {
            const SliceOp& b = prev.spanning[bi];
            for (int g = 0; g < cb_.dim(); ++g) {
                SliceOp op;
                op.mat = gen_ops_[g].mat * b.mat;
                op.climb = gen_ops_[g].climb + b.climb;
                op.trust = std::min(b.trust, gen_ops_[g].trust - b.climb);
                s.spanning.push_back(std::move(op));
            }
            for (int j = 0; j < m_; ++j) {
                SliceOp op{b.mat.scaled(lambda_polys_[j]), b.climb, b.trust};
                s.spanning.push_back(std::move(op));
            }
            SliceOp op{b.mat.scaled(h_poly_), b.climb, b.trust};
            s.spanning.push_back(std::move(op));
        }
        int window = tv_.depth_cap;
        for (const auto& op : s.spanning) window = std::min(window, op.trust);
        if (window < 0)
            throw Inconclusive("build_slices: depth budget exhausted at degree " + std::to_string(d));
        s.window = window;
        int cols = tv_.count_depth_at_most(window);

        // Q-rank of flattened coefficient rows; greedy maximal independent set.
        std::vector<const Matrix<MultiPoly>*> op_ptrs;
        for (const auto& op : s.spanning) op_ptrs.push_back(&op.mat);
        RatMatrix flat = flatten(op_ptrs, cols);
        RowReducer rr;
        for (size_t r = 0; r < flat.rows(); ++r) {
            std::vector<Rational> row(flat.cols());
            for (size_t c = 0; c < flat.cols(); ++c) row[c] = flat.at(r, c);
            if (rr.add(std::move(row))) s.basis_indices.push_back(static_cast<int>(r));
        }
        s.rank = rr.rank();
        slices.push_back(std::move(s));
    }
    return slices;
}

HilbertTable Quantizer::hilbert_function(const ChevalleyBasis& cb, const ParabolicDatum& pd,
                                         int d_max, int extra_depth_budget) {
    HilbertTable tbl;
    tbl.algebra = cb.rs.type_name();
    tbl.levi = pd.levi.levi_simples;
    tbl.d_max = d_max;
    int maxh = std::max(pd.max_height(), 1);
    int d0 = std::max(2 * d_max * maxh, 2);
    auto ranks_at = [&](int depth) {
        Quantizer q(cb, pd, depth);
        std::vector<GradedSlice> slices = q.build_slices(d_max);
        std::vector<size_t> ranks;
        for (const auto& s : slices) ranks.push_back(s.rank);
        return ranks;
    };
    int cap = d0 + extra_depth_budget;
    std::vector<std::pair<int, std::vector<size_t>>> evidence;
    for (int depth = d0; depth <= cap + 4; depth += 2) {
        evidence.emplace_back(depth, ranks_at(depth));
        size_t n = evidence.size();
        if (n >= 3 && evidence[n - 1].second == evidence[n - 2].second &&
            evidence[n - 2].second == evidence[n - 3].second) {
            tbl.stabilized = true;
            tbl.depth_used = evidence[n - 3].first;
            tbl.ranks = evidence[n - 3].second;
            tbl.evidence = evidence;
            return tbl;
        }
    }
    tbl.stabilized = false;
    tbl.depth_used = evidence.back().first;
    tbl.ranks = evidence.back().second;
    tbl.evidence = evidence;
    return tbl;
}

CommutativityReport Quantizer::commutativity_mod_h() const {
    CommutativityReport rep;
    int D = tv_.depth_cap;
    for (int x = 0; x < cb_.dim(); ++x) {
        for (int y = x + 1; y < cb_.dim(); ++y) {
            Matrix<MultiPoly> comm = gen_ops_[x].mat * gen_ops_[y].mat - gen_ops_[y].mat * gen_ops_[x].mat;
            Matrix<MultiPoly> rhs(tv_.dim(), tv_.dim(), MultiPoly::zero(ring_));
            for (const auto& [b, c] : cb_.bracket(x, y))
                rhs = rhs + gen_ops_[b].mat.scaled(MultiPoly::constant(ring_, Rational(c)));
            int window = D - gen_ops_[x].climb - gen_ops_[y].climb;
            int cols = tv_.count_depth_at_most(window);
            bool zero = true;
            for (int i = 0; i < tv_.dim() && zero; ++i) {
                for (int j = 0; j < cols && zero; ++j) {
                    // (1/h) * comm must equal rhs exactly.
                    MultiPoly lhs = comm.at(i, j);
                    MultiPoly expect = rhs.at(i, j) * h_poly_;
                    if (lhs != expect) zero = false;
                }
            }
            ++rep.pairs_checked;
            if (!zero) {
                ++rep.nonzero_residuals;
                rep.offenders.emplace_back(x, y);
            }
        }
    }
    return rep;
}

MultiPoly Quantizer::leading_term_v0(const std::vector<int>& monomial) const {
    int d = static_cast<int>(monomial.size());
    // Average over all permutations (duplicates included: dividing by d!
    // symmetrizes multisets correctly).
    std::vector<int> perm = monomial;
    std::sort(perm.begin(), perm.end());
    MultiPoly acc = MultiPoly::zero(ring_);
    Rational count(0);
    do {
        // apply rightmost factor first to e_{v0}
        std::vector<MultiPoly> vec(tv_.dim(), MultiPoly::zero(ring_));
        vec[0] = MultiPoly::constant(ring_, Rational(1));
        for (int pos = d - 1; pos >= 0; --pos) {
            const Matrix<MultiPoly>& g = gen_ops_[perm[pos]].mat;
            std::vector<MultiPoly> nxt(tv_.dim(), MultiPoly::zero(ring_));
            for (int i = 0; i < tv_.dim(); ++i)
                for (int j = 0; j < tv_.dim(); ++j) {
                    if (g.at(i, j).is_zero() || vec[j].is_zero()) continue;
                    nxt[i] += g.at(i, j) * vec[j];
                }
            vec = std::move(nxt);
        }
        acc += vec[0];
        count += Rational(1);
    } while (std::next_permutation(perm.begin(), perm.end()));
    acc = acc * count.inverse();
    // h-constant part
    std::vector<int> hw(ring_->size(), 0);
    hw[h_var_] = 1;
    return acc.weighted_part(hw, 0);
}

MultiPoly Quantizer::classical_leading_term(const std::vector<int>& monomial) const {
    SymAlgebra sa(cb_);
    MultiPoly f = MultiPoly::constant(sa.ring(), Rational(1));
    for (int b : monomial) f = f * sa.coordinate(b);
    MultiPoly val = sa.evaluate_at_base_point(f, pd_.levi, lambda_ring());
    // lift into the quantizer ring (lambda variables share the first m slots)
    std::vector<int> map(static_cast<size_t>(m_));
    for (int j = 0; j < m_; ++j) map[j] = j;
    return val.lift(ring_, map);
}

VarSetPtr Quantizer::lambda_ring() const {
    std::vector<std::string> names;
    for (int j = 0; j < m_; ++j) names.push_back("l" + std::to_string(j + 1));
    return VarSet::make(names);
}

Rational Quantizer::leading_term_eval(const std::vector<int>& monomial,
                                      const std::vector<Rational>& lambda) const {
    MultiPoly p = leading_term_v0(monomial);
    std::vector<Rational> vals = lambda;
    vals.push_back(Rational(0));  // h = 0 (the h-constant part is h-free anyway)
    Rational got = p.evaluate(vals);
    Rational expect = classical_leading_term(monomial).evaluate(vals);
    if (got != expect)
        throw std::logic_error("leading_term_eval: v0-coefficient disagrees with f(lambda)");
    return got;
}

FlatnessReport Quantizer::flatness_evidence(const std::vector<GradedSlice>& slices, int trials,
                                            uint64_t seed,
                                            const std::vector<std::vector<Rational>>& extra_points) const {
    FlatnessReport rep;
    Rng rng(seed);
    std::vector<std::vector<Rational>> points;
    for (int t = 0; t < trials; ++t) {
        std::vector<Rational> pt;
        for (int j = 0; j < m_; ++j) pt.push_back(Rational(rng.nonzero(100)));
        pt.push_back(Rational(rng.nonzero(100)));
        points.push_back(std::move(pt));
    }
    for (const auto& pt : extra_points) points.push_back(pt);

    for (const auto& s : slices) {
        FlatnessDegree fd;
        fd.degree = s.degree;
        int cols = tv_.count_depth_at_most(s.window);
        // Polynomial row matrix of the slice basis ops on the window.
        PolyMatrix pm(s.basis_indices.size(), static_cast<size_t>(tv_.dim()) * cols,
                      FractionElement::zero(ring_));
        for (size_t r = 0; r < s.basis_indices.size(); ++r) {
            const Matrix<MultiPoly>& op = s.spanning[s.basis_indices[r]].mat;
            for (int i = 0; i < tv_.dim(); ++i)
                for (int j = 0; j < cols; ++j)
                    pm.at(r, static_cast<size_t>(i) * cols + j) = FractionElement(op.at(i, j));
        }
        fd.generic_rank = rank_over_fractions(pm);
        for (const auto& pt : points) {
            RatMatrix sp = specialize(pm, pt);
            fd.specialized_ranks.push_back(rank(sp));
        }
        fd.points = points;
        rep.degrees.push_back(std::move(fd));
    }
    return rep;
}

namespace {

struct SpecializedSpan {
    std::vector<RatMatrix> basis_ops;
    std::vector<Root> weights;          ///< simple-root coordinates of the ad-weight
    std::vector<int> degree_added;
    std::vector<size_t> filtered_dims;  ///< per degree 0..d_max
    int window_cols = 0;
};

std::vector<Rational> flatten_rat(const RatMatrix& m, int cols) {
    std::vector<Rational> v;
    v.reserve(m.rows() * cols);
    for (size_t i = 0; i < m.rows(); ++i)
        for (int j = 0; j < cols; ++j) v.push_back(m.at(i, j));
    return v;
}

}  // namespace

std::vector<size_t> Quantizer::specialized_filtered_dims(const std::vector<Rational>& lambda0,
                                                         const Rational& h0, int d_max) const {
    IsotypicReport rep = multiplicity_check(lambda0, h0, d_max);
    return rep.filtered_dims;
}

IsotypicReport Quantizer::multiplicity_check(const std::vector<Rational>& lambda0, const Rational& h0,
                                             int d_max) const {
    if (static_cast<int>(lambda0.size()) != m_)
        throw std::invalid_argument("multiplicity_check: lambda0 arity mismatch");
    for (const auto& l : lambda0)
        if (l.is_zero())
            throw std::invalid_argument("multiplicity_check: lambda_i must be nonzero (Lambda_L)");
    if (h0.is_zero()) throw std::invalid_argument("multiplicity_check: h0 must be nonzero");

    IsotypicReport rep;
    rep.lambda0 = lambda0;
    rep.h0 = h0;
    rep.d_max = d_max;

    std::vector<Rational> assign = lambda0;
    assign.push_back(h0);

    int maxh = std::max(pd_.max_height(), 1);
    int window = tv_.depth_cap - (d_max + 1) * maxh;
    if (window < 0) throw Inconclusive("multiplicity_check: depth budget exhausted");
    int cols = tv_.count_depth_at_most(window);

    // Specialized generator matrices.
    std::vector<RatMatrix> gens;
    for (int g = 0; g < cb_.dim(); ++g) {
        gens.push_back(gen_ops_[g].mat.map(Rational(0), [&](const MultiPoly& p) {
            return p.evaluate(assign);
        }));
    }

    SpecializedSpan span;
    span.window_cols = cols;
    RowReducer rr;
    RatMatrix id = RatMatrix::identity(tv_.dim(), Rational(0), Rational(1));
    rr.add(flatten_rat(id, cols));
    span.basis_ops.push_back(id);
    span.weights.push_back(Root(cb_.rs.rank, 0));
    span.degree_added.push_back(0);
    span.filtered_dims.push_back(1);

    size_t frontier_begin = 0, frontier_end = 1;
    for (int d = 1; d <= d_max; ++d) {
        size_t next_begin = span.basis_ops.size();
        for (size_t b = frontier_begin; b < frontier_end; ++b) {
            RatMatrix base = span.basis_ops[b];  // copy: span grows below
            Root base_w = span.weights[b];
            for (int g = 0; g < cb_.dim(); ++g) {
                RatMatrix cand = gens[g] * base;
                if (rr.add(flatten_rat(cand, cols))) {
                    Root w = base_w;
                    Root gw = cb_.weight_of(g);
                    for (int i = 0; i < cb_.rs.rank; ++i) w[i] += gw[i];
                    span.basis_ops.push_back(std::move(cand));
                    span.weights.push_back(std::move(w));
                    span.degree_added.push_back(d);
                }
            }
        }
        frontier_begin = next_begin;
        frontier_end = span.basis_ops.size();
        span.filtered_dims.push_back(span.basis_ops.size());
    }
    rep.filtered_dims = span.filtered_dims;

    // Group span elements by weight; count ad-highest-weight vectors per
    // dominant weight mu: solutions of [phi(e_i), A] = 0 within the weight
    // subspace.
    std::map<Root, std::vector<size_t>> by_weight;
    for (size_t k = 0; k < span.basis_ops.size(); ++k) by_weight[span.weights[k]].push_back(k);

    std::vector<std::pair<Weight, std::pair<long, int>>> counts;  // mu -> (n, first degree)
    for (const auto& [w, members] : by_weight) {
        // omega-coordinates of the weight
        Weight mu(cb_.rs.rank, 0);
        for (int i = 0; i < cb_.rs.rank; ++i)
            for (int j = 0; j < cb_.rs.rank; ++j) mu[i] += w[j] * cb_.rs.cartan[i][j];
        bool dominant = std::all_of(mu.begin(), mu.end(), [](int x) { return x >= 0; });
        if (!dominant) continue;

        // Constraint matrix: rows = flattened [e_i, B_k] entries, cols = k.
        size_t t = members.size();
        size_t rows = 0;
        std::vector<std::vector<Rational>> cols_data(t);
        for (size_t kk = 0; kk < t; ++kk) {
            std::vector<Rational> col;
            for (int i = 0; i < cb_.rs.rank; ++i) {
                int e = cb_.e_index(cb_.rs.root_index([&] {
                    Root r(cb_.rs.rank, 0);
                    r[i] = 1;
                    return r;
                }()));
                RatMatrix br = gens[e] * span.basis_ops[members[kk]] -
                               span.basis_ops[members[kk]] * gens[e];
                auto flat = flatten_rat(br, cols);
                col.insert(col.end(), flat.begin(), flat.end());
            }
            rows = col.size();
            cols_data[kk] = std::move(col);
        }
        RatMatrix constraint(rows, t, Rational(0));
        for (size_t kk = 0; kk < t; ++kk)
            for (size_t r = 0; r < rows; ++r) constraint.at(r, kk) = cols_data[kk][r];
        auto ker = kernel_basis(constraint);
        long n_mu = static_cast<long>(ker.size());
        if (n_mu == 0) continue;
        // first degree: smallest max-degree over the kernel's support
        int first = d_max;
        for (const auto& kv : ker) {
            int deg = 0;
            for (size_t kk = 0; kk < t; ++kk)
                if (!kv[kk].is_zero()) deg = std::max(deg, span.degree_added[members[kk]]);
            first = std::min(first, deg);
        }
        counts.push_back({mu, {n_mu, first}});
    }

    std::sort(counts.begin(), counts.end());
    for (const auto& [mu, nc] : counts) {
        IsotypicRow row;
        row.mu = mu;
        row.n_observed = nc.first;
        row.first_degree = nc.second;
        row.ell = levi_invariant_dim(cb_.rs, pd_.levi, mu);
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

}  // namespace orbitq
