#include "szk/linalg.hpp"

#include <algorithm>
#include <bit>
#include <cstdlib>

namespace szk {

std::size_t VecF2::lowest() const {
    for (std::size_t k = 0; k < w_.size(); ++k)
        if (w_[k]) return (k << 6) + std::countr_zero(w_[k]);
    return n_;
}

int VecF2::popcount() const {
    int c = 0;
    for (uint64_t w : w_) c += std::popcount(w);
    return c;
}

std::vector<std::size_t> VecF2::support() const {
    std::vector<std::size_t> s;
    for (std::size_t k = 0; k < w_.size(); ++k) {
        uint64_t w = w_[k];
        while (w) {
            s.push_back((k << 6) + std::countr_zero(w));
            w &= w - 1;
        }
    }
    return s;
}

VecF2 MatF2::apply(const VecF2& x) const {
    VecF2 y(rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        int acc = 0;
        for (std::size_t i : data_[r].support())
            acc ^= x.get(i) ? 1 : 0;
        if (acc) y.set(r, true);
    }
    return y;
}

MatF2 MatF2::transpose() const {
    MatF2 t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c : data_[r].support())
            t.set(c, r, true);
    return t;
}

MatF2 MatF2::multiply(const MatF2& rhs) const {
    MatF2 out(rows_, rhs.cols());
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t k : data_[r].support())
            out.row(r) ^= rhs.row(k);
    return out;
}

bool MatF2::is_zero() const {
    for (const auto& r : data_)
        if (!r.is_zero()) return false;
    return true;
}

int rank_f2(const MatF2& m) {
    // forward elimination only; no back-reduction needed for rank
    std::vector<VecF2> rows;
    std::vector<int> pivot_row(m.cols() + 1, -1);
    int rank = 0;
    for (std::size_t r = 0; r < m.rows(); ++r) {
        VecF2 v = m.row(r);
        for (;;) {
            std::size_t p = v.lowest();
            if (p >= m.cols()) break;
            if (pivot_row[p] >= 0) {
                v ^= rows[pivot_row[p]];
            } else {
                pivot_row[p] = static_cast<int>(rows.size());
                rows.push_back(std::move(v));
                ++rank;
                break;
            }
        }
    }
    return rank;
}

bool EchelonF2::insert(VecF2 v) {
    for (std::size_t i = 0; i < rows_.size(); ++i)
        if (v.get(pivots_[i])) v ^= rows_[i];
    if (v.is_zero()) return false;
    std::size_t p = v.lowest();
    for (std::size_t i = 0; i < rows_.size(); ++i)
        if (rows_[i].get(p)) rows_[i] ^= v;
    auto it = std::lower_bound(pivots_.begin(), pivots_.end(), p);
    std::size_t pos = it - pivots_.begin();
    pivots_.insert(it, p);
    rows_.insert(rows_.begin() + pos, std::move(v));
    return true;
}

VecF2 EchelonF2::reduce(VecF2 v) const {
    for (std::size_t i = 0; i < rows_.size(); ++i)
        if (v.get(pivots_[i])) v ^= rows_[i];
    return v;
}

SolverF2::SolverF2(const MatF2& m) : cols_(m.cols()) {
    // Echelonize the columns of M, remembering for each echelon vector the
    // combination of original columns that produced it.
    MatF2 t = m.transpose();
    std::size_t nr = t.rows();
    rows_.reserve(nr);
    rhs_.reserve(nr);
    for (std::size_t r = 0; r < nr; ++r) {
        VecF2 v = t.row(r);
        VecF2 e(cols_);
        e.set(r, true);
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            if (v.get(rows_[i].lowest())) { v ^= rows_[i]; e ^= rhs_[i]; }
        }
        if (!v.is_zero()) {
            rows_.push_back(std::move(v));
            rhs_.push_back(std::move(e));
            pivot_col_.push_back(rows_.back().lowest());
        }
    }
}

std::optional<VecF2> SolverF2::solve(const VecF2& b) const {
    VecF2 v = b;
    VecF2 x(cols_);
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        if (v.get(rows_[i].lowest())) {
            v ^= rows_[i];
            x ^= rhs_[i];
        }
    }
    if (!v.is_zero()) return std::nullopt;
    return x;
}

std::optional<VecF2> solve_f2(const MatF2& m, const VecF2& b) {
    return SolverF2(m).solve(b);
}

std::vector<VecF2> kernel_f2(const MatF2& m) {
    std::size_t nc = m.cols();
    MatF2 t = m.transpose();
    std::vector<VecF2> work, id, ker;
    for (std::size_t c = 0; c < nc; ++c) {
        VecF2 v = t.row(c);
        VecF2 e(nc);
        e.set(c, true);
        for (std::size_t i = 0; i < work.size(); ++i) {
            if (v.get(work[i].lowest())) { v ^= work[i]; e ^= id[i]; }
        }
        if (v.is_zero()) {
            ker.push_back(std::move(e));
        } else {
            work.push_back(std::move(v));
            id.push_back(std::move(e));
        }
    }
    return ker;
}

std::vector<VecF2> row_space_f2(const std::vector<VecF2>& vecs) {
    if (vecs.empty()) return {};
    EchelonF2 ech(vecs.front().size());
    for (const auto& v : vecs) ech.insert(v);
    return ech.rows();
}

VecF2 Subquotient::coords(const VecF2& v) const {
    EchelonF2 bnd(ambient);
    for (const auto& b : boundaries) bnd.insert(b);
    VecF2 rem = bnd.reduce(v);
    VecF2 out(representatives.size());
    // Representatives are echelonized and boundary-reduced, so each has a
    // pivot column the others miss.
    bool progress = true;
    while (!rem.is_zero() && progress) {
        progress = false;
        for (std::size_t i = 0; i < representatives.size(); ++i) {
            if (rem.get(representatives[i].lowest())) {
                rem ^= representatives[i];
                rem = bnd.reduce(rem);
                out.flip(i);
                progress = true;
            }
        }
    }
    if (!rem.is_zero())
        throw std::runtime_error("Subquotient::coords: vector outside the subquotient");
    return out;
}

Subquotient homology_subquotient(const MatF2& d_in, const MatF2& d_out) {
    if (!d_out.multiply(d_in).is_zero())
        throw std::runtime_error("homology_subquotient: d_out * d_in != 0");
    Subquotient sq;
    sq.ambient = d_out.cols();
    sq.cycles = row_space_f2(kernel_f2(d_out));

    EchelonF2 bnd(sq.ambient);
    for (std::size_t c = 0; c < d_in.cols(); ++c) {
        VecF2 col(sq.ambient);
        for (std::size_t r = 0; r < d_in.rows(); ++r)
            if (d_in.get(r, c)) col.set(r, true);
        bnd.insert(col);
    }
    sq.boundaries = bnd.rows();

    // Extend the boundary echelon by cycles; the new rows, reduced mod
    // boundaries, are the canonical class representatives.
    EchelonF2 ext(sq.ambient);
    for (const auto& b : sq.boundaries) ext.insert(b);
    std::vector<VecF2> reps;
    for (const auto& z : sq.cycles) {
        VecF2 r = ext.reduce(z);
        if (!r.is_zero()) {
            reps.push_back(bnd.reduce(r));
            ext.insert(r);
        }
    }
    sq.representatives = row_space_f2(reps);
    for (auto& r : sq.representatives) r = bnd.reduce(r);
    sq.representatives = row_space_f2(sq.representatives);
    return sq;
}

// ---- integer part ----

namespace {
constexpr int64_t kOverflowGuard = int64_t(1) << 60;

int64_t checked_mul(int64_t a, int64_t b) {
    if (a == 0 || b == 0) return 0;
    if (std::abs(a) > kOverflowGuard / std::abs(b))
        throw SnfOverflow("smith_normal_form: entry overflow during reduction");
    return a * b;
}
}  // namespace

void MatZ::add(std::size_t r, std::size_t c, int64_t v) {
    int64_t& e = data_[r * cols_ + c];
    e += v;
    if (std::abs(e) > kOverflowGuard)
        throw SnfOverflow("MatZ: entry overflow");
}

MatF2 MatZ::mod2() const {
    MatF2 m(rows_, cols_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c)
            if (get(r, c) & 1) m.set(r, c, true);
    return m;
}

MatZ MatZ::multiply(const MatZ& rhs) const {
    MatZ out(rows_, rhs.cols());
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t k = 0; k < cols_; ++k) {
            int64_t a = get(r, k);
            if (!a) continue;
            for (std::size_t c = 0; c < rhs.cols(); ++c) {
                int64_t b = rhs.get(k, c);
                if (!b) continue;
                out.add(r, c, checked_mul(a, b));
            }
        }
    return out;
}

bool MatZ::is_zero() const {
    for (int64_t v : data_)
        if (v) return false;
    return true;
}

std::vector<int64_t> SmithDecomposition::invariant_factors() const {
    std::vector<int64_t> f;
    std::size_t n = std::min(d.rows(), d.cols());
    for (std::size_t i = 0; i < n; ++i)
        if (d.get(i, i) != 0) f.push_back(std::abs(d.get(i, i)));
    return f;
}

SmithDecomposition smith_normal_form(const MatZ& m) {
    std::size_t nr = m.rows(), nc = m.cols();
    MatZ a = m;
    MatZ u(nr, nr), v(nc, nc);
    for (std::size_t i = 0; i < nr; ++i) u.set(i, i, 1);
    for (std::size_t i = 0; i < nc; ++i) v.set(i, i, 1);

    auto row_swap = [&](std::size_t i, std::size_t j) {
        if (i == j) return;
        for (std::size_t c = 0; c < nc; ++c) {
            int64_t t = a.get(i, c); a.set(i, c, a.get(j, c)); a.set(j, c, t);
        }
        for (std::size_t c = 0; c < nr; ++c) {
            int64_t t = u.get(i, c); u.set(i, c, u.get(j, c)); u.set(j, c, t);
        }
    };
    auto col_swap = [&](std::size_t i, std::size_t j) {
        if (i == j) return;
        for (std::size_t r = 0; r < nr; ++r) {
            int64_t t = a.get(r, i); a.set(r, i, a.get(r, j)); a.set(r, j, t);
        }
        for (std::size_t r = 0; r < nc; ++r) {
            int64_t t = v.get(r, i); v.set(r, i, v.get(r, j)); v.set(r, j, t);
        }
    };
    auto row_addmul = [&](std::size_t dst, std::size_t src, int64_t k) {
        if (!k) return;
        for (std::size_t c = 0; c < nc; ++c) a.add(dst, c, checked_mul(k, a.get(src, c)));
        for (std::size_t c = 0; c < nr; ++c) u.add(dst, c, checked_mul(k, u.get(src, c)));
    };
    auto col_addmul = [&](std::size_t dst, std::size_t src, int64_t k) {
        if (!k) return;
        for (std::size_t r = 0; r < nr; ++r) a.add(r, dst, checked_mul(k, a.get(r, src)));
        for (std::size_t r = 0; r < nc; ++r) v.add(r, dst, checked_mul(k, v.get(r, src)));
    };
    auto row_negate = [&](std::size_t i) {
        for (std::size_t c = 0; c < nc; ++c) a.set(i, c, -a.get(i, c));
        for (std::size_t c = 0; c < nr; ++c) u.set(i, c, -u.get(i, c));
    };

    std::size_t nmin = std::min(nr, nc);
    for (std::size_t t = 0; t < nmin; ++t) {
        bool block_done = false;
        while (!block_done) {
            // pivot: smallest nonzero |entry| in the remaining block
            std::size_t pr = nr, pc = nc;
            int64_t best = 0;
            for (std::size_t r = t; r < nr; ++r)
                for (std::size_t c = t; c < nc; ++c) {
                    int64_t e = std::abs(a.get(r, c));
                    if (e != 0 && (best == 0 || e < best)) { best = e; pr = r; pc = c; }
                }
            if (best == 0) { block_done = true; break; }
            row_swap(t, pr);
            col_swap(t, pc);

            bool again = false;
            for (std::size_t r = t + 1; r < nr; ++r) {
                row_addmul(r, t, -(a.get(r, t) / a.get(t, t)));
                if (a.get(r, t) != 0) again = true;  // remainder smaller than pivot
            }
            for (std::size_t c = t + 1; c < nc; ++c) {
                col_addmul(c, t, -(a.get(t, c) / a.get(t, t)));
                if (a.get(t, c) != 0) again = true;
            }
            if (again) continue;

            // pivot must divide the whole remaining block, else absorb a bad
            // row and redo; this makes the divisibility chain automatic
            bool divides = true;
            for (std::size_t r = t + 1; r < nr && divides; ++r)
                for (std::size_t c = t + 1; c < nc; ++c)
                    if (a.get(r, c) % a.get(t, t) != 0) {
                        row_addmul(t, r, 1);
                        divides = false;
                        break;
                    }
            if (divides) {
                if (a.get(t, t) < 0) row_negate(t);
                block_done = true;
            }
        }
        if (a.get(t, t) == 0) break;
    }

    return SmithDecomposition{std::move(u), std::move(a), std::move(v)};
}

}  // namespace szk
