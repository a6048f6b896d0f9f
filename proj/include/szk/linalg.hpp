#pragma once

// Sparse-ish linear algebra over F2 (bit-packed rows) and over Z
// (Smith normal form with overflow detection). Everything here is
// deterministic: same input, same pivots, same bases.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace szk {

// Bit-packed F2 vector.
class VecF2 {
public:
    VecF2() = default;
    explicit VecF2(std::size_t n) : n_(n), w_((n + 63) / 64, 0) {}

    std::size_t size() const { return n_; }
    bool get(std::size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1; }
    void set(std::size_t i, bool b) {
        uint64_t m = uint64_t(1) << (i & 63);
        if (b) w_[i >> 6] |= m; else w_[i >> 6] &= ~m;
    }
    void flip(std::size_t i) { w_[i >> 6] ^= uint64_t(1) << (i & 63); }

    VecF2& operator^=(const VecF2& o) {
        for (std::size_t k = 0; k < w_.size(); ++k) w_[k] ^= o.w_[k];
        return *this;
    }
    bool operator==(const VecF2& o) const { return n_ == o.n_ && w_ == o.w_; }

    bool is_zero() const {
        for (uint64_t w : w_) if (w) return false;
        return true;
    }
    // Index of lowest set bit, or size() if zero.
    std::size_t lowest() const;
    int popcount() const;

    std::vector<std::size_t> support() const;

private:
    std::size_t n_ = 0;
    std::vector<uint64_t> w_;
};

// Dense bit-packed matrix over F2, row-major.
class MatF2 {
public:
    MatF2() = default;
    MatF2(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows, VecF2(cols)) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool get(std::size_t r, std::size_t c) const { return data_[r].get(c); }
    void set(std::size_t r, std::size_t c, bool b) { data_[r].set(c, b); }
    void flip(std::size_t r, std::size_t c) { data_[r].flip(c); }
    VecF2& row(std::size_t r) { return data_[r]; }
    const VecF2& row(std::size_t r) const { return data_[r]; }

    bool operator==(const MatF2& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }

    // y = M x  (x indexed by cols, result indexed by rows)
    VecF2 apply(const VecF2& x) const;
    MatF2 transpose() const;
    MatF2 multiply(const MatF2& rhs) const;  // this * rhs
    bool is_zero() const;

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<VecF2> data_;
};

int rank_f2(const MatF2& m);

// Solve M x = b over F2; empty optional when inconsistent.
std::optional<VecF2> solve_f2(const MatF2& m, const VecF2& b);

// Basis of the kernel (column-space vectors, each of length cols).
std::vector<VecF2> kernel_f2(const MatF2& m);

// Row-echelon basis of the span of the given vectors.
std::vector<VecF2> row_space_f2(const std::vector<VecF2>& vecs);

// Reusable echelonized solver for repeated solves against one matrix.
class SolverF2 {
public:
    explicit SolverF2(const MatF2& m);
    std::optional<VecF2> solve(const VecF2& b) const;
    int rank() const { return static_cast<int>(pivot_col_.size()); }

private:
    std::size_t cols_;
    std::vector<VecF2> rows_;            // echelon rows of [M | I] augmented
    std::vector<VecF2> rhs_;             // record of row operations
    std::vector<std::size_t> pivot_col_;
};

// Membership/reduction against an echelonized subspace. Supports
// incremental insertion; insert() returns false when the vector was
// already in the span (and leaves the basis unchanged).
class EchelonF2 {
public:
    explicit EchelonF2(std::size_t dim) : dim_(dim) {}
    bool insert(VecF2 v);
    // Reduce v against the basis; result has no support on pivot columns.
    VecF2 reduce(VecF2 v) const;
    bool contains(const VecF2& v) const { return reduce(v).is_zero(); }
    std::size_t rank() const { return rows_.size(); }
    std::size_t dim() const { return dim_; }
    const std::vector<VecF2>& rows() const { return rows_; }
    const std::vector<std::size_t>& pivots() const { return pivots_; }

private:
    std::size_t dim_;
    std::vector<VecF2> rows_;
    std::vector<std::size_t> pivots_;  // parallel to rows_, increasing order kept
};

// ker(d_out) / im(d_in) with canonical (echelon-reduced) representatives.
// d_in : A -> B, d_out : B -> C; the subquotient lives on B.
struct Subquotient {
    std::size_t ambient = 0;
    std::vector<VecF2> cycles;           // echelon basis of ker(d_out)
    std::vector<VecF2> boundaries;       // echelon basis of im(d_in)
    std::vector<VecF2> representatives;  // one per class, echelon-reduced mod boundaries
    std::size_t dim() const { return representatives.size(); }

    // Coordinates of a cycle v in the representative basis (mod boundaries).
    // Throws if v is not reducible to the span (i.e. not a cycle).
    VecF2 coords(const VecF2& v) const;
};

Subquotient homology_subquotient(const MatF2& d_in, const MatF2& d_out);

// --- Integer matrices and Smith normal form ---

struct SnfOverflow : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class MatZ {
public:
    MatZ() = default;
    MatZ(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    int64_t get(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    void set(std::size_t r, std::size_t c, int64_t v) { data_[r * cols_ + c] = v; }
    void add(std::size_t r, std::size_t c, int64_t v);

    MatF2 mod2() const;
    MatZ multiply(const MatZ& rhs) const;
    bool is_zero() const;

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<int64_t> data_;
};

struct SmithDecomposition {
    MatZ u, d, v;  // u * m * v = d, u and v unimodular, d diagonal
    std::vector<int64_t> invariant_factors() const;  // nonzero diagonal, divisibility chain
};

SmithDecomposition smith_normal_form(const MatZ& m);

}  // namespace szk
