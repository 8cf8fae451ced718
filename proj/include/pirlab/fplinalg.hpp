// SPDX-License-Identifier: MIT
//
// Arithmetic over F_p (p < 2^31) and dense row-major matrices.
#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "pirlab/error.hpp"
#include "pirlab/rng.hpp"

namespace pirlab {

using Residue = std::uint32_t;

bool is_prime(std::uint64_t n);

class FieldPrime {
public:
    explicit FieldPrime(std::uint64_t p);

    Residue p() const { return p_; }

    Residue reduce(std::int64_t v) const {
        std::int64_t r = v % static_cast<std::int64_t>(p_);
        return static_cast<Residue>(r < 0 ? r + p_ : r);
    }
    Residue add(Residue a, Residue b) const {
        std::uint32_t s = a + b;
        return s >= p_ ? s - p_ : s;
    }
    Residue sub(Residue a, Residue b) const { return a >= b ? a - b : a + p_ - b; }
    Residue neg(Residue a) const { return a == 0 ? 0 : p_ - a; }
    Residue mul(Residue a, Residue b) const {
        return static_cast<Residue>(static_cast<std::uint64_t>(a) * b % p_);
    }
    Residue pow(Residue a, std::uint64_t e) const;
    Residue inv(Residue a) const;  // throws Singular on 0
    Residue uniform(Rng& rng) const { return static_cast<Residue>(rng.below(p_)); }

    bool operator==(const FieldPrime& o) const { return p_ == o.p_; }
    bool operator!=(const FieldPrime& o) const { return p_ != o.p_; }

private:
    Residue p_;
};

class Matrix {
public:
    Matrix() : f_(2) {}
    Matrix(std::size_t rows, std::size_t cols, FieldPrime f)
        : rows_(rows), cols_(cols), f_(f), a_(rows * cols, 0) {}
    // Entries given as signed integers, reduced mod p.
    Matrix(FieldPrime f, std::initializer_list<std::initializer_list<std::int64_t>> rows);
    Matrix(FieldPrime f, const std::vector<std::vector<std::int64_t>>& rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    const FieldPrime& field() const { return f_; }
    Residue p() const { return f_.p(); }

    Residue operator()(std::size_t r, std::size_t c) const { return a_[r * cols_ + c]; }
    Residue& at(std::size_t r, std::size_t c) { return a_[r * cols_ + c]; }
    void set(std::size_t r, std::size_t c, std::int64_t v) { a_[r * cols_ + c] = f_.reduce(v); }

    const Residue* row_ptr(std::size_t r) const { return a_.data() + r * cols_; }
    Residue* row_ptr(std::size_t r) { return a_.data() + r * cols_; }
    std::vector<Residue> row(std::size_t r) const;
    const std::vector<Residue>& data() const { return a_; }

    static Matrix identity(std::size_t n, FieldPrime f);
    static Matrix from_rows(FieldPrime f, const std::vector<std::vector<Residue>>& rows,
                            std::size_t cols);

    bool operator==(const Matrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && f_ == o.f_ && a_ == o.a_;
    }
    bool operator!=(const Matrix& o) const { return !(*this == o); }

    std::string to_string() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    FieldPrime f_;
    std::vector<Residue> a_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix scale(const Matrix& a, Residue s);
Matrix transpose(const Matrix& m);
Matrix vstack(const Matrix& a, const Matrix& b);
Matrix vstack(const std::vector<Matrix>& parts);
Matrix hstack(const Matrix& a, const Matrix& b);
Matrix block_diag(const std::vector<Matrix>& blocks);
Matrix select_rows(const Matrix& m, const std::vector<std::size_t>& idx);
Matrix first_rows(const Matrix& m, std::size_t k);
Matrix column_vector(FieldPrime f, const std::vector<Residue>& v);
std::vector<Residue> mat_vec(const Matrix& m, const std::vector<Residue>& v);

struct RrefResult {
    Matrix rref;
    Matrix basis_change;              // invertible, basis_change * m == rref
    std::vector<std::size_t> pivots;  // pivot column of each nonzero row
};

std::size_t mat_rank(const Matrix& m);
Residue mat_det(const Matrix& m);
RrefResult mat_rref(const Matrix& m);
// Reduced form only, zero rows dropped.
Matrix row_basis(const Matrix& m);
Matrix mat_invert(const Matrix& m);
// Rows spanning {x : m x = 0}, canonical order (by free column).
Matrix null_space(const Matrix& m);
// Rows spanning {y : y m = 0}.
Matrix left_null_space(const Matrix& m);
Matrix row_space_intersect(const Matrix& a, const Matrix& b);
// X with X * a == b; throws Singular if some row of b is outside rowspace(a).
Matrix solve_left(const Matrix& a, const Matrix& b);
Matrix sample_uniform(std::size_t rows, std::size_t cols, const FieldPrime& f, Rng& rng);
Matrix sample_full_rank(std::size_t n, const FieldPrime& f, Rng& rng);

// Incremental echelon basis used by rank searches.
class EchelonBasis {
public:
    explicit EchelonBasis(std::size_t cols, FieldPrime f) : cols_(cols), f_(f) {}
    // Reduces v against the basis in place; returns true if a nonzero remainder was added.
    bool insert(std::vector<Residue> v);
    void reduce(std::vector<Residue>& v) const;
    std::size_t size() const { return rows_.size(); }
    std::size_t cols() const { return cols_; }

private:
    std::size_t cols_;
    FieldPrime f_;
    std::vector<std::vector<Residue>> rows_;  // each normalized, leading 1 at pivots_[i]
    std::vector<std::size_t> pivots_;
};

}  // namespace pirlab
