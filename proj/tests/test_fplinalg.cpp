// SPDX-License-Identifier: MIT
#include <doctest.h>

#include "pirlab/fplinalg.hpp"
#include "pirlab/rng.hpp"

using namespace pirlab;

TEST_CASE("field arithmetic") {
    CHECK(is_prime(349));
    CHECK(is_prime(10007));
    CHECK_FALSE(is_prime(10005));
    CHECK_THROWS_AS(FieldPrime(12), Error);
    FieldPrime f(13);
    CHECK(f.reduce(-1) == 12);
    CHECK(f.mul(5, 8) == 1);
    CHECK(f.inv(5) == 8);
    CHECK_THROWS_AS(f.inv(0), Error);
    FieldPrime big(1000003);
    for (Residue a = 1; a < 2000; ++a) CHECK(big.mul(a, big.inv(a)) == 1);
}

TEST_CASE("determinant oracles") {
    FieldPrime f(349);
    CHECK(mat_det(Matrix(f, {{1, 2}, {3, 4}})) == f.reduce(-2));
    CHECK(mat_det(Matrix(f, {{2, 0, 0}, {0, 3, 0}, {0, 0, 5}})) == 30);
    CHECK(mat_det(Matrix(f, {{1, 2}, {2, 4}})) == 0);
    CHECK_THROWS_AS(mat_det(Matrix(2, 3, f)), Error);
}

TEST_CASE("rank, rref, null spaces") {
    FieldPrime f(7);
    Matrix m(f, {{1, 2, 3}, {2, 4, 6}, {0, 1, 1}});
    CHECK(mat_rank(m) == 2);
    auto r = mat_rref(m);
    CHECK(r.basis_change * m == r.rref);
    CHECK(r.pivots == std::vector<std::size_t>{0, 1});
    Matrix ns = null_space(m);
    CHECK(ns.rows() == 1);
    CHECK(mat_rank(m * transpose(ns)) == 0);
    Matrix lns = left_null_space(m);
    CHECK(lns.rows() == 1);
    CHECK(mat_rank(lns * m) == 0);
}

TEST_CASE("solve_left and row space intersection") {
    FieldPrime f(11);
    Matrix a(f, {{1, 0, 0}, {0, 1, 0}});
    Matrix b(f, {{3, 4, 0}});
    Matrix x = solve_left(a, b);
    CHECK(x * a == b);
    CHECK_THROWS_AS(solve_left(a, Matrix(f, {{0, 0, 1}})), Error);
    Matrix c(f, {{1, 1, 0}, {0, 0, 1}});
    CHECK(row_space_intersect(a, c).rows() == 1);
}

TEST_CASE("property: random products over F_p") {
    FieldPrime f(101);
    Rng rng(42);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng.below(6);
        Matrix a = sample_uniform(n, n, f, rng), b = sample_uniform(n, n, f, rng);
        CHECK(mat_det(a * b) == f.mul(mat_det(a), mat_det(b)));
        CHECK(mat_rank(a * b) <= std::min(mat_rank(a), mat_rank(b)));
        Matrix g = sample_full_rank(n, f, rng);
        CHECK(mat_invert(g) * g == Matrix::identity(n, f));
        auto r = mat_rref(a);
        CHECK(mat_rref(r.rref).rref == r.rref);
        CHECK(mat_rank(a) + null_space(a).rows() == n);
    }
}

TEST_CASE("echelon basis") {
    FieldPrime f(5);
    EchelonBasis e(3, f);
    CHECK(e.insert({1, 2, 3}));
    CHECK_FALSE(e.insert({2, 4, 1}));
    CHECK(e.insert({0, 1, 0}));
    CHECK_FALSE(e.insert({1, 3, 3}));
    CHECK(e.size() == 2);
}

TEST_CASE("rng determinism and bounds") {
    Rng a(7), b(7);
    for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
    Rng r(1);
    for (int i = 0; i < 1000; ++i) CHECK(r.below(3) < 3);
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(5, 9) == derive_seed(5, 9));
    auto p = r.permutation(6);
    std::sort(p.begin(), p.end());
    CHECK(p == std::vector<std::size_t>{0, 1, 2, 3, 4, 5});
}
