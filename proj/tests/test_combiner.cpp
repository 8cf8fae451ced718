// SPDX-License-Identifier: MIT
#include <doctest.h>

#include "pirlab/scheme.hpp"

using namespace pirlab;

namespace {

// Directly downloaded interference of the realization shown with the explicit
// F_349 combiners, over the basis U0x, U6x, U0y, U9y, U1(x+y), U3(x+y), U2(x+2y), U4(x+2y).
Matrix ctrex_reference_c(const SchemeInstance& s) {
    const auto id = identity_realization(s.st);
    const std::vector<std::vector<std::size_t>> pick = {{0, 1}, {0, 2}, {1, 2}, {1, 2}};
    std::vector<Matrix> rows;
    for (std::size_t n = 0; n < 4; ++n) rows.push_back(select_rows(undesired_atoms(s.st, s.code, n, id[n]), pick[n]));
    const Realization r = {{{0, 1, 2}}, {{0, 2, 1}}, {{1, 2, 0}}, {{1, 2, 0}}};
    return interference_matrix(*s.combiner, s.st, s.code, r, vstack(rows));
}

}  // namespace

TEST_CASE("explicit F_349 combiners: det 321 and all 1296 realizations") {
    SchemeInstance s = registry_build("ctrex-2422");
    REQUIRE(s.combiner);
    CHECK(s.combiner->provenance == "explicit-f349");
    Matrix c = ctrex_reference_c(s);
    Matrix expected(s.field(), {{1, 2, 0, -3, 0, 3, 0, 3},
                                {6, 5, 0, -4, 0, 4, 0, 4},
                                {0, -3, 1, 7, 3, 0, 3, 0},
                                {0, -8, 11, 9, 8, 0, 8, 0},
                                {8, 0, 8, 0, 1, 10, 0, 0},
                                {4, 0, 4, 0, 7, 5, 0, 0},
                                {5, 0, 10, 0, 0, 0, 1, 3},
                                {3, 0, 6, 0, 0, 0, 12, 9}});
    CHECK(c == expected);
    CHECK(mat_det(c) == 321);
    CombinerReport rep = verify_combiner(*s.combiner, s.st, s.code);
    CHECK(rep.p1);
    CHECK(rep.mode == "exhaustive");
    CHECK(rep.checked == 1296);
    CHECK(rep.failing == 0);
    CHECK(rep.pass);
}

TEST_CASE("P2 verdict does not depend on the interference basis") {
    SchemeInstance s = registry_build("ctrex-2422");
    Matrix c = ctrex_reference_c(s);
    Rng rng(5);
    Matrix g = sample_full_rank(8, s.field(), rng);
    // a change of basis multiplies the matrix by an invertible one
    CHECK((mat_det(c * g) != 0) == (mat_det(c) != 0));
}

TEST_CASE("combiner with a zero row fails P1") {
    SchemeInstance s = registry_build("ctrex-2422");
    CombinerSet cs = *s.combiner;
    for (std::size_t j = 0; j < 3; ++j) cs.c[1].at(1, j) = 0;
    CombinerReport rep = verify_combiner(cs, s.st, s.code);
    CHECK_FALSE(rep.p1);
    CHECK_FALSE(rep.pass);
    CHECK(rep.singular_servers == std::vector<std::size_t>{1});
}

TEST_CASE("combiners making the interference matrix the identity pass") {
    SchemeInstance s = registry_build("ctrex-2422");
    const auto id = identity_realization(s.st);
    // C_n permutes the queried symbols so that the direct rows are the chosen basis atoms
    const std::vector<std::vector<std::size_t>> pick = {{0, 1, 2}, {0, 2, 1}, {1, 2, 0}, {1, 2, 0}};
    CombinerSet cs;
    cs.direct = {2, 2, 2, 2};
    cs.provenance = "test";
    std::vector<Matrix> rows;
    for (std::size_t n = 0; n < 4; ++n) {
        Matrix c(3, 3, s.field());
        for (std::size_t i = 0; i < 3; ++i) c.at(i, pick[n][i]) = 1;
        cs.c.push_back(c);
        rows.push_back(select_rows(undesired_atoms(s.st, s.code, n, id[n]), {pick[n][0], pick[n][1]}));
    }
    Matrix basis = vstack(rows);
    REQUIRE(mat_rank(basis) == 8);
    CHECK(interference_matrix(cs, s.st, s.code, id, basis) == Matrix::identity(8, s.field()));
}

TEST_CASE("search over F_2 is exhausted for the counterexample structure") {
    SchemeOverrides ov;
    ov.p = 2;
    ov.build_combiner = false;
    SchemeInstance s = registry_build("ctrex-2422", ov);
    Rng rng(1);
    CHECK_THROWS_AS(search_combiner(s.st, s.code, s.field(), rng, 50, CombinerShape::Dense), Error);
}

TEST_CASE("search is deterministic in the seed") {
    SchemeOverrides ov;
    ov.p = 10007;
    ov.build_combiner = false;
    SchemeInstance s = registry_build("class-t2", ov);
    Rng a(17), b(17);
    SearchResult x = search_combiner(s.st, s.code, s.field(), a, 16, CombinerShape::ReplicaBlock);
    SearchResult y = search_combiner(s.st, s.code, s.field(), b, 16, CombinerShape::ReplicaBlock);
    CHECK(x.set.c == y.set.c);
    CHECK(x.set.tries == y.set.tries);
    CHECK(x.report.pass);
}

TEST_CASE("success rate: uniform combiners pass with frequency above 0.99 at p = 10007") {
    // Schwartz-Zippel heuristic; measured per registry scheme with a combiner.
    for (const std::string& id : registry_ids()) {
        if (id.starts_with("tab-")) continue;  // fixed small fields, no combiner
        SchemeOverrides ov;
        ov.p = 10007;
        ov.build_combiner = false;
        SchemeInstance s = registry_build(id, ov);
        const CombinerShape shape = s.st.replicas > 1 ? CombinerShape::ReplicaBlock : CombinerShape::Dense;
        Rng rng(9);
        std::size_t ok = 0;
        const std::size_t tries = 1000;
        for (std::size_t i = 0; i < tries; ++i)
            ok += verify_combiner(random_combiner(s.st, s.field(), rng, shape), s.st, s.code).pass;
        INFO(id << ": " << ok << "/" << tries);
        CHECK(static_cast<double>(ok) / tries > 0.99);
    }
}

TEST_CASE("reference P matrix and its common vectors") {
    FieldPrime f(10007);
    PMatrix pm = reference_p_matrix_4_3(f);
    auto vec = [&](std::initializer_list<std::int64_t> v) {
        std::vector<Residue> out;
        for (auto x : v) out.push_back(f.reduce(x));
        return out;
    };
    CHECK(pm.common.at({0, 1}) == vec({1, 1, 0}));
    CHECK(pm.common.at({0, 2}) == vec({1, -1, 0}));
    CHECK(pm.common.at({0, 3}) == vec({1, 0, 0}));
    CHECK(pm.common.at({1, 2}) == vec({1, 1, 2}));
    CHECK(pm.common.at({1, 3}) == vec({1, 1, 1}));
    CHECK(pm.common.at({2, 3}) == vec({0, 1, 1}));
    // every triple of servers gives three independent common vectors
    for (std::size_t drop = 0; drop < 4; ++drop) {
        std::vector<std::size_t> t;
        for (std::size_t j = 0; j < 4; ++j)
            if (j != drop) t.push_back(j);
        std::vector<std::vector<Residue>> rows = {pm.common.at({t[0], t[1]}), pm.common.at({t[0], t[2]}),
                                                  pm.common.at({t[1], t[2]})};
        CHECK(mat_rank(Matrix::from_rows(f, rows, 3)) == 3);
    }
}

TEST_CASE("P matrix with two equal blocks is rejected") {
    FieldPrime f(101);
    Matrix p(f, {{1, 0, 0}, {0, 1, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 0}, {1, 1, 1}, {1, 2, 2}});
    CHECK_THROWS_AS(common_vector(p, 4, 3, {0, 1}), Error);
    CHECK_THROWS_AS(make_p_matrix(p, 4, 3), Error);
}

TEST_CASE("property: sampled P matrices satisfy both properties") {
    FieldPrime f(101);
    Rng rng(23);
    for (auto [n, t] : std::vector<std::pair<std::size_t, std::size_t>>{{4, 3}, {5, 3}, {5, 4}, {6, 3}}) {
        PMatrix pm = build_p_matrix(n, t, f, rng, 64);
        CHECK(pm.p.rows() == n * (t - 1));
        for (const auto& [subset, m] : pm.common) {
            CHECK(subset.size() == t - 1);
            CHECK(std::any_of(m.begin(), m.end(), [](Residue x) { return x != 0; }));
            for (auto j : subset) CHECK(mat_rank(vstack(pm.block(j), Matrix::from_rows(f, {m}, t))) == t - 1);
        }
    }
}
