// SPDX-License-Identifier: MIT
#include <doctest.h>

#include "pirlab/capacity.hpp"
#include "pirlab/scheme.hpp"

using namespace pirlab;

namespace {

Rational theorem3(std::size_t n, std::size_t t) {
    return capacity_formula(CapacityKind::Theorem3, {2, n, t, n - 1});
}

}  // namespace

TEST_CASE("declared rates") {
    CHECK(declared_rate(registry_build("ctrex-2422")) == make_rational(3, 5));
    CHECK(declared_rate(registry_build("ctrex-2422")) > capacity_formula(CapacityKind::FghkConjecture, {2, 4, 2, 2}));
    CHECK(declared_rate(registry_build("class-t2")) == theorem3(4, 2));
    CHECK(declared_rate(registry_build("class-t2(3)")) == theorem3(3, 2));
    CHECK(declared_rate(registry_build("class-t2(5)")) == theorem3(5, 2));
    CHECK(declared_rate(registry_build("class-tgen")) == theorem3(4, 3));
    CHECK(declared_rate(registry_build("class-tgen(5,3)")) == theorem3(5, 3));
    CHECK(declared_rate(registry_build("class-tgen(5,4)")) == theorem3(5, 4));
    CHECK(declared_rate(registry_build("tab-2322")) == theorem3(3, 2));
    CHECK(declared_rate(registry_build("tab-2432")) == outer_bound_general(2, 4, 3, 2));
    CHECK(declared_rate(registry_build("cyclic-2422")) == outer_bound_2422_family(2));
    CHECK(declared_rate(registry_build("disjoint-2423")) == capacity_formula(CapacityKind::MdsPir, {2, 4, 1, 3}));
    CHECK(declared_rate(registry_build("ex1-restricted")) == capacity_formula(CapacityKind::MdsPir, {2, 4, 1, 2}));
    CHECK(declared_rate(registry_build("ex2-restricted")) == make_rational(4, 7));
    CHECK(declared_rate(registry_build("baseline-download-all")) == make_rational(1, 2));
}

TEST_CASE("download accounting") {
    SchemeInstance c = registry_build("ctrex-2422");
    CHECK(c.download == std::vector<std::size_t>{5, 5, 5, 5});
    CHECK(c.total_download() == 20);
    CHECK(registry_build("tab-2432").download == std::vector<std::size_t>{2, 2, 2, 1});
    CHECK(registry_build("tab-2322").total_download() == 11);
    CHECK(registry_build("class-t2").total_download() == 44);
    SchemeInstance g = registry_build("class-tgen");
    CHECK(g.params.message_len() == 12 * g.params.replicas);
    CHECK(g.total_download() == 23 * g.params.replicas);
}

TEST_CASE("registry errors") {
    CHECK_THROWS_AS(registry_build("nope"), Error);
    CHECK_THROWS_AS(registry_build("class-tgen(4,4)"), Error);
    SchemeOverrides ov;
    ov.p = 7;
    CHECK_THROWS_AS(registry_build("tab-2322", ov), Error);
}

TEST_CASE("mixing function keeps desired and interference separable") {
    FieldPrime f(349);
    Matrix m = mix_matrix(3, 2, f);
    CHECK(m == Matrix(f, {{1, 0, 0, 0, 0, 0}, {0, 1, 0, 0, 0, 0}, {0, 0, 0, 1, 0, 0}, {0, 0, 0, 0, 1, 0},
                          {0, 0, 1, 0, 0, 1}}));
}

TEST_CASE("F_13 table: (1,3,1) gives i4 = 4") {
    CHECK(tab2432_i4(1, 3, 1) == 4);
    CHECK_THROWS_AS(tab2432_i4(3, 3, 1), Error);
}

TEST_CASE("property: structured and generic decoders agree") {
    for (const std::string id : {"ctrex-2422", "class-t2", "class-tgen", "cyclic-2422", "ex1-restricted",
                                 "ex2-restricted", "baseline-download-all", "class-t2(3)"}) {
        SchemeInstance s = registry_build(id);
        Rng rng(derive_seed(99, id.size()));
        for (int trial = 0; trial < 10; ++trial) {
            const std::size_t theta = 1 + trial % 2;
            auto msgs = random_messages(s, rng);
            QueryPlan plan = gen_queries(s, theta, rng);
            AnswerSet ans = collect_answers(s, plan, encode(s.code, msgs));
            INFO(id);
            CHECK(ans.download_count == s.total_download());
            CHECK(decode(s, plan, ans) == msgs[theta - 1]);
            CHECK(decode_generic(s, plan, ans) == msgs[theta - 1]);
        }
    }
}

TEST_CASE("property: query plans are reproducible from the secret") {
    SchemeInstance s = registry_build("ctrex-2422");
    Rng rng(4);
    SessionSecret sec = draw_secret(s, rng);
    QueryPlan a = build_plan(s, 1, sec), b = build_plan(s, 1, sec);
    for (std::size_t n = 0; n < 4; ++n) {
        CHECK(a.servers[n].q[0] == b.servers[n].q[0]);
        CHECK(a.servers[n].q[1] == b.servers[n].q[1]);
    }
}

TEST_CASE("disjoint collusion scheme: desired symbols span fewer than L dimensions") {
    // Servers 1-2 and 3-4 see three-vector subspaces of F_p^4 that meet in two
    // dimensions, so the 12 desired symbols span only 10.
    SchemeInstance s = registry_build("disjoint-2423");
    Rng rng(1);
    QueryPlan plan = gen_queries(s, 1, rng);
    std::vector<Matrix> rows;
    for (std::size_t n = 0; n < 4; ++n) rows.push_back(message_rows(s, plan, n, 0));
    CHECK(mat_rank(vstack(rows)) == 10 * s.params.replicas);
}
