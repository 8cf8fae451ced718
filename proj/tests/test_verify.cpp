// SPDX-License-Identifier: MIT
#include <doctest.h>

#include "pirlab/verify.hpp"

using namespace pirlab;

TEST_CASE("tabular schemes: exhaustive correctness") {
    for (const std::string id : {"tab-2322", "tab-2432"}) {
        CorrectnessReport r = check_correctness_exhaustive(registry_build(id), 8, 1);
        INFO(id);
        CHECK(r.pass);
        CHECK(r.failures == 0);
        CHECK(r.download_mismatches == 0);
        CHECK(r.mode == "exhaustive");
    }
    CHECK_THROWS_AS(check_correctness_exhaustive(registry_build("ctrex-2422"), 1, 1), Error);
}

TEST_CASE("tabular schemes: every collusion view has identical distributions") {
    for (const std::string id : {"tab-2322", "tab-2432"}) {
        SchemeInstance s = registry_build(id);
        PrivacyReport r = check_privacy_exhaustive(s, s.params.collusion_sets);
        INFO(id);
        CHECK(r.pass);
        REQUIRE(r.sets.size() == s.params.collusion_sets.size());
        for (const auto& set : r.sets) {
            CHECK(set.tv == 0);
            CHECK(set.verdict == "identical");
        }
    }
}

TEST_CASE("restricted scheme at p = 2: declared sets private, a non-declared pair is not") {
    SchemeOverrides ov;
    ov.p = 2;
    SchemeInstance s = registry_build("ex1-restricted", ov);
    PrivacyReport declared = check_privacy_exhaustive(s, s.params.collusion_sets);
    CHECK(declared.pass);
    for (const auto& set : declared.sets) CHECK(set.tv == 0);
    PrivacyReport mutated = check_privacy_exhaustive(s, {{0, 2}});
    CHECK_FALSE(mutated.pass);
    CHECK(mutated.sets[0].tv > 0);
}

TEST_CASE("exhaustive privacy refuses large randomness spaces") {
    CHECK_THROWS_AS(check_privacy_exhaustive(registry_build("ctrex-2422"), {{0, 1}}), Error);
}

TEST_CASE("statistical privacy") {
    SchemeOverrides ov;
    ov.p = 3;
    ov.build_combiner = false;
    SUBCASE("declared sets are consistent") {
        SchemeInstance s = registry_build("ctrex-2422", ov);
        PrivacyReport r = check_privacy_statistical(s, {{0, 1}, {2, 3}}, 10000, 7);
        CHECK(r.pass);
        for (const auto& set : r.sets) CHECK(set.verdict == "consistent");
    }
    SUBCASE("a pair outside the cyclic collusion pattern is rejected") {
        SchemeInstance s = registry_build("cyclic-2422", ov);
        PrivacyReport r = check_privacy_statistical(s, {{0, 2}}, 10000, 7);
        CHECK_FALSE(r.pass);
        CHECK(r.sets[0].verdict == "reject");
    }
    SUBCASE("too few samples") {
        SchemeInstance s = registry_build("ctrex-2422", ov);
        try {
            check_privacy_statistical(s, {{0, 1}}, 9999, 7);
            FAIL("expected BadParams");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::BadParams);
        }
    }
}

TEST_CASE("dimension check for the counterexample scheme") {
    DimensionReport r = check_dimensions(registry_build("ctrex-2422"), 3, 5);
    CHECK(r.pass);
    CHECK(r.expected_desired == 12);
    CHECK(r.expected_interference == 8);
    CHECK(r.desired_min == 12);
    CHECK(r.interference_max == 8);
}

TEST_CASE("F_13 table: all sixteen dimension facts hold") {
    auto cases = f13_dimension_cases(code_f13_4server());
    REQUIRE(cases.size() == 16);
    for (const auto& c : cases) {
        CHECK(c.ok);
        if (c.which == 'i') {
            CHECK(c.dim4 == 4);
            CHECK(c.dim4p == 3);
        } else {
            CHECK(c.dim4 == 3);
            CHECK(c.dim4p == 4);
        }
    }
}

TEST_CASE("linear audit of the counterexample scheme is tight") {
    AuditReport r = audit_scheme(registry_build("ctrex-2422"), 1);
    CHECK_FALSE(r.status);
    CHECK(r.d == 3);
    CHECK(r.epsilon_l == 0);
    CHECK(r.alpha_d == 1);
    REQUIRE(r.inequality_holds);
    CHECK(*r.inequality_holds);
    CHECK(r.tight);
}

TEST_CASE("linear audit flags identical row spaces") {
    FieldPrime f(349);
    Matrix q(f, {{1, 0, 0, 0, 0, 0}, {0, 1, 0, 0, 0, 0}, {0, 0, 1, 0, 0, 0}});
    AuditReport r = audit_linear({q, q, q, q}, 12);
    CHECK(r.alpha_d == 3);
    REQUIRE(r.inequality_holds);
    CHECK_FALSE(*r.inequality_holds);
}

TEST_CASE("linear audit reports asymmetric query ranks") {
    FieldPrime f(349);
    Matrix a(f, {{1, 0, 0, 0}, {0, 1, 0, 0}});
    Matrix b(f, {{0, 0, 1, 0}});
    AuditReport r = audit_linear({a, a, a, b}, 8);
    REQUIRE(r.status);
    CHECK(*r.status == Errc::AsymmetryDetected);
    CHECK_FALSE(r.inequality_holds);
}

TEST_CASE("sampled correctness is reproducible and thread-count independent") {
    SchemeInstance s = registry_build("class-t2");
    CorrectnessReport a = check_correctness(s, 40, 5, 1);
    CorrectnessReport b = check_correctness(s, 40, 5, 4);
    CHECK(a.pass);
    CHECK(a.failures == b.failures);
    CHECK(a.trials == 40);
}

TEST_CASE("epsilon-error scheme stays under one percent failures") {
    CorrectnessReport r = check_correctness(registry_build("class-tgen"), 200, 2, 2);
    CHECK(r.pass);
    CHECK(r.failures * 100 < r.trials);
}

TEST_CASE("linear audit of download-everything queries holds strictly") {
    // every server returns its whole share: d = L/2, epsilon = 1, alpha d = d
    FieldPrime f(10007);
    const Matrix all = Matrix::identity(2, f);
    AuditReport r = audit_linear({all, all, all, all}, 4);
    CHECK(r.d == 2);
    CHECK(r.epsilon == 1);
    CHECK(r.alpha_d == 2);
    REQUIRE(r.inequality_holds);
    CHECK(*r.inequality_holds);
    CHECK_FALSE(r.tight);
}
