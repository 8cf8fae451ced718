// SPDX-License-Identifier: MIT
//
// Correctness, privacy, dimension and linear-audit checks for schemes.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pirlab/scheme.hpp"

namespace pirlab {

struct CorrectnessReport {
    std::size_t trials = 0;
    std::size_t failures = 0;         // wrong output or DecodeFailure
    std::size_t decode_failures = 0;  // DecodeFailure only
    std::size_t download_mismatches = 0;
    std::size_t first_failing_trial = 0;  // 1-based, 0 if none
    std::string mode;                     // sampled | exhaustive
    bool pass = false;                    // zero-error: no failures; epsilon-error: rate < 1%
};

// Trial i uses derive_seed(seed, i); theta alternates 1, 2.
CorrectnessReport check_correctness(const SchemeInstance& s, std::size_t trials, std::uint64_t seed,
                                    unsigned jobs = 1);
// Tabular schemes: every table row x both theta x `per_row` random message pairs.
CorrectnessReport check_correctness_exhaustive(const SchemeInstance& s, std::size_t per_row, std::uint64_t seed);

struct SetPrivacy {
    std::vector<std::size_t> set;  // 0-based servers
    std::string mode;              // exhaustive | statistical
    std::string view;              // full | features
    // exhaustive
    Rational tv = 0;
    // statistical
    double statistic = 0;
    std::size_t dof = 0;
    std::size_t buckets = 0;
    double p_value = 1;
    double threshold = 0;
    std::size_t samples = 0;  // per theta
    std::string verdict;      // identical | differs | consistent | reject | under-powered
};

struct PrivacyReport {
    std::string mode;
    std::string canonicalization;  // ordered-rows | rref | table
    std::vector<SetPrivacy> sets;
    bool pass = false;
};

// Exact distributions of every collusion set's view; tabular schemes, and aligned
// schemes with M = 1 whose randomness fits `budget` outcomes. Throws NotEnumerable.
PrivacyReport check_privacy_exhaustive(const SchemeInstance& s,
                                       const std::vector<std::vector<std::size_t>>& sets, double budget = 1.0e6);

// Chi-square homogeneity of theta = 1 vs theta = 2 views, Bonferroni over sets.
// Throws BadParams when samples < 10^4.
PrivacyReport check_privacy_statistical(const SchemeInstance& s, const std::vector<std::vector<std::size_t>>& sets,
                                        std::size_t samples, std::uint64_t seed, double alpha = 1.0e-3);

struct F13DimensionCase {
    char which = 'i';  // i: W1 symbols, j: W2 symbols
    std::size_t idx[3] = {0, 0, 0};
    std::size_t idx4 = 0, idx4p = 0;
    std::size_t dim4 = 0, dim4p = 0;
    bool ok = false;
};

struct DimensionReport {
    std::size_t repeats = 0;
    std::size_t expected_desired = 0;
    std::size_t expected_interference = 0;  // 0 when the scheme declares none
    std::size_t desired_min = 0, desired_max = 0;
    std::size_t interference_min = 0, interference_max = 0;
    std::vector<F13DimensionCase> f13_cases;
    bool pass = false;
};

DimensionReport check_dimensions(const SchemeInstance& s, std::uint64_t seed, std::size_t repeats);
std::vector<F13DimensionCase> f13_dimension_cases(const StorageCode& f13_code);

struct AuditReport {
    std::vector<std::size_t> ranks;  // per server
    std::size_t L = 0;
    std::size_t d = 0;
    std::int64_t epsilon_l = 0;  // N d - L
    Rational epsilon = 0;
    std::size_t alpha_d = 0;
    Rational alpha = 0;
    std::vector<std::size_t> pair_dims;  // dim of each pairwise intersection, lexicographic pairs
    std::optional<bool> inequality_holds;
    bool tight = false;
    std::optional<Errc> status;  // AsymmetryDetected
};

// Desired-message query matrices (theta = 2) of each server, over the share
// coordinates. The inequality verdict is given for N = 4, K_c = 2 only.
AuditReport audit_linear(const std::vector<Matrix>& desired_queries, std::size_t L, std::size_t k_c = 2);
AuditReport audit_scheme(const SchemeInstance& s, std::uint64_t seed);

}  // namespace pirlab
