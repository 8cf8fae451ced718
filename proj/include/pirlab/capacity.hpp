// SPDX-License-Identifier: MIT
//
// Closed-form capacities and recursive outer bounds, in exact rationals.
#pragma once

#include <string>
#include <vector>

#include "pirlab/rational.hpp"

namespace pirlab {

enum class CapacityKind { Pir, Tpir, MdsPir, FghkConjecture, Theorem3 };

struct CapacityParams {
    std::size_t k = 2;    // messages
    std::size_t n = 0;    // servers
    std::size_t t = 1;    // collusion
    std::size_t k_c = 1;  // storage code dimension
};

CapacityKind parse_capacity_kind(const std::string& name);  // pir | tpir | mds-pir | fghk | theorem3
const char* capacity_kind_name(CapacityKind k);

// pir:  (1 + 1/N + ... + 1/N^{K-1})^{-1}
// tpir: ratio T/N; mds-pir: ratio K_c/N; fghk: ratio (T+K_c-1)/N
// theorem3 (K=2, K_c=N-1): (N^2-N)/(2N^2-3N+T), 1/2 when T=N.
Rational capacity_formula(CapacityKind kind, const CapacityParams& prm);

// C(1) = 1, C(K) = (1 + (3/8)/C(K-1) + (1-(2/3)^{K-1}) 3/4)^{-1}
Rational outer_bound_2422_family(std::size_t k);
std::vector<Rational> outer_bound_2422_series(std::size_t kmax);

// C(1) = 1, C(K) = (1 + ((N-T)/N)/C(K-1) + (K-1)(1-(N-T)/K_c))^{-1}; needs N < T + K_c.
Rational outer_bound_general(std::size_t k, std::size_t n, std::size_t t, std::size_t k_c);
std::vector<Rational> outer_bound_general_series(std::size_t kmax, std::size_t n, std::size_t t, std::size_t k_c);

struct FourCase {
    CapacityParams params;
    std::string source;  // formula used
    Rational value;
};
// (2,4,2,3), (2,4,3,2), (2,4,1,3), (2,4,3,1)
std::vector<FourCase> four_case_table();

struct LimitReport {
    Rational limit;
    std::size_t k = 0;  // first K with |value(K) - limit| < tol, 0 if not reached by kmax
    double distance = 0;  // at k (or kmax)
};
// limit 5/14 of the (2,4,2,2) family
LimitReport limit_2422(std::size_t kmax = 1000, double tol = 1e-9);
// K * C(K) -> T K_c / (N (K_c - N + T)), the fixed point of the recursion; the
// gap shrinks like 1/K.
LimitReport limit_general(std::size_t n, std::size_t t, std::size_t k_c, std::size_t kmax = 10000, double tol = 1e-3);

}  // namespace pirlab
