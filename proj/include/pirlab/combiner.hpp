// SPDX-License-Identifier: MIT
//
// Combining matrices C_n (invertibility and independence of the directly
// downloaded interference) and the P matrix of the T > 2 construction.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pirlab/structure.hpp"

namespace pirlab {

struct CombinerSet {
    std::vector<Matrix> c;            // per server, square of size M*d_n
    std::vector<std::size_t> direct;  // leading rows of C_n that are downloaded unmixed
    std::string provenance;           // explicit-f349 | explicit | searched | random-per-session
    std::size_t tries = 0;
    std::uint64_t seed = 0;
};

struct CombinerOptions {
    // Realizations up to this count are checked exhaustively; beyond it, `samples`
    // realizations are drawn.
    double exhaustive_limit = 4.0e6;
    std::size_t samples = 4096;
    std::uint64_t sample_seed = 1;
    std::size_t keep_failures = 8;
};

struct CombinerReport {
    bool p1 = false;
    std::vector<std::size_t> singular_servers;
    std::string mode;  // exhaustive | sampled
    double realizations_total = 0;
    std::uint64_t checked = 0;
    std::uint64_t failing = 0;
    std::vector<Realization> failures;  // first few
    bool pass = false;
};

CombinerReport verify_combiner(const CombinerSet& cs, const AlignedStructure& st, const StorageCode& code,
                               const CombinerOptions& opt = {});

// Direct rows of all servers expressed in an interference basis; square when
// basis has M*I rows. Throws Singular if a direct row leaves the basis span.
Matrix interference_matrix(const CombinerSet& cs, const AlignedStructure& st, const StorageCode& code,
                           const Realization& r, const Matrix& basis_atoms);

enum class CombinerShape {
    Dense,         // uniform C_n
    ReplicaBlock,  // block-diagonal over replicas, direct rows split per replica
};

// Per-replica split of each server's direct count (rows: servers, cols: replicas).
std::vector<std::vector<std::size_t>> replica_allocation(const AlignedStructure& st);

CombinerSet random_combiner(const AlignedStructure& st, const FieldPrime& f, Rng& rng, CombinerShape shape);

struct SearchResult {
    CombinerSet set;
    CombinerReport report;
};

SearchResult search_combiner(const AlignedStructure& st, const StorageCode& code, const FieldPrime& f, Rng& rng,
                             std::size_t max_tries, CombinerShape shape, const CombinerOptions& opt = {});

struct PMatrix {
    std::size_t n = 0;
    std::size_t t = 0;
    Matrix p;  // N(T-1) x T
    std::map<std::vector<std::size_t>, std::vector<Residue>> common;  // keyed by sorted 0-based subset
    std::size_t tries = 0;

    Matrix block(std::size_t j) const;  // rows of server j (0-based), (T-1) x T
};

// Unique first-coordinate-normalized vector in the intersection of the row
// spaces of blocks in `subset` (0-based, size T-1). Throws NotUnique.
std::vector<Residue> common_vector(const Matrix& p, std::size_t n, std::size_t t,
                                   const std::vector<std::size_t>& subset);

// Validates P1/P2 and fills the cache; throws NotUnique or BadParams on failure.
PMatrix make_p_matrix(const Matrix& p, std::size_t n, std::size_t t);
PMatrix reference_p_matrix_4_3(const FieldPrime& f);
PMatrix build_p_matrix(std::size_t n, std::size_t t, const FieldPrime& f, Rng& rng, std::size_t max_tries);

}  // namespace pirlab
