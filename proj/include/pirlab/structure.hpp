// SPDX-License-Identifier: MIT
//
// Query structure of the projection-and-combine schemes: which combinations of
// the secret bases each server is asked to project on, per message role.
#pragma once

#include <vector>

#include "pirlab/fplinalg.hpp"
#include "pirlab/storage.hpp"

namespace pirlab {

struct AlignedStructure {
    std::size_t n_servers = 0;
    std::size_t b = 0;                // query vector length (= L/K_c)
    std::size_t desired_bases = 1;    // independent b x b full-rank draws behind the desired vectors
    std::vector<Matrix> desired;      // per server: d_n x (desired_bases*b), rows over the stacked bases
    std::vector<Matrix> undesired;    // per server: d_n x b, rows over S'
    bool space_queries = false;       // send RREF row spaces instead of ordered rows
    std::size_t interference = 0;     // I, per replica
    std::size_t replicas = 1;         // M
    std::vector<std::size_t> direct;  // undesired symbols downloaded unmixed, per server (all replicas)

    std::size_t d(std::size_t n) const { return undesired[n].rows(); }
    std::size_t queried(std::size_t n) const { return replicas * d(n); }
    std::size_t download(std::size_t n) const { return queried(n) + direct[n]; }
};

// One permutation per (server, replica); perm[t] = canonical row sent in slot t.
using Realization = std::vector<std::vector<std::vector<std::size_t>>>;

Realization identity_realization(const AlignedStructure& st);

// Coefficient rows of server n's undesired queried symbols (slot order given by
// the realization) over the interference atoms (replica, S' row, code block).
Matrix undesired_atoms(const AlignedStructure& st, const StorageCode& code, std::size_t n,
                       const std::vector<std::vector<std::size_t>>& perms);

std::size_t atom_count(const AlignedStructure& st, const StorageCode& code);

}  // namespace pirlab
