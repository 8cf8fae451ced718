// SPDX-License-Identifier: MIT
//
// (K_c, N) MDS storage over message blocks.
//
// A message W of length L is cut into K_c contiguous blocks x_1..x_{K_c} of
// length B = L/K_c. The generator has shape (N*s) x (K_c*s): block (n, j) is an
// s x s matrix G_{nj}. Each block is processed in groups of s consecutive
// symbols, and server n stores share_n = sum_j G_{nj} x_j group by group.
// Scalar codes use s = 1.
#pragma once

#include <string>
#include <vector>

#include "pirlab/fplinalg.hpp"

namespace pirlab {

using Vec = std::vector<Residue>;

struct StorageCode {
    std::string name;
    std::size_t n_servers = 0;
    std::size_t k_c = 0;
    std::size_t sub = 1;        // s
    std::size_t block_len = 0;  // reference L/K_c (informational)
    Matrix gen;                 // (N*s) x (K_c*s)

    const FieldPrime& field() const { return gen.field(); }
    // s x s coefficient block for (server, message block).
    Matrix gen_block(std::size_t server, std::size_t block) const;
    // Share of `server` as a matrix acting on the whole message: (L/K_c) x L.
    Matrix share_matrix(std::size_t server, std::size_t L) const;
};

// shares[n][k]: server n, message k, length L/K_c.
struct ShareSet {
    std::vector<std::vector<Vec>> shares;
};

StorageCode make_code(std::string name, const Matrix& gen, std::size_t k_c, std::size_t sub,
                      std::size_t block_len);
// (x, y) -> (x, y, x+y, x+2y)
StorageCode code_xy_x2y(const FieldPrime& f, std::size_t block_len);
// K_c = N-1 systematic blocks plus their sum on server N.
StorageCode code_parity(std::size_t n, const FieldPrime& f, std::size_t block_len);
// 3 bits per server over F_2, servers hold (a1..a3), (a4..a6), (alpha1..alpha3).
StorageCode code_binary_3server();
// Over F_13, servers hold (a1,a2), (a3,a4), (alpha1,alpha2), (alpha3,alpha4).
StorageCode code_f13_4server();

ShareSet encode(const StorageCode& code, const std::vector<Vec>& messages);

struct MdsReport {
    struct Subset {
        std::vector<std::size_t> servers;
        Residue det = 0;
        bool invertible = false;
    };
    std::vector<Subset> subsets;
    bool pass = false;
};

MdsReport check_mds(const StorageCode& code);

// shares: (server index, share vector) pairs; exactly K_c distinct servers.
Vec reconstruct(const StorageCode& code, const std::vector<std::pair<std::size_t, Vec>>& shares);

}  // namespace pirlab
