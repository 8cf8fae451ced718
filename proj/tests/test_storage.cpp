// SPDX-License-Identifier: MIT
#include <doctest.h>

#include "pirlab/storage.hpp"

using namespace pirlab;

TEST_CASE("(x, y, x+y, x+2y) is MDS over F_349 but not over F_2") {
    CHECK(check_mds(code_xy_x2y(FieldPrime(349), 6)).pass);
    // x + 2y = x over F_2, so servers 1 and 4 store the same share
    MdsReport r = check_mds(code_xy_x2y(FieldPrime(2), 1));
    CHECK_FALSE(r.pass);
    bool found = false;
    for (const auto& s : r.subsets)
        if (s.servers == std::vector<std::size_t>{0, 3}) found = !s.invertible;
    CHECK(found);
}

TEST_CASE("fixed codes are MDS") {
    CHECK(check_mds(code_parity(4, FieldPrime(10007), 4)).pass);
    CHECK(check_mds(code_binary_3server()).pass);
    CHECK(check_mds(code_f13_4server()).pass);
}

TEST_CASE("property: encode then reconstruct from any K_c servers") {
    FieldPrime f(10007);
    Rng rng(3);
    for (const StorageCode& code : {code_xy_x2y(f, 6), code_parity(4, f, 4), code_parity(3, f, 2)}) {
        const std::size_t len = code.k_c * code.block_len;
        for (int trial = 0; trial < 20; ++trial) {
            Vec w(len);
            for (auto& x : w) x = f.uniform(rng);
            ShareSet sh = encode(code, {w, w});
            std::vector<bool> pick(code.n_servers, false);
            std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(code.k_c), true);
            do {
                std::vector<std::pair<std::size_t, Vec>> parts;
                for (std::size_t n = 0; n < code.n_servers; ++n)
                    if (pick[n]) parts.emplace_back(n, sh.shares[n][0]);
                CHECK(reconstruct(code, parts) == w);
            } while (std::prev_permutation(pick.begin(), pick.end()));
        }
    }
}

TEST_CASE("share matrix agrees with encode") {
    FieldPrime f(349);
    StorageCode code = code_xy_x2y(f, 6);
    Rng rng(11);
    Vec w(12);
    for (auto& x : w) x = f.uniform(rng);
    ShareSet sh = encode(code, {w, w});
    for (std::size_t n = 0; n < 4; ++n) CHECK(mat_vec(code.share_matrix(n, 12), w) == sh.shares[n][0]);
}
