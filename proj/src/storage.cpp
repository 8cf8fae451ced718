// SPDX-License-Identifier: MIT
#include "pirlab/storage.hpp"

#include <set>

namespace pirlab {

Matrix StorageCode::gen_block(std::size_t server, std::size_t block) const {
    Matrix m(sub, sub, field());
    for (std::size_t a = 0; a < sub; ++a)
        for (std::size_t c = 0; c < sub; ++c) m.at(a, c) = gen(server * sub + a, block * sub + c);
    return m;
}

Matrix StorageCode::share_matrix(std::size_t server, std::size_t L) const {
    if (L % (k_c * sub) != 0) throw Error(Errc::LengthNotDivisible, "L not divisible by K_c*s");
    const std::size_t B = L / k_c;
    Matrix m(B, L, field());
    for (std::size_t t = 0; t < B / sub; ++t)
        for (std::size_t j = 0; j < k_c; ++j)
            for (std::size_t a = 0; a < sub; ++a)
                for (std::size_t c = 0; c < sub; ++c)
                    m.at(t * sub + a, j * B + t * sub + c) = gen(server * sub + a, j * sub + c);
    return m;
}

StorageCode make_code(std::string name, const Matrix& gen, std::size_t k_c, std::size_t sub,
                      std::size_t block_len) {
    if (k_c == 0 || sub == 0 || gen.cols() != k_c * sub || gen.rows() % sub != 0)
        throw Error(Errc::BadParams, "generator shape");
    StorageCode c;
    c.name = std::move(name);
    c.n_servers = gen.rows() / sub;
    c.k_c = k_c;
    c.sub = sub;
    c.block_len = block_len;
    c.gen = gen;
    if (c.k_c > c.n_servers) throw Error(Errc::BadParams, "K_c exceeds N");
    return c;
}

StorageCode code_xy_x2y(const FieldPrime& f, std::size_t block_len) {
    return make_code("xy-x2y", Matrix(f, {{1, 0}, {0, 1}, {1, 1}, {1, 2}}), 2, 1, block_len);
}

StorageCode code_parity(std::size_t n, const FieldPrime& f, std::size_t block_len) {
    if (n < 2) throw Error(Errc::BadParams, "parity code needs N >= 2");
    Matrix g(n, n - 1, f);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        g.at(i, i) = 1;
        g.at(n - 1, i) = 1;
    }
    return make_code("parity", g, n - 1, 1, block_len);
}

StorageCode code_binary_3server() {
    FieldPrime f(2);
    // columns a1 a2 a3 | a4 a5 a6
    Matrix g(f, {
                    {1, 0, 0, 0, 0, 0},
                    {0, 1, 0, 0, 0, 0},
                    {0, 0, 1, 0, 0, 0},
                    {0, 0, 0, 1, 0, 0},
                    {0, 0, 0, 0, 1, 0},
                    {0, 0, 0, 0, 0, 1},
                    {1, 1, 0, 0, 1, 0},  // alpha1 = a1+a2+a5
                    {1, 0, 1, 0, 0, 1},  // alpha2 = a1+a3+a6
                    {0, 1, 0, 1, 0, 1},  // alpha3 = a2+a4+a6
                });
    return make_code("binary-3server", g, 2, 3, 3);
}

StorageCode code_f13_4server() {
    FieldPrime f(13);
    // columns a1 a2 | a3 a4
    Matrix g(f, {
                    {1, 0, 0, 0},
                    {0, 1, 0, 0},
                    {0, 0, 1, 0},
                    {0, 0, 0, 1},
                    {3, 2, 4, 1},
                    {2, 3, 1, 4},
                    {3, 12, 4, 6},
                    {12, 3, 6, 4},
                });
    return make_code("f13-4server", g, 2, 2, 2);
}

ShareSet encode(const StorageCode& code, const std::vector<Vec>& messages) {
    ShareSet out;
    out.shares.assign(code.n_servers, std::vector<Vec>(messages.size()));
    const auto& f = code.field();
    const std::uint64_t p = f.p();
    for (std::size_t k = 0; k < messages.size(); ++k) {
        const Vec& w = messages[k];
        const std::size_t L = w.size();
        if (L % (code.k_c * code.sub) != 0)
            throw Error(Errc::LengthNotDivisible, "message length " + std::to_string(L));
        const std::size_t B = L / code.k_c;
        for (std::size_t n = 0; n < code.n_servers; ++n) {
            Vec share(B, 0);
            for (std::size_t t = 0; t < B / code.sub; ++t)
                for (std::size_t a = 0; a < code.sub; ++a) {
                    std::uint64_t acc = 0;
                    for (std::size_t j = 0; j < code.k_c; ++j)
                        for (std::size_t c = 0; c < code.sub; ++c)
                            acc = (acc + static_cast<std::uint64_t>(code.gen(n * code.sub + a, j * code.sub + c)) *
                                             (w[j * B + t * code.sub + c] % p)) %
                                  p;
                    share[t * code.sub + a] = static_cast<Residue>(acc);
                }
            out.shares[n][k] = std::move(share);
        }
    }
    return out;
}

namespace {

Matrix subset_generator(const StorageCode& code, const std::vector<std::size_t>& servers) {
    const std::size_t s = code.sub;
    Matrix m(servers.size() * s, code.k_c * s, code.field());
    for (std::size_t i = 0; i < servers.size(); ++i)
        for (std::size_t a = 0; a < s; ++a)
            for (std::size_t c = 0; c < code.k_c * s; ++c) m.at(i * s + a, c) = code.gen(servers[i] * s + a, c);
    return m;
}

void subsets_rec(std::size_t n, std::size_t k, std::size_t start, std::vector<std::size_t>& cur,
                 std::vector<std::vector<std::size_t>>& out) {
    if (cur.size() == k) {
        out.push_back(cur);
        return;
    }
    for (std::size_t i = start; i < n; ++i) {
        cur.push_back(i);
        subsets_rec(n, k, i + 1, cur, out);
        cur.pop_back();
    }
}

}  // namespace

MdsReport check_mds(const StorageCode& code) {
    MdsReport rep;
    std::vector<std::vector<std::size_t>> subs;
    std::vector<std::size_t> cur;
    subsets_rec(code.n_servers, code.k_c, 0, cur, subs);
    rep.pass = true;
    for (auto& s : subs) {
        MdsReport::Subset e;
        e.det = mat_det(subset_generator(code, s));
        e.invertible = e.det != 0;
        e.servers = s;
        rep.pass = rep.pass && e.invertible;
        rep.subsets.push_back(std::move(e));
    }
    return rep;
}

Vec reconstruct(const StorageCode& code, const std::vector<std::pair<std::size_t, Vec>>& shares) {
    std::set<std::size_t> distinct;
    for (const auto& [n, v] : shares) {
        if (n >= code.n_servers) throw Error(Errc::BadParams, "server index out of range");
        distinct.insert(n);
    }
    if (shares.size() != code.k_c || distinct.size() != code.k_c)
        throw Error(Errc::BadParams, "reconstruct needs exactly K_c distinct shares");
    const std::size_t B = shares.front().second.size();
    const std::size_t L = B * code.k_c;
    std::vector<Matrix> rows;
    Vec rhs;
    for (const auto& [n, v] : shares) {
        if (v.size() != B) throw Error(Errc::ShapeMismatch, "share length");
        rows.push_back(code.share_matrix(n, L));
        rhs.insert(rhs.end(), v.begin(), v.end());
    }
    Matrix g = vstack(rows);
    return mat_vec(mat_invert(g), rhs);
}

}  // namespace pirlab
