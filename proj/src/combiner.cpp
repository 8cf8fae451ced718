// SPDX-License-Identifier: MIT
#include "pirlab/combiner.hpp"

#include <algorithm>
#include <numeric>

namespace pirlab {

Realization identity_realization(const AlignedStructure& st) {
    Realization r(st.n_servers);
    for (std::size_t n = 0; n < st.n_servers; ++n) {
        std::vector<std::size_t> id(st.d(n));
        std::iota(id.begin(), id.end(), 0);
        r[n].assign(st.replicas, id);
    }
    return r;
}

std::size_t atom_count(const AlignedStructure& st, const StorageCode& code) {
    return st.replicas * st.b * code.k_c;
}

Matrix undesired_atoms(const AlignedStructure& st, const StorageCode& code, std::size_t n,
                       const std::vector<std::vector<std::size_t>>& perms) {
    if (code.sub != 1) throw Error(Errc::ShapeMismatch, "aligned schemes need a scalar storage code");
    const auto& f = code.field();
    const std::size_t d = st.d(n);
    const std::size_t per = st.b * code.k_c;
    Matrix out(st.replicas * d, atom_count(st, code), f);
    for (std::size_t r = 0; r < st.replicas; ++r)
        for (std::size_t t = 0; t < d; ++t) {
            const std::size_t src = perms[r][t];
            for (std::size_t i = 0; i < st.b; ++i) {
                const Residue u = st.undesired[n](src, i);
                if (!u) continue;
                for (std::size_t j = 0; j < code.k_c; ++j)
                    out.at(r * d + t, r * per + i * code.k_c + j) = f.mul(u, code.gen(n, j));
            }
        }
    return out;
}

namespace {

double factorial(std::size_t k) {
    double r = 1;
    for (std::size_t i = 2; i <= k; ++i) r *= static_cast<double>(i);
    return r;
}

// All permutations of 0..k-1 in lexicographic order.
std::vector<std::vector<std::size_t>> all_perms(std::size_t k) {
    std::vector<std::size_t> p(k);
    std::iota(p.begin(), p.end(), 0);
    std::vector<std::vector<std::size_t>> out;
    do out.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));
    return out;
}

// A P2 sub-problem: per server, the direct rows (over that server's slot columns
// restricted to the sub-problem) and the canonical atom rows the slots refer to.
struct SubServer {
    Matrix cbar;                  // a x slots
    Matrix atoms;                 // slots x atom_cols (canonical order)
    std::vector<std::size_t> blocks;  // slot block sizes, each permuted independently
};

struct Candidate {
    Matrix rows;  // a x slots, a representative of C̄ Π
    std::uint64_t mult = 0;
};

Matrix permute_columns(const Matrix& cbar, const std::vector<std::size_t>& blocks,
                       const std::vector<std::vector<std::size_t>>& perms) {
    // slot t within block r reads canonical row perms[r][t]; column for canonical
    // row c receives cbar column of the slot holding it.
    Matrix out(cbar.rows(), cbar.cols(), cbar.field());
    std::size_t off = 0;
    for (std::size_t r = 0; r < blocks.size(); ++r) {
        for (std::size_t t = 0; t < blocks[r]; ++t) {
            const std::size_t canon = off + perms[r][t];
            for (std::size_t k = 0; k < cbar.rows(); ++k) out.at(k, canon) = cbar(k, off + t);
        }
        off += blocks[r];
    }
    return out;
}

std::vector<Candidate> distinct_candidates(const SubServer& s) {
    std::vector<std::vector<std::vector<std::size_t>>> per_block;
    for (auto b : s.blocks) per_block.push_back(all_perms(b));
    std::map<std::vector<Residue>, Candidate> seen;
    std::vector<std::size_t> idx(s.blocks.size(), 0);
    for (;;) {
        std::vector<std::vector<std::size_t>> perms(s.blocks.size());
        for (std::size_t r = 0; r < s.blocks.size(); ++r) perms[r] = per_block[r][idx[r]];
        Matrix m = permute_columns(s.cbar, s.blocks, perms);
        Matrix key = mat_rref(m).rref;
        auto it = seen.find(key.data());
        if (it == seen.end()) seen.emplace(key.data(), Candidate{m, 1});
        else ++it->second.mult;
        std::size_t r = 0;
        while (r < idx.size()) {
            if (++idx[r] < per_block[r].size()) break;
            idx[r] = 0;
            ++r;
        }
        if (r == idx.size()) break;
    }
    std::vector<Candidate> out;
    for (auto& [k, c] : seen) out.push_back(std::move(c));
    return out;
}

struct DfsState {
    const std::vector<SubServer>* servers;
    const std::vector<std::vector<Candidate>>* cands;
    std::vector<double> tail;  // realizations below each level
    std::uint64_t failing = 0;
    std::uint64_t checked = 0;
};

void dfs(DfsState& st, std::size_t level, const EchelonBasis& basis, std::uint64_t weight) {
    const auto& servers = *st.servers;
    if (level == servers.size()) {
        st.checked += weight;
        return;
    }
    const SubServer& s = servers[level];
    const std::size_t a = s.cbar.rows();
    // canonical rows reduced modulo the current basis
    std::vector<std::vector<Residue>> red(s.atoms.rows());
    for (std::size_t i = 0; i < s.atoms.rows(); ++i) {
        red[i] = s.atoms.row(i);
        basis.reduce(red[i]);
    }
    for (const auto& c : (*st.cands)[level]) {
        EchelonBasis next = basis;
        bool ok = true;
        for (std::size_t k = 0; k < a && ok; ++k) {
            std::vector<Residue> v(s.atoms.cols(), 0);
            const auto& f = s.atoms.field();
            for (std::size_t t = 0; t < c.rows.cols(); ++t) {
                const Residue x = c.rows(k, t);
                if (!x) continue;
                for (std::size_t col = 0; col < v.size(); ++col) v[col] = f.add(v[col], f.mul(x, red[t][col]));
            }
            ok = next.insert(std::move(v));
        }
        const std::uint64_t w = weight * c.mult;
        if (!ok) {
            const auto below = static_cast<std::uint64_t>(st.tail[level + 1]);
            st.failing += w * below;
            st.checked += w * below;
            continue;
        }
        dfs(st, level + 1, next, w);
    }
}

struct SubResult {
    std::uint64_t failing = 0;
    std::uint64_t checked = 0;
};

SubResult run_subproblem(const std::vector<SubServer>& servers, std::size_t atom_cols, const FieldPrime& f) {
    std::vector<std::vector<Candidate>> cands;
    for (const auto& s : servers) cands.push_back(distinct_candidates(s));
    DfsState st;
    st.servers = &servers;
    st.cands = &cands;
    st.tail.assign(servers.size() + 1, 1.0);
    for (std::size_t i = servers.size(); i-- > 0;) {
        double cnt = 1;
        for (auto b : servers[i].blocks) cnt *= factorial(b);
        st.tail[i] = st.tail[i + 1] * cnt;
    }
    dfs(st, 0, EchelonBasis(atom_cols, f), 1);
    return {st.failing, st.checked};
}

// Which replica each direct row of C_n lives in, or npos if it spans several.
std::vector<std::size_t> direct_row_replicas(const Matrix& c, std::size_t direct, std::size_t d, std::size_t replicas) {
    std::vector<std::size_t> out(direct, static_cast<std::size_t>(-1));
    for (std::size_t k = 0; k < direct; ++k) {
        std::size_t found = static_cast<std::size_t>(-1);
        bool single = true;
        for (std::size_t r = 0; r < replicas && single; ++r)
            for (std::size_t t = 0; t < d; ++t)
                if (c(k, r * d + t) != 0) {
                    if (found != static_cast<std::size_t>(-1) && found != r) single = false;
                    found = r;
                    break;
                }
        out[k] = single ? found : static_cast<std::size_t>(-1);
    }
    return out;
}

Matrix direct_rows(const CombinerSet& cs, const AlignedStructure& st, const StorageCode& code, const Realization& r) {
    std::vector<Matrix> parts;
    for (std::size_t n = 0; n < st.n_servers; ++n) {
        if (cs.direct[n] == 0) continue;
        parts.push_back(first_rows(cs.c[n], cs.direct[n]) * undesired_atoms(st, code, n, r[n]));
    }
    if (parts.empty()) return Matrix(0, atom_count(st, code), code.field());
    return vstack(parts);
}

}  // namespace

Matrix interference_matrix(const CombinerSet& cs, const AlignedStructure& st, const StorageCode& code,
                           const Realization& r, const Matrix& basis_atoms) {
    return solve_left(basis_atoms, direct_rows(cs, st, code, r));
}

CombinerReport verify_combiner(const CombinerSet& cs, const AlignedStructure& st, const StorageCode& code,
                               const CombinerOptions& opt) {
    if (cs.c.size() != st.n_servers || cs.direct.size() != st.n_servers)
        throw Error(Errc::ShapeMismatch, "combiner server count");
    CombinerReport rep;
    rep.p1 = true;
    std::size_t total_direct = 0;
    for (std::size_t n = 0; n < st.n_servers; ++n) {
        const std::size_t q = st.queried(n);
        if (cs.c[n].rows() != q || cs.c[n].cols() != q || cs.direct[n] > q)
            throw Error(Errc::ShapeMismatch, "combiner shape for server " + std::to_string(n + 1));
        if (q > 0 && mat_det(cs.c[n]) == 0) {
            rep.p1 = false;
            rep.singular_servers.push_back(n);
        }
        total_direct += cs.direct[n];
    }
    const FieldPrime& f = code.field();
    rep.realizations_total = 1;
    for (std::size_t n = 0; n < st.n_servers; ++n)
        rep.realizations_total *= std::pow(factorial(st.d(n)), static_cast<double>(st.replicas));
    if (st.space_queries) rep.realizations_total = 1;

    const std::size_t target = st.replicas * st.interference;
    if (total_direct != target) {
        rep.mode = "exhaustive";
        rep.checked = 0;
        rep.failing = static_cast<std::uint64_t>(rep.realizations_total);
        rep.pass = false;
        return rep;
    }

    if (st.space_queries) {
        Realization id = identity_realization(st);
        rep.mode = "exhaustive";
        rep.checked = 1;
        rep.failing = mat_rank(direct_rows(cs, st, code, id)) == target ? 0 : 1;
        if (rep.failing) rep.failures.push_back(id);
        rep.pass = rep.p1 && rep.failing == 0;
        return rep;
    }

    // Split into independent per-replica sub-problems when every direct row stays
    // inside one replica.
    bool factorized = st.replicas > 1;
    std::vector<std::vector<std::size_t>> row_rep(st.n_servers);
    for (std::size_t n = 0; n < st.n_servers && factorized; ++n) {
        row_rep[n] = direct_row_replicas(cs.c[n], cs.direct[n], st.d(n), st.replicas);
        for (auto r : row_rep[n])
            if (r == static_cast<std::size_t>(-1)) factorized = false;
    }

    std::vector<std::vector<SubServer>> subs;
    std::vector<std::size_t> sub_atoms;
    const std::size_t per = st.b * code.k_c;
    if (factorized) {
        for (std::size_t r = 0; r < st.replicas; ++r) {
            std::vector<SubServer> ss;
            for (std::size_t n = 0; n < st.n_servers; ++n) {
                const std::size_t d = st.d(n);
                std::vector<std::size_t> rows;
                for (std::size_t k = 0; k < cs.direct[n]; ++k)
                    if (row_rep[n][k] == r) rows.push_back(k);
                SubServer s;
                s.blocks = {d};
                s.cbar = Matrix(rows.size(), d, f);
                for (std::size_t i = 0; i < rows.size(); ++i)
                    for (std::size_t t = 0; t < d; ++t) s.cbar.at(i, t) = cs.c[n](rows[i], r * d + t);
                Matrix full = undesired_atoms(st, code, n, identity_realization(st)[n]);
                s.atoms = Matrix(d, per, f);
                for (std::size_t t = 0; t < d; ++t)
                    for (std::size_t c = 0; c < per; ++c) s.atoms.at(t, c) = full(r * d + t, r * per + c);
                ss.push_back(std::move(s));
            }
            subs.push_back(std::move(ss));
            sub_atoms.push_back(per);
        }
    } else {
        std::vector<SubServer> ss;
        for (std::size_t n = 0; n < st.n_servers; ++n) {
            SubServer s;
            s.blocks.assign(st.replicas, st.d(n));
            s.cbar = first_rows(cs.c[n], cs.direct[n]);
            s.atoms = undesired_atoms(st, code, n, identity_realization(st)[n]);
            ss.push_back(std::move(s));
        }
        subs.push_back(std::move(ss));
        sub_atoms.push_back(atom_count(st, code));
    }

    // Cost: product of distinct-row-space counts is bounded by raw permutation counts.
    double cost = 0;
    for (const auto& ss : subs) {
        double c = 1;
        for (const auto& s : ss)
            for (auto b : s.blocks) c *= factorial(b);
        cost += c;
    }

    if (cost <= opt.exhaustive_limit) {
        rep.mode = "exhaustive";
        double pass_fraction = 1;
        std::uint64_t checked_sum = 0;
        bool any_fail = false;
        for (std::size_t i = 0; i < subs.size(); ++i) {
            SubResult sr = run_subproblem(subs[i], sub_atoms[i], f);
            checked_sum += sr.checked;
            if (sr.failing) any_fail = true;
            pass_fraction *= 1.0 - static_cast<double>(sr.failing) / static_cast<double>(sr.checked);
        }
        rep.checked = static_cast<std::uint64_t>(rep.realizations_total);
        rep.failing = any_fail ? static_cast<std::uint64_t>(rep.realizations_total * (1.0 - pass_fraction) + 0.5) : 0;
        if (any_fail && rep.failing == 0) rep.failing = 1;
        (void)checked_sum;
    } else {
        rep.mode = "sampled";
        Rng rng(opt.sample_seed);
        for (std::size_t s = 0; s < opt.samples; ++s) {
            Realization r(st.n_servers);
            for (std::size_t n = 0; n < st.n_servers; ++n)
                for (std::size_t k = 0; k < st.replicas; ++k) r[n].push_back(rng.permutation(st.d(n)));
            ++rep.checked;
            if (mat_rank(direct_rows(cs, st, code, r)) != target) {
                ++rep.failing;
                if (rep.failures.size() < opt.keep_failures) rep.failures.push_back(r);
            }
        }
    }
    rep.pass = rep.p1 && rep.failing == 0;
    return rep;
}

std::vector<std::vector<std::size_t>> replica_allocation(const AlignedStructure& st) {
    const std::size_t N = st.n_servers, M = st.replicas;
    std::vector<std::vector<std::size_t>> a(N, std::vector<std::size_t>(M, 0));
    std::size_t total = 0;
    for (auto d : st.direct) total += d;
    if (total != M * st.interference) throw Error(Errc::BadParams, "direct counts do not sum to M*I");
    // Uniform direct counts: spread I per replica round-robin.
    bool uniform = std::all_of(st.direct.begin(), st.direct.end(), [&](std::size_t d) { return d == st.direct[0]; });
    if (uniform) {
        const std::size_t q = st.interference / N, e = st.interference % N;
        for (std::size_t r = 0; r < M; ++r)
            for (std::size_t n = 0; n < N; ++n) a[n][r] = q;
        std::size_t pos = 0;
        for (std::size_t r = 0; r < M; ++r)
            for (std::size_t j = 0; j < e; ++j) a[(pos++) % N][r] += 1;
    } else {
        if (M != 1) throw Error(Errc::BadParams, "non-uniform direct counts need M = 1");
        for (std::size_t n = 0; n < N; ++n) a[n][0] = st.direct[n];
    }
    for (std::size_t n = 0; n < N; ++n) {
        std::size_t s = 0;
        for (std::size_t r = 0; r < M; ++r) {
            if (a[n][r] > st.d(n)) throw Error(Errc::BadParams, "replica allocation exceeds d_n");
            s += a[n][r];
        }
        if (s != st.direct[n]) throw Error(Errc::BadParams, "replica allocation does not match direct count");
    }
    return a;
}

CombinerSet random_combiner(const AlignedStructure& st, const FieldPrime& f, Rng& rng, CombinerShape shape) {
    CombinerSet cs;
    cs.direct = st.direct;
    if (shape == CombinerShape::Dense || st.replicas == 1) {
        for (std::size_t n = 0; n < st.n_servers; ++n) cs.c.push_back(sample_uniform(st.queried(n), st.queried(n), f, rng));
        return cs;
    }
    auto alloc = replica_allocation(st);
    for (std::size_t n = 0; n < st.n_servers; ++n) {
        const std::size_t d = st.d(n), q = st.queried(n);
        Matrix c(q, q, f);
        std::vector<Matrix> blocks;
        for (std::size_t r = 0; r < st.replicas; ++r) blocks.push_back(sample_uniform(d, d, f, rng));
        std::size_t row = 0;
        for (std::size_t r = 0; r < st.replicas; ++r)
            for (std::size_t k = 0; k < alloc[n][r]; ++k, ++row)
                for (std::size_t t = 0; t < d; ++t) c.at(row, r * d + t) = blocks[r](k, t);
        for (std::size_t r = 0; r < st.replicas; ++r)
            for (std::size_t k = alloc[n][r]; k < d; ++k, ++row)
                for (std::size_t t = 0; t < d; ++t) c.at(row, r * d + t) = blocks[r](k, t);
        cs.c.push_back(std::move(c));
    }
    return cs;
}

SearchResult search_combiner(const AlignedStructure& st, const StorageCode& code, const FieldPrime& f, Rng& rng,
                             std::size_t max_tries, CombinerShape shape, const CombinerOptions& opt) {
    if (max_tries < 1) throw Error(Errc::BadParams, "max_tries must be at least 1");
    for (std::size_t t = 1; t <= max_tries; ++t) {
        CombinerSet cs = random_combiner(st, f, rng, shape);
        cs.provenance = "searched";
        cs.tries = t;
        CombinerReport rep = verify_combiner(cs, st, code, opt);
        if (rep.pass) return {std::move(cs), std::move(rep)};
    }
    throw Error(Errc::SearchExhausted,
                "no combiner passed after " + std::to_string(max_tries) + " tries at p=" + std::to_string(f.p()));
}

Matrix PMatrix::block(std::size_t j) const {
    std::vector<std::size_t> idx;
    for (std::size_t k = 0; k + 1 < t; ++k) idx.push_back(j * (t - 1) + k);
    return select_rows(p, idx);
}

std::vector<Residue> common_vector(const Matrix& p, std::size_t n, std::size_t t,
                                   const std::vector<std::size_t>& subset) {
    if (t < 2 || subset.size() != t - 1) throw Error(Errc::BadParams, "subset must have T-1 elements");
    if (p.rows() != n * (t - 1) || p.cols() != t) throw Error(Errc::ShapeMismatch, "P shape");
    const auto& f = p.field();
    const std::size_t h = t - 1;
    auto blk = [&](std::size_t j) {
        if (j >= n) throw Error(Errc::BadParams, "subset index out of range");
        Matrix b(h, t, f);
        for (std::size_t k = 0; k < h; ++k)
            for (std::size_t c = 0; c < t; ++c) b.at(k, c) = p(j * h + k, c);
        return b;
    };
    // Row block 1 holds P_{j1} in every column block; row block c+1 holds -P_{j_{c+1}}.
    Matrix pj(h * h, t * (t - 2), f);
    Matrix b1 = blk(subset[0]);
    for (std::size_t c = 0; c + 2 < t; ++c) {
        Matrix bc = blk(subset[c + 1]);
        for (std::size_t k = 0; k < h; ++k)
            for (std::size_t col = 0; col < t; ++col) {
                pj.at(k, c * t + col) = b1(k, col);
                pj.at((c + 1) * h + k, c * t + col) = f.neg(bc(k, col));
            }
    }
    Matrix ln = left_null_space(pj);
    if (ln.rows() != 1) throw Error(Errc::NotUnique, "left null space has dimension " + std::to_string(ln.rows()));
    std::vector<Residue> h1(h);
    for (std::size_t k = 0; k < h; ++k) h1[k] = ln(0, k);
    std::vector<Residue> m(t, 0);
    for (std::size_t k = 0; k < h; ++k)
        for (std::size_t c = 0; c < t; ++c) m[c] = f.add(m[c], f.mul(h1[k], b1(k, c)));
    std::size_t lead = 0;
    while (lead < t && m[lead] == 0) ++lead;
    if (lead == t) throw Error(Errc::NotUnique, "common vector is zero");
    const Residue iv = f.inv(m[lead]);
    for (auto& x : m) x = f.mul(x, iv);
    return m;
}

namespace {

void subsets_of(std::size_t n, std::size_t k, std::size_t start, std::vector<std::size_t>& cur,
                std::vector<std::vector<std::size_t>>& out) {
    if (cur.size() == k) {
        out.push_back(cur);
        return;
    }
    for (std::size_t i = start; i < n; ++i) {
        cur.push_back(i);
        subsets_of(n, k, i + 1, cur, out);
        cur.pop_back();
    }
}

}  // namespace

PMatrix make_p_matrix(const Matrix& p, std::size_t n, std::size_t t) {
    if (t < 2 || n <= t) throw Error(Errc::BadParams, "P matrix needs 2 <= T < N");
    PMatrix pm;
    pm.n = n;
    pm.t = t;
    pm.p = p;
    std::vector<std::vector<std::size_t>> subs;
    std::vector<std::size_t> cur;
    subsets_of(n, t - 1, 0, cur, subs);
    for (const auto& s : subs) pm.common[s] = common_vector(p, n, t, s);
    std::vector<std::vector<std::size_t>> tsubs;
    cur.clear();
    subsets_of(n, t, 0, cur, tsubs);
    for (const auto& s : tsubs) {
        std::vector<std::vector<Residue>> rows;
        for (std::size_t drop = 0; drop < s.size(); ++drop) {
            std::vector<std::size_t> sub;
            for (std::size_t i = 0; i < s.size(); ++i)
                if (i != drop) sub.push_back(s[i]);
            rows.push_back(pm.common.at(sub));
        }
        if (mat_rank(Matrix::from_rows(p.field(), rows, t)) != t)
            throw Error(Errc::NotUnique, "common vectors of a T-subset are dependent");
    }
    return pm;
}

PMatrix reference_p_matrix_4_3(const FieldPrime& f) {
    Matrix p(f, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 0}, {1, 0, 1}, {0, 1, 1}, {1, 1, 1}, {1, 2, 2}});
    return make_p_matrix(p, 4, 3);
}

PMatrix build_p_matrix(std::size_t n, std::size_t t, const FieldPrime& f, Rng& rng, std::size_t max_tries) {
    if (t < 2 || n <= t) throw Error(Errc::BadParams, "P matrix needs 2 <= T < N");
    if (max_tries < 1) throw Error(Errc::BadParams, "max_tries must be at least 1");
    for (std::size_t k = 1; k <= max_tries; ++k) {
        Matrix p = sample_uniform(n * (t - 1), t, f, rng);
        try {
            PMatrix pm = make_p_matrix(p, n, t);
            pm.tries = k;
            return pm;
        } catch (const Error& e) {
            if (e.code() != Errc::NotUnique) throw;
        }
    }
    throw Error(Errc::SearchExhausted, "no valid P after " + std::to_string(max_tries) + " tries");
}

}  // namespace pirlab
