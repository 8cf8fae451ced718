// SPDX-License-Identifier: MIT
#include "pirlab/scheme.hpp"

#include <algorithm>
#include <numeric>
#include <regex>

namespace pirlab {

const char* error_model_name(ErrorModel m) { return m == ErrorModel::ZeroError ? "zero-error" : "epsilon-error"; }

std::size_t SchemeInstance::total_download() const { return std::accumulate(download.begin(), download.end(), std::size_t{0}); }

const std::vector<std::string>& registry_ids() {
    static const std::vector<std::string> ids = {
        "ctrex-2422",  "class-t2",      "class-tgen",     "tab-2322",       "tab-2432",
        "cyclic-2422", "disjoint-2423", "ex1-restricted", "ex2-restricted", "baseline-download-all",
    };
    return ids;
}

Matrix mix_matrix(std::size_t queried, std::size_t direct, const FieldPrime& f) {
    Matrix m(queried + direct, 2 * queried, f);
    for (std::size_t k = 0; k < direct; ++k) {
        m.at(k, k) = 1;
        m.at(direct + k, queried + k) = 1;
    }
    for (std::size_t j = direct; j < queried; ++j) {
        m.at(direct + j, j) = 1;
        m.at(direct + j, queried + j) = 1;
    }
    return m;
}

namespace {

using Rows = std::vector<std::vector<std::int64_t>>;

Matrix unit_rows(std::size_t b, const std::vector<std::size_t>& idx, const FieldPrime& f) {
    Matrix m(idx.size(), b, f);
    for (std::size_t i = 0; i < idx.size(); ++i) m.at(i, idx[i]) = 1;
    return m;
}

std::vector<std::vector<std::size_t>> all_subsets(std::size_t n, std::size_t k) {
    std::vector<std::vector<std::size_t>> out;
    std::vector<bool> sel(n, false);
    std::fill(sel.begin(), sel.begin() + static_cast<std::ptrdiff_t>(std::min(k, n)), true);
    do {
        std::vector<std::size_t> s;
        for (std::size_t i = 0; i < n; ++i)
            if (sel[i]) s.push_back(i);
        out.push_back(s);
    } while (std::prev_permutation(sel.begin(), sel.end()));
    std::sort(out.begin(), out.end());
    return out;
}

struct ParsedId {
    std::string base;
    std::vector<std::size_t> args;
};

ParsedId parse_id(const std::string& id) {
    static const std::regex re(R"(^([a-z0-9-]+)(?:\((\d+)(?:,(\d+))?\))?$)");
    std::smatch m;
    if (!std::regex_match(id, m, re)) throw Error(Errc::UnknownScheme, "unknown scheme '" + id + "'");
    ParsedId out{m[1].str(), {}};
    for (int g = 2; g <= 3; ++g)
        if (m[g].matched) out.args.push_back(std::stoul(m[g].str()));
    const auto& ids = registry_ids();
    if (std::find(ids.begin(), ids.end(), out.base) == ids.end())
        throw Error(Errc::UnknownScheme, "unknown scheme '" + id + "'");
    return out;
}

std::uint64_t gcd_u(std::uint64_t a, std::uint64_t b) { return b == 0 ? a : gcd_u(b, a % b); }

// Fills replica count, per-server downloads and the fixed combiner.
void finish_aligned(SchemeInstance& s, const SchemeOverrides& ov, std::optional<std::vector<std::size_t>> direct,
                    std::optional<CombinerSet> explicit_c) {
    AlignedStructure& st = s.st;
    const std::size_t N = st.n_servers;
    if (direct) {
        st.replicas = 1;
        st.direct = *direct;
    } else {
        st.replicas = N / gcd_u(N, s.params.L + st.interference);
        if ((st.replicas * st.interference) % N != 0) throw Error(Errc::BadParams, "M*I not divisible by N");
        st.direct.assign(N, st.replicas * st.interference / N);
    }
    s.params.replicas = st.replicas;
    s.download.clear();
    for (std::size_t n = 0; n < N; ++n) {
        if (st.direct[n] > st.queried(n)) throw Error(Errc::BadParams, "direct count exceeds queried symbols");
        s.download.push_back(st.download(n));
    }
    if (s.per_session_combiner || !ov.build_combiner) return;
    if (explicit_c) {
        s.combiner = std::move(explicit_c);
        return;
    }
    Rng rng(ov.combiner_seed);
    const CombinerShape shape = st.replicas > 1 ? CombinerShape::ReplicaBlock : CombinerShape::Dense;
    SearchResult r = search_combiner(st, s.code, s.field(), rng, ov.search_tries, shape);
    r.set.seed = ov.combiner_seed;
    s.combiner = std::move(r.set);
}

SchemeInstance base_instance(const std::string& id, std::size_t n, std::size_t t, std::size_t k_c, std::size_t L,
                             std::uint64_t p, const SchemeOverrides& ov) {
    SchemeInstance s;
    s.id = id;
    s.params.n_servers = n;
    s.params.t_privacy = t;
    s.params.k_c = k_c;
    s.params.L = L;
    s.params.p = ov.p.value_or(p);
    s.params.collusion_sets = all_subsets(n, t);
    return s;
}

void init_structure(SchemeInstance& s, std::size_t b, std::size_t interference) {
    s.st.n_servers = s.params.n_servers;
    s.st.b = b;
    s.st.interference = interference;
}

SchemeInstance build_ctrex(const SchemeOverrides& ov) {
    SchemeInstance s = base_instance("ctrex-2422", 4, 2, 2, 12, 349, ov);
    FieldPrime f(s.params.p);
    s.code = code_xy_x2y(f, 6);
    init_structure(s, 6, 8);
    const std::vector<std::vector<std::size_t>> v = {{0, 1, 2}, {0, 3, 4}, {1, 3, 5}, {2, 4, 5}};
    // U6 = U1+U2, U7 = U1+2U2, U8 = U3+U4, U9 = U3+2U4
    const std::vector<std::int64_t> U0 = {1, 0, 0, 0, 0, 0}, U1 = {0, 1, 0, 0, 0, 0}, U2 = {0, 0, 1, 0, 0, 0},
                                    U3 = {0, 0, 0, 1, 0, 0}, U4 = {0, 0, 0, 0, 1, 0}, U6 = {0, 1, 1, 0, 0, 0},
                                    U7 = {0, 1, 2, 0, 0, 0}, U8 = {0, 0, 0, 1, 1, 0}, U9 = {0, 0, 0, 1, 2, 0};
    const std::vector<Rows> u = {{U0, U6, U8}, {U0, U7, U9}, {U0, U1, U3}, {U0, U2, U4}};
    for (std::size_t n = 0; n < 4; ++n) {
        s.st.desired.push_back(unit_rows(6, v[n], f));
        s.st.undesired.push_back(Matrix(f, u[n]));
    }
    std::optional<CombinerSet> explicit_c;
    if (s.params.p == 349) {
        CombinerSet cs;
        cs.c = {Matrix(f, {{1, 2, 3}, {6, 5, 4}, {0, 0, 1}}), Matrix(f, {{1, 7, 3}, {11, 9, 8}, {0, 0, 1}}),
                Matrix(f, {{1, 10, 8}, {7, 5, 4}, {0, 0, 1}}), Matrix(f, {{1, 3, 5}, {12, 9, 3}, {0, 0, 1}})};
        cs.direct = {2, 2, 2, 2};
        cs.provenance = "explicit-f349";
        explicit_c = std::move(cs);
    }
    finish_aligned(s, ov, std::nullopt, std::move(explicit_c));
    return s;
}

// Desired rows shared by both class constructions: server n sees every row of S but row n.
void class_desired(SchemeInstance& s, const FieldPrime& f) {
    const std::size_t N = s.params.n_servers;
    for (std::size_t n = 0; n < N; ++n) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < N; ++i)
            if (i != n) idx.push_back(i);
        s.st.desired.push_back(unit_rows(N, idx, f));
    }
}

SchemeInstance build_class_t2(std::size_t N, const SchemeOverrides& ov) {
    if (N < 3) throw Error(Errc::BadParams, "class-t2 needs N >= 3");
    SchemeInstance s = base_instance("class-t2(" + std::to_string(N) + ")", N, 2, N - 1, N * (N - 1), 10007, ov);
    FieldPrime f(s.params.p);
    if (f.p() + 1 < N) throw Error(Errc::BadParams, "class-t2 needs p >= N-1");
    s.code = code_parity(N, f, N);
    init_structure(s, N, N * N - 2 * N + 2);
    class_desired(s, f);
    // Common rows 0..N-3; the last two rows U1, U2 enter through an N x 2 MDS matrix
    // with rows (1, i) for i in [0 : N-2] and (0, 1).
    for (std::size_t n = 0; n < N; ++n) {
        Matrix u(N - 1, N, f);
        for (std::size_t i = 0; i + 2 < N; ++i) u.at(i, i) = 1;
        if (n + 1 < N) {
            u.at(N - 2, N - 2) = 1;
            u.at(N - 2, N - 1) = f.reduce(static_cast<std::int64_t>(n));
        } else {
            u.at(N - 2, N - 1) = 1;
        }
        s.st.undesired.push_back(std::move(u));
    }
    finish_aligned(s, ov, std::nullopt, std::nullopt);
    if (s.combiner) s.combiner->provenance = "searched";
    return s;
}

SchemeInstance build_class_tgen(std::size_t N, std::size_t T, const SchemeOverrides& ov) {
    if (T < 2 || T >= N) throw Error(Errc::BadParams, "class-tgen needs 2 <= T < N");
    SchemeInstance s = base_instance("class-tgen(" + std::to_string(N) + "," + std::to_string(T) + ")", N, T, N - 1,
                                     N * (N - 1), 10007, ov);
    FieldPrime f(s.params.p);
    s.code = code_parity(N, f, N);
    s.error_model = ErrorModel::EpsilonError;
    s.per_session_combiner = true;
    init_structure(s, N, N * N - 2 * N + T);
    s.st.space_queries = true;
    class_desired(s, f);
    std::optional<PMatrix> pm;
    if (N == 4 && T == 3) {
        try {
            pm = reference_p_matrix_4_3(f);
        } catch (const Error&) {
        }
    }
    if (!pm) {
        Rng rng(ov.combiner_seed);
        pm = build_p_matrix(N, T, f, rng, ov.search_tries);
    }
    const std::size_t nb = N - T;  // common rows
    for (std::size_t n = 0; n < N; ++n) {
        Matrix u(N - 1, N, f);
        for (std::size_t i = 0; i < nb; ++i) u.at(i, i) = 1;
        Matrix blk = pm->block(n);
        for (std::size_t k = 0; k + 1 < T; ++k)
            for (std::size_t c = 0; c < T; ++c) u.at(nb + k, nb + c) = blk(k, c);
        s.st.undesired.push_back(std::move(u));
    }
    s.pmatrix = std::move(pm);
    finish_aligned(s, ov, std::nullopt, std::nullopt);
    return s;
}

SchemeInstance build_cyclic(const SchemeOverrides& ov) {
    SchemeInstance s = base_instance("cyclic-2422", 4, 2, 2, 8, 10007, ov);
    FieldPrime f(s.params.p);
    s.code = code_xy_x2y(f, 4);
    s.params.collusion_sets = {{0, 1}, {0, 3}, {1, 2}, {2, 3}};
    init_structure(s, 4, 5);
    const std::vector<std::vector<std::size_t>> v = {{0, 1}, {1, 2}, {2, 3}, {3, 0}};
    const std::vector<Rows> u = {{{1, 0, 0, 0}, {0, 1, 1, 0}},
                                 {{1, 0, 0, 0}, {0, 1, 2, 0}},
                                 {{1, 0, 0, 0}, {0, 1, 0, 0}},
                                 {{1, 0, 0, 0}, {0, 0, 1, 0}}};
    for (std::size_t n = 0; n < 4; ++n) {
        s.st.desired.push_back(unit_rows(4, v[n], f));
        s.st.undesired.push_back(Matrix(f, u[n]));
    }
    finish_aligned(s, ov, std::nullopt, std::nullopt);
    return s;
}

SchemeInstance build_disjoint(const SchemeOverrides& ov) {
    SchemeInstance s = base_instance("disjoint-2423", 4, 2, 3, 12, 10007, ov);
    FieldPrime f(s.params.p);
    s.code = code_parity(4, f, 4);
    s.params.collusion_sets = {{0, 1}, {2, 3}};
    init_structure(s, 4, 9);
    // Servers 1, 2 query three rows of one secret basis, servers 3, 4 three rows of another.
    s.st.desired_bases = 2;
    for (std::size_t n = 0; n < 4; ++n) {
        const std::size_t off = n < 2 ? 0 : 4;
        s.st.desired.push_back(unit_rows(8, {off, off + 1, off + 2}, f));
        s.st.undesired.push_back(unit_rows(4, {0, 1, 2}, f));
    }
    finish_aligned(s, ov, std::nullopt, std::nullopt);
    return s;
}

SchemeInstance build_ex1(const SchemeOverrides& ov) {
    SchemeInstance s = base_instance("ex1-restricted", 4, 2, 2, 4, 10007, ov);
    FieldPrime f(s.params.p);
    s.code = code_xy_x2y(f, 2);
    s.params.collusion_sets = {{0, 1}, {2, 3}};
    init_structure(s, 2, 2);
    for (std::size_t n = 0; n < 4; ++n) {
        s.st.desired.push_back(unit_rows(2, {n < 2 ? 0u : 1u}, f));
        s.st.undesired.push_back(unit_rows(2, {0}, f));
    }
    finish_aligned(s, ov, std::vector<std::size_t>{1, 1, 0, 0}, std::nullopt);
    return s;
}

SchemeInstance build_ex2(const SchemeOverrides& ov) {
    SchemeInstance s = base_instance("ex2-restricted", 3, 2, 2, 4, 10007, ov);
    FieldPrime f(s.params.p);
    s.code = code_parity(3, f, 2);
    s.params.collusion_sets = {{0, 1}, {1, 2}};
    init_structure(s, 2, 3);
    const std::vector<std::vector<std::size_t>> v = {{0}, {0, 1}, {1}};
    const std::vector<std::vector<std::size_t>> u = {{0}, {0, 1}, {0}};
    for (std::size_t n = 0; n < 3; ++n) {
        s.st.desired.push_back(unit_rows(2, v[n], f));
        s.st.undesired.push_back(unit_rows(2, u[n], f));
    }
    finish_aligned(s, ov, std::vector<std::size_t>{1, 1, 1}, std::nullopt);
    return s;
}

SchemeInstance build_baseline(const SchemeOverrides& ov) {
    SchemeInstance s = base_instance("baseline-download-all", 4, 2, 2, 4, 10007, ov);
    FieldPrime f(s.params.p);
    s.code = code_xy_x2y(f, 2);
    init_structure(s, 2, 4);
    for (std::size_t n = 0; n < 4; ++n) {
        std::vector<std::size_t> idx = n < 2 ? std::vector<std::size_t>{0, 1} : std::vector<std::size_t>{};
        s.st.desired.push_back(unit_rows(2, idx, f));
        s.st.undesired.push_back(unit_rows(2, idx, f));
    }
    CombinerSet cs;
    for (std::size_t n = 0; n < 4; ++n) cs.c.push_back(Matrix::identity(n < 2 ? 2 : 0, f));
    cs.direct = {2, 2, 0, 0};
    cs.provenance = "explicit";
    finish_aligned(s, ov, std::vector<std::size_t>{2, 2, 0, 0}, std::move(cs));
    return s;
}

SchemeInstance build_tab2322(const SchemeOverrides& ov) {
    if (ov.p && *ov.p != 2) throw Error(Errc::BadParams, "tab-2322 is defined over F_2 only");
    SchemeInstance s = base_instance("tab-2322", 3, 2, 2, 6, 2, ov);
    s.kind = SchemeKind::Table2322;
    s.code = code_binary_3server();
    s.download = {4, 4, 3};
    s.upload_bits = 4;
    return s;
}

SchemeInstance build_tab2432(const SchemeOverrides& ov) {
    if (ov.p && *ov.p != 13) throw Error(Errc::BadParams, "tab-2432 is defined over F_13 only");
    SchemeInstance s = base_instance("tab-2432", 4, 3, 2, 4, 13, ov);
    s.kind = SchemeKind::Table2432;
    s.code = code_f13_4server();
    s.download = {2, 2, 2, 1};
    s.upload_bits = 6;
    return s;
}

}  // namespace

SchemeInstance registry_build(const std::string& id, const SchemeOverrides& ov) {
    ParsedId pid = parse_id(id);
    auto arg = [&](std::size_t i, std::optional<std::size_t> flag, std::size_t def) {
        if (i < pid.args.size()) return pid.args[i];
        return flag.value_or(def);
    };
    SchemeInstance s;
    if (pid.base == "ctrex-2422") s = build_ctrex(ov);
    else if (pid.base == "class-t2") s = build_class_t2(arg(0, ov.n, 4), ov);
    else if (pid.base == "class-tgen") s = build_class_tgen(arg(0, ov.n, 4), arg(1, ov.t, 3), ov);
    else if (pid.base == "tab-2322") s = build_tab2322(ov);
    else if (pid.base == "tab-2432") s = build_tab2432(ov);
    else if (pid.base == "cyclic-2422") s = build_cyclic(ov);
    else if (pid.base == "disjoint-2423") s = build_disjoint(ov);
    else if (pid.base == "ex1-restricted") s = build_ex1(ov);
    else if (pid.base == "ex2-restricted") s = build_ex2(ov);
    else s = build_baseline(ov);
    if (ov.collusion_sets) {
        for (const auto& c : *ov.collusion_sets) {
            if (c.size() > s.params.t_privacy && s.params.t_privacy > 0 && c.size() > s.params.n_servers)
                throw Error(Errc::BadParams, "collusion set too large");
            for (auto x : c)
                if (x >= s.params.n_servers) throw Error(Errc::BadParams, "collusion set server out of range");
        }
        s.params.collusion_sets = *ov.collusion_sets;
    }
    return s;
}

Rational declared_rate(const SchemeInstance& s) {
    return make_rational(static_cast<long long>(s.params.message_len()), static_cast<long long>(s.total_download()));
}

// ---------------------------------------------------------------------------
// Tabular schemes

namespace {

// Server-3 pairs of the binary scheme, (alpha pair, beta pair) for theta = 1;
// 0 selects (alpha1, alpha2), 1 selects (alpha3, alpha4). Theta = 2 swaps both.
constexpr int kTab2322Pairs[16][2] = {{1, 0}, {0, 0}, {1, 1}, {0, 1}, {0, 0}, {1, 0}, {0, 1}, {1, 1},
                                      {1, 1}, {0, 1}, {1, 0}, {0, 0}, {0, 1}, {1, 1}, {0, 0}, {1, 0}};

Matrix tab2322_pair(int which, const FieldPrime& f) {
    if (which == 0) return Matrix(f, {{1, 0, 0}, {0, 1, 0}});
    return Matrix(f, {{0, 0, 1}, {1, 1, 1}});  // alpha3, alpha4 = alpha1+alpha2+alpha3
}

std::vector<ServerQuery> tab2322_queries(std::size_t row, std::size_t theta, const FieldPrime& f) {
    const std::size_t bits = row - 1;
    auto pick = [&](std::size_t bit) { return static_cast<std::size_t>((bits >> bit) & 1u); };
    std::vector<ServerQuery> out(3);
    // server 1: a1, a_{2|3}, b1, b_{2|3}; server 2: a4, a_{5|6}, b4, b_{5|6}
    for (std::size_t n = 0; n < 2; ++n) {
        ServerQuery& q = out[n];
        q.q[0] = unit_rows(3, {0, 1 + pick(2 * n)}, f);
        q.q[1] = unit_rows(3, {0, 1 + pick(2 * n + 1)}, f);
        q.combine = Matrix::identity(2, f);
        q.mix = Matrix::identity(4, f);
        q.table_index = (pick(2 * n)) | (pick(2 * n + 1) << 1);
    }
    int a = kTab2322Pairs[row - 1][0], b = kTab2322Pairs[row - 1][1];
    if (theta == 2) {
        a ^= 1;
        b ^= 1;
    }
    ServerQuery& q = out[2];
    q.q[0] = tab2322_pair(a, f);
    q.q[1] = tab2322_pair(b, f);
    q.combine = Matrix::identity(2, f);
    q.mix = Matrix(f, {{1, 0, 0, 1}, {0, 1, 0, 1}, {0, 0, 1, 1}});
    q.table_index = static_cast<std::size_t>(a | (b << 1));
    for (auto& x : out) x.direct = 0;
    return out;
}

// i4 for theta = 1 keyed by (i1-1, i2-3, i3-1); j4 is the other of {3, 4}.
constexpr int kTab2432I4[2][2][2] = {{{4, 3}, {3, 4}}, {{3, 4}, {4, 3}}};

std::vector<ServerQuery> tab2432_queries(std::size_t row, std::size_t theta, const FieldPrime& f) {
    const std::size_t bits = row - 1;
    auto pick = [&](std::size_t bit) { return static_cast<std::size_t>((bits >> bit) & 1u); };
    const std::size_t i1 = pick(0), i2 = pick(1), i3 = pick(2), j1 = pick(3), j2 = pick(4), j3 = pick(5);
    std::vector<ServerQuery> out(4);
    const std::size_t sel[3][2] = {{i1, j1}, {i2, j2}, {i3, j3}};
    for (std::size_t n = 0; n < 3; ++n) {
        ServerQuery& q = out[n];
        q.q[0] = unit_rows(2, {sel[n][0]}, f);
        q.q[1] = unit_rows(2, {sel[n][1]}, f);
        q.combine = Matrix::identity(1, f);
        q.mix = Matrix::identity(2, f);
        q.table_index = sel[n][0] | (sel[n][1] << 1);
    }
    int i4 = kTab2432I4[i1][i2][i3];
    int j4 = 7 - kTab2432I4[j1][j2][j3];
    if (theta == 2) {
        i4 = 7 - i4;
        j4 = 7 - j4;
    }
    ServerQuery& q = out[3];
    q.q[0] = unit_rows(2, {static_cast<std::size_t>(i4 - 3)}, f);
    q.q[1] = unit_rows(2, {static_cast<std::size_t>(j4 - 3)}, f);
    q.combine = Matrix::identity(1, f);
    q.mix = Matrix(f, {{1, 1}});
    q.table_index = static_cast<std::size_t>((i4 - 3) | ((j4 - 3) << 1));
    return out;
}

}  // namespace

int tab2432_i4(std::size_t i1, std::size_t i2, std::size_t i3) {
    if (i1 < 1 || i1 > 2 || i2 < 3 || i2 > 4 || i3 < 1 || i3 > 2) throw Error(Errc::BadParams, "table index range");
    return kTab2432I4[i1 - 1][i2 - 3][i3 - 1];
}

namespace {

std::size_t table_rows(SchemeKind k) { return k == SchemeKind::Table2322 ? 16 : 64; }

}  // namespace

// ---------------------------------------------------------------------------
// Queries

namespace {

SessionSecret draw_secret_impl(const SchemeInstance& s, Rng& rng, bool full) {
    SessionSecret sec;
    if (s.kind != SchemeKind::Aligned) {
        sec.table_row = 1 + static_cast<std::size_t>(rng.below(table_rows(s.kind)));
        return sec;
    }
    const AlignedStructure& st = s.st;
    const FieldPrime& f = s.field();
    const std::size_t reps = full ? st.replicas : 1;
    for (std::size_t r = 0; r < reps; ++r) {
        std::vector<Matrix> parts;
        for (std::size_t k = 0; k < st.desired_bases; ++k) parts.push_back(sample_full_rank(st.b, f, rng));
        sec.s.push_back(vstack(parts));
        sec.s_prime.push_back(sample_full_rank(st.b, f, rng));
    }
    if (!st.space_queries) {
        sec.desired_perms.resize(st.n_servers);
        sec.undesired_perms.resize(st.n_servers);
        for (std::size_t n = 0; n < st.n_servers; ++n)
            for (std::size_t r = 0; r < reps; ++r) {
                sec.desired_perms[n].push_back(rng.permutation(st.d(n)));
                sec.undesired_perms[n].push_back(rng.permutation(st.d(n)));
            }
    }
    if (full && s.per_session_combiner)
        for (std::size_t n = 0; n < st.n_servers; ++n)
            sec.session_c.push_back(sample_uniform(st.queried(n), st.queried(n), f, rng));
    return sec;
}

}  // namespace

SessionSecret draw_secret(const SchemeInstance& s, Rng& rng) { return draw_secret_impl(s, rng, true); }
SessionSecret draw_view_secret(const SchemeInstance& s, Rng& rng) { return draw_secret_impl(s, rng, false); }

namespace {

Matrix arrange(const Matrix& actual, bool space, const std::vector<std::size_t>* perm) {
    if (space) return mat_rref(actual).rref;
    return select_rows(actual, *perm);
}

}  // namespace

std::vector<ReplicaView> replica_view(const SchemeInstance& s, std::size_t theta, const SessionSecret& sec,
                                      std::size_t replica) {
    if (s.kind != SchemeKind::Aligned) throw Error(Errc::BadParams, "replica_view needs an aligned scheme");
    if (theta < 1 || theta > 2) throw Error(Errc::BadParams, "theta must be 1 or 2");
    const AlignedStructure& st = s.st;
    std::vector<ReplicaView> out(st.n_servers);
    const std::size_t des = theta - 1, und = 2 - theta;
    for (std::size_t n = 0; n < st.n_servers; ++n) {
        Matrix dv = st.desired[n] * sec.s[replica];
        Matrix uv = st.undesired[n] * sec.s_prime[replica];
        const bool space = st.space_queries;
        out[n].q[des] = arrange(dv, space, space ? nullptr : &sec.desired_perms[n][replica]);
        out[n].q[und] = arrange(uv, space, space ? nullptr : &sec.undesired_perms[n][replica]);
    }
    return out;
}

QueryPlan build_plan(const SchemeInstance& s, std::size_t theta, const SessionSecret& sec) {
    if (theta < 1 || theta > 2) throw Error(Errc::BadParams, "theta must be 1 or 2");
    QueryPlan plan;
    plan.scheme = s.id;
    plan.theta = theta;
    plan.secret = sec;
    const FieldPrime& f = s.field();
    if (s.kind == SchemeKind::Table2322) {
        plan.servers = tab2322_queries(sec.table_row, theta, f);
        plan.combiner_provenance = "table";
        return plan;
    }
    if (s.kind == SchemeKind::Table2432) {
        plan.servers = tab2432_queries(sec.table_row, theta, f);
        plan.combiner_provenance = "table";
        return plan;
    }
    const AlignedStructure& st = s.st;
    std::vector<std::vector<ReplicaView>> views;
    for (std::size_t r = 0; r < st.replicas; ++r) views.push_back(replica_view(s, theta, sec, r));
    plan.servers.resize(st.n_servers);
    for (std::size_t n = 0; n < st.n_servers; ++n) {
        ServerQuery& q = plan.servers[n];
        for (std::size_t k = 0; k < 2; ++k) {
            std::vector<Matrix> blocks;
            for (std::size_t r = 0; r < st.replicas; ++r) blocks.push_back(views[r][n].q[k]);
            q.q[k] = block_diag(blocks);
            if (q.q[k].cols() != st.replicas * st.b) q.q[k] = Matrix(0, st.replicas * st.b, f);
        }
        if (s.per_session_combiner) q.combine = sec.session_c[n];
        else if (s.combiner) q.combine = s.combiner->c[n];
        else q.combine = Matrix::identity(st.queried(n), f);
        q.direct = st.direct[n];
        q.mix = mix_matrix(st.queried(n), st.direct[n], f);
    }
    plan.combiner_provenance =
        s.per_session_combiner ? "random-per-session" : (s.combiner ? s.combiner->provenance : "none");
    return plan;
}

QueryPlan gen_queries(const SchemeInstance& s, std::size_t theta, Rng& rng) {
    if (theta < 1 || theta > 2) throw Error(Errc::BadParams, "theta must be 1 or 2");
    return build_plan(s, theta, draw_secret(s, rng));
}

// ---------------------------------------------------------------------------
// Answers

Vec answer_from_share(const ServerQuery& q, const std::vector<Vec>& own) {
    const std::size_t r = q.q[0].rows();
    if (q.q[1].rows() != r || q.combine.rows() != r || q.combine.cols() != r || q.mix.cols() != 2 * r)
        throw Error(Errc::ShapeMismatch, "query shape");
    if (own.size() < 2) throw Error(Errc::ShapeMismatch, "server holds fewer than 2 messages");
    Vec stacked;
    for (std::size_t k = 0; k < 2; ++k) {
        if (q.q[k].cols() != own[k].size()) throw Error(Errc::ShapeMismatch, "payload width vs share length");
        Vec a = mat_vec(q.combine, mat_vec(q.q[k], own[k]));
        stacked.insert(stacked.end(), a.begin(), a.end());
    }
    return mat_vec(q.mix, stacked);
}

Vec server_answer(const SchemeInstance& s, std::size_t server, const ServerQuery& q, const ShareSet& shares) {
    if (server >= s.n_servers() || server >= shares.shares.size())
        throw Error(Errc::ShapeMismatch, "server index out of range");
    return answer_from_share(q, shares.shares[server]);
}

AnswerSet collect_answers(const SchemeInstance& s, const QueryPlan& plan, const ShareSet& shares) {
    AnswerSet a;
    a.server_randomness.assign(s.n_servers(), Vec{});
    for (std::size_t n = 0; n < s.n_servers(); ++n) {
        a.answers.push_back(server_answer(s, n, plan.servers[n], shares));
        a.download_count += a.answers.back().size();
    }
    return a;
}

std::vector<Vec> random_messages(const SchemeInstance& s, Rng& rng) {
    std::vector<Vec> out(s.params.k_messages, Vec(s.params.message_len()));
    for (auto& w : out)
        for (auto& x : w) x = s.field().uniform(rng);
    return out;
}

Matrix message_rows(const SchemeInstance& s, const QueryPlan& plan, std::size_t server, std::size_t k) {
    return plan.servers[server].q[k] * s.code.share_matrix(server, s.params.message_len());
}

// ---------------------------------------------------------------------------
// Decoding

namespace {

// Unique w with a w = v; DecodeFailure if a lacks full column rank or v is inconsistent.
Vec solve_system(const Matrix& a, const Vec& v) {
    if (mat_rank(a) != a.cols()) throw Error(Errc::DecodeFailure, "desired system has rank below L");
    try {
        Matrix x = solve_left(transpose(a), Matrix::from_rows(a.field(), {v}, v.size()));
        return x.row(0);
    } catch (const Error& e) {
        if (e.code() == Errc::Singular) throw Error(Errc::DecodeFailure, "inconsistent desired system");
        throw;
    }
}

Matrix col_slice(const Matrix& m, std::size_t from, std::size_t count) {
    Matrix out(m.rows(), count, m.field());
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < count; ++c) out.at(r, c) = m(r, from + c);
    return out;
}

Matrix rows_range(const Matrix& m, std::size_t from, std::size_t count) {
    std::vector<std::size_t> idx(count);
    std::iota(idx.begin(), idx.end(), from);
    return select_rows(m, idx);
}

}  // namespace

Vec decode_generic(const SchemeInstance& s, const QueryPlan& plan, const AnswerSet& ans) {
    const FieldPrime& f = s.field();
    const std::size_t Lp = s.params.message_len();
    std::vector<Matrix> fd, fu;
    Vec a;
    for (std::size_t n = 0; n < s.n_servers(); ++n) {
        const ServerQuery& q = plan.servers[n];
        const std::size_t r = q.q[0].rows();
        if (ans.answers[n].size() != q.mix.rows()) throw Error(Errc::ShapeMismatch, "answer length");
        Matrix part[2];
        for (std::size_t k = 0; k < 2; ++k) part[k] = col_slice(q.mix, k * r, r) * (q.combine * message_rows(s, plan, n, k));
        fd.push_back(part[plan.theta - 1]);
        fu.push_back(part[2 - plan.theta]);
        a.insert(a.end(), ans.answers[n].begin(), ans.answers[n].end());
    }
    Matrix Fd = fd.empty() ? Matrix(0, Lp, f) : vstack(fd);
    Matrix Fu = fu.empty() ? Matrix(0, Lp, f) : vstack(fu);
    Matrix nl = left_null_space(Fu);
    return solve_system(nl * Fd, mat_vec(nl, a));
}

Vec decode(const SchemeInstance& s, const QueryPlan& plan, const AnswerSet& ans) {
    if (s.kind != SchemeKind::Aligned) return decode_generic(s, plan, ans);
    const FieldPrime& f = s.field();
    const std::size_t N = s.n_servers();
    const std::size_t Lp = s.params.message_len();
    const std::size_t des = plan.theta - 1, und = 2 - plan.theta;
    // 1. directly downloaded interference
    std::vector<Matrix> und_rows(N), des_rows(N);
    std::vector<Matrix> direct_parts;
    Vec z;
    for (std::size_t n = 0; n < N; ++n) {
        const ServerQuery& q = plan.servers[n];
        if (ans.answers[n].size() != q.mix.rows()) throw Error(Errc::ShapeMismatch, "answer length");
        und_rows[n] = q.combine * message_rows(s, plan, n, und);
        des_rows[n] = message_rows(s, plan, n, des);
        const std::size_t i = q.direct;
        direct_parts.push_back(rows_range(und_rows[n], 0, i));
        const std::size_t off = und == 0 ? 0 : i;
        for (std::size_t k = 0; k < i; ++k) z.push_back(ans.answers[n][off + k]);
    }
    Matrix dm = vstack(direct_parts);
    if (dm.cols() != Lp) dm = Matrix(0, Lp, f);
    // 2-4. predict and cancel the mixed interference, undo C_n
    std::vector<Matrix> sys;
    Vec vals;
    for (std::size_t n = 0; n < N; ++n) {
        const ServerQuery& q = plan.servers[n];
        const std::size_t rws = q.q[0].rows(), i = q.direct;
        if (rws == 0) continue;
        Vec x(rws);
        const std::size_t doff = des == 0 ? 0 : i;
        for (std::size_t k = 0; k < i; ++k) x[k] = ans.answers[n][doff + k];
        if (rws > i) {
            Matrix rest = rows_range(und_rows[n], i, rws - i);
            Matrix coef;
            try {
                coef = solve_left(dm, rest);
            } catch (const Error& e) {
                if (e.code() == Errc::Singular)
                    throw Error(Errc::DecodeFailure, "interference of server " + std::to_string(n + 1) +
                                                         " is outside the downloaded span");
                throw;
            }
            Vec pred = mat_vec(coef, z);
            for (std::size_t k = i; k < rws; ++k) x[k] = f.sub(ans.answers[n][2 * i + (k - i)], pred[k - i]);
        }
        Matrix cinv;
        try {
            cinv = mat_invert(q.combine);
        } catch (const Error& e) {
            if (e.code() == Errc::Singular)
                throw Error(Errc::DecodeFailure, "combiner of server " + std::to_string(n + 1) + " is singular");
            throw;
        }
        Vec u = mat_vec(cinv, x);
        sys.push_back(des_rows[n]);
        vals.insert(vals.end(), u.begin(), u.end());
    }
    // 5. desired system
    return solve_system(vstack(sys), vals);
}

}  // namespace pirlab
