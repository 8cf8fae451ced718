// SPDX-License-Identifier: MIT
#include "pirlab/verify.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <boost/container_hash/hash.hpp>
#include <map>
#include <unordered_map>
#include <thread>

namespace pirlab {

// ---------------------------------------------------------------------------
// Correctness

namespace {

struct TrialOutcome {
    bool ok = false;
    bool decode_failure = false;
    bool download_ok = true;
};

TrialOutcome run_trial(const SchemeInstance& s, std::size_t theta, Rng& rng, const SessionSecret* fixed) {
    TrialOutcome out;
    auto msgs = random_messages(s, rng);
    ShareSet shares = encode(s.code, msgs);
    QueryPlan plan = fixed ? build_plan(s, theta, *fixed) : gen_queries(s, theta, rng);
    AnswerSet ans = collect_answers(s, plan, shares);
    out.download_ok = ans.download_count == s.total_download();
    try {
        out.ok = decode(s, plan, ans) == msgs[theta - 1];
    } catch (const Error& e) {
        if (e.code() != Errc::DecodeFailure) throw;
        out.decode_failure = true;
    }
    return out;
}

void finish(CorrectnessReport& rep, const SchemeInstance& s, const std::vector<TrialOutcome>& res) {
    rep.trials = res.size();
    for (std::size_t i = 0; i < res.size(); ++i) {
        if (!res[i].ok) {
            ++rep.failures;
            if (rep.first_failing_trial == 0) rep.first_failing_trial = i + 1;
        }
        if (res[i].decode_failure) ++rep.decode_failures;
        if (!res[i].download_ok) ++rep.download_mismatches;
    }
    if (s.error_model == ErrorModel::ZeroError) rep.pass = rep.failures == 0;
    else rep.pass = static_cast<double>(rep.failures) < 0.01 * static_cast<double>(rep.trials);
    rep.pass = rep.pass && rep.download_mismatches == 0 && rep.trials > 0;
}

}  // namespace

CorrectnessReport check_correctness(const SchemeInstance& s, std::size_t trials, std::uint64_t seed, unsigned jobs) {
    if (trials < 1) throw Error(Errc::BadParams, "trials must be at least 1");
    std::vector<TrialOutcome> res(trials);
    auto work = [&](std::size_t from, std::size_t step) {
        for (std::size_t i = from; i < trials; i += step) {
            Rng rng(derive_seed(seed, i));
            res[i] = run_trial(s, 1 + i % 2, rng, nullptr);
        }
    };
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(trials)));
    if (jobs == 1) {
        work(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(work, j, jobs);
        for (auto& t : pool) t.join();
    }
    CorrectnessReport rep;
    rep.mode = "sampled";
    finish(rep, s, res);
    return rep;
}

CorrectnessReport check_correctness_exhaustive(const SchemeInstance& s, std::size_t per_row, std::uint64_t seed) {
    if (s.kind == SchemeKind::Aligned) throw Error(Errc::NotEnumerable, "only table-driven schemes are enumerable");
    const std::size_t rows = s.kind == SchemeKind::Table2322 ? 16 : 64;
    std::vector<TrialOutcome> res;
    std::size_t idx = 0;
    for (std::size_t row = 1; row <= rows; ++row)
        for (std::size_t theta = 1; theta <= 2; ++theta)
            for (std::size_t m = 0; m < per_row; ++m) {
                Rng rng(derive_seed(seed, idx++));
                SessionSecret sec;
                sec.table_row = row;
                res.push_back(run_trial(s, theta, rng, &sec));
            }
    CorrectnessReport rep;
    rep.mode = "exhaustive";
    finish(rep, s, res);
    return rep;
}

// ---------------------------------------------------------------------------
// Privacy

namespace {

using Key = std::vector<std::uint32_t>;
struct KeyHash {
    std::size_t operator()(const Key& k) const { return boost::hash_range(k.begin(), k.end()); }
};
using Counts = std::unordered_map<Key, std::array<std::uint64_t, 2>, KeyHash>;

void append_matrix(Key& k, const Matrix& m) {
    k.push_back(static_cast<std::uint32_t>(m.rows()));
    k.push_back(static_cast<std::uint32_t>(m.cols()));
    k.insert(k.end(), m.data().begin(), m.data().end());
}

struct ServerView {
    Matrix q[2];
    Matrix mix;  // tabular only
};

std::vector<ServerView> views_for(const SchemeInstance& s, std::size_t theta, const SessionSecret& sec) {
    std::vector<ServerView> out(s.n_servers());
    if (s.kind == SchemeKind::Aligned) {
        auto rv = replica_view(s, theta, sec, 0);
        for (std::size_t n = 0; n < rv.size(); ++n) {
            out[n].q[0] = std::move(rv[n].q[0]);
            out[n].q[1] = std::move(rv[n].q[1]);
        }
    } else {
        QueryPlan plan = build_plan(s, theta, sec);
        for (std::size_t n = 0; n < plan.servers.size(); ++n) {
            out[n].q[0] = plan.servers[n].q[0];
            out[n].q[1] = plan.servers[n].q[1];
            out[n].mix = plan.servers[n].mix;
        }
    }
    return out;
}

Key full_key(const std::vector<ServerView>& v, const std::vector<std::size_t>& set) {
    Key k;
    for (auto n : set) {
        append_matrix(k, v[n].q[0]);
        append_matrix(k, v[n].q[1]);
        if (v[n].mix.rows()) append_matrix(k, v[n].mix);
    }
    return k;
}

struct FeatureScratch {
    std::vector<Residue> buf, norm;
    std::vector<std::size_t> owner;
    std::vector<Residue> inv;  // inverse table for small fields
};

Residue inverse(const FeatureScratch& sc, const FieldPrime& f, Residue a) {
    return sc.inv.empty() ? f.inv(a) : sc.inv[a];
}

// Rank and pivot-column mask of `n` rows of width `w` stored row-major in `buf`
// (destroyed).
std::pair<std::size_t, std::uint64_t> rank_pivots(Residue* buf, std::size_t n, std::size_t w, const FieldPrime& f,
                                                  const FeatureScratch& sc) {
    std::size_t rank = 0;
    std::uint64_t mask = 0;
    for (std::size_t c = 0; c < w && rank < n; ++c) {
        std::size_t piv = rank;
        while (piv < n && buf[piv * w + c] == 0) ++piv;
        if (piv == n) continue;
        Residue* top = buf + rank * w;
        if (piv != rank) std::swap_ranges(top, top + w, buf + piv * w);
        const Residue inv = inverse(sc, f, top[c]);
        for (std::size_t r = rank + 1; r < n; ++r) {
            Residue* row = buf + r * w;
            if (!row[c]) continue;
            const std::uint64_t neg = f.neg(f.mul(row[c], inv));
            for (std::size_t j = c; j < w; ++j) row[j] = static_cast<Residue>((row[j] + neg * top[j]) % f.p());
        }
        if (c < 64) mask |= std::uint64_t{1} << c;
        ++rank;
    }
    return {rank, mask};
}

// Structural features of a collusion view: ranks of every sub-collection of
// servers per message part and jointly, row-parallel patterns across servers,
// and per-server pivot profiles.
void feature_key(const std::vector<ServerView>& v, const std::vector<std::size_t>& set, const FieldPrime& f,
                 FeatureScratch& sc, Key& k) {
    k.clear();
    const std::size_t t = set.size();
    const std::size_t w = v[set[0]].q[0].cols();
    for (std::size_t part = 0; part < 3; ++part) {
        for (std::size_t mask = 1; mask < (std::size_t{1} << t); ++mask) {
            sc.buf.clear();
            for (std::size_t i = 0; i < t; ++i) {
                if (!(mask >> i & 1u)) continue;
                for (std::size_t k2 = 0; k2 < 2; ++k2) {
                    if (part != 2 && part != k2) continue;
                    const auto& d = v[set[i]].q[k2].data();
                    sc.buf.insert(sc.buf.end(), d.begin(), d.end());
                }
            }
            auto [rank, piv] = rank_pivots(sc.buf.data(), w ? sc.buf.size() / w : 0, w, f, sc);
            k.push_back(static_cast<std::uint32_t>(rank));
            if (part < 2 && (mask & (mask - 1)) == 0) {
                k.push_back(static_cast<std::uint32_t>(piv));
                k.push_back(static_cast<std::uint32_t>(piv >> 32));
            }
        }
        if (part == 2) break;
        // parallel rows across distinct servers, in slot order
        sc.norm.clear();
        sc.owner.clear();
        for (std::size_t i = 0; i < t; ++i) {
            const Matrix& m = v[set[i]].q[part];
            const auto& d = m.data();
            for (std::size_t r = 0; r < m.rows(); ++r) {
                const std::size_t at = sc.norm.size();
                sc.norm.insert(sc.norm.end(), d.begin() + r * w, d.begin() + (r + 1) * w);
                for (std::size_t j = 0; j < w; ++j)
                    if (sc.norm[at + j]) {
                        const Residue inv = inverse(sc, f, sc.norm[at + j]);
                        for (std::size_t jj = j; jj < w; ++jj) sc.norm[at + jj] = f.mul(sc.norm[at + jj], inv);
                        break;
                    }
                sc.owner.push_back(i);
            }
        }
        const std::size_t rows = sc.owner.size();
        for (std::size_t a = 0; a < rows; ++a)
            for (std::size_t b = a + 1; b < rows; ++b)
                if (sc.owner[a] != sc.owner[b])
                    k.push_back(std::equal(sc.norm.begin() + a * w, sc.norm.begin() + (a + 1) * w,
                                           sc.norm.begin() + b * w) ? 1u : 0u);
    }
}

Rational total_variation(const Counts& c, std::uint64_t total) {
    BigInt diff = 0;
    for (const auto& [key, n] : c) diff += n[0] > n[1] ? n[0] - n[1] : n[1] - n[0];
    return Rational(diff, BigInt(2) * BigInt(total));
}

void chi_square(const Counts& c, SetPrivacy& out) {
    // Pool buckets whose expected count is below 5.
    std::vector<std::array<std::uint64_t, 2>> kept;
    std::array<std::uint64_t, 2> pooled{0, 0};
    double n0 = 0, n1 = 0;
    for (const auto& [key, n] : c) {
        n0 += static_cast<double>(n[0]);
        n1 += static_cast<double>(n[1]);
    }
    const double total = n0 + n1;
    auto min_expected = [&](const std::array<std::uint64_t, 2>& b) {
        const double col = static_cast<double>(b[0] + b[1]);
        return std::min(n0, n1) * col / total;
    };
    for (const auto& [key, n] : c) {
        if (min_expected(n) < 5.0) {
            pooled[0] += n[0];
            pooled[1] += n[1];
        } else {
            kept.push_back(n);
        }
    }
    if (pooled[0] + pooled[1] > 0) {
        if (min_expected(pooled) >= 5.0 || kept.empty()) {
            kept.push_back(pooled);
        } else {
            auto smallest = std::min_element(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
                return a[0] + a[1] < b[0] + b[1];
            });
            (*smallest)[0] += pooled[0];
            (*smallest)[1] += pooled[1];
        }
    }
    out.buckets = kept.size();
    if (kept.size() < 2 || min_expected(kept.front()) < 5.0) {
        // a single bucket means both views are constant and equal
        out.verdict = kept.size() == 1 && c.size() == 1 ? "consistent" : "under-powered";
        out.statistic = 0;
        out.dof = 0;
        out.p_value = 1;
        return;
    }
    double stat = 0;
    for (const auto& b : kept) {
        const double col = static_cast<double>(b[0] + b[1]);
        const double e0 = n0 * col / total, e1 = n1 * col / total;
        stat += (static_cast<double>(b[0]) - e0) * (static_cast<double>(b[0]) - e0) / e0;
        stat += (static_cast<double>(b[1]) - e1) * (static_cast<double>(b[1]) - e1) / e1;
    }
    out.statistic = stat;
    out.dof = kept.size() - 1;
    boost::math::chi_squared dist(static_cast<double>(out.dof));
    out.p_value = boost::math::cdf(boost::math::complement(dist, stat));
    out.verdict = out.p_value < out.threshold ? "reject" : "consistent";
}

std::vector<std::size_t> check_set(const SchemeInstance& s, const std::vector<std::size_t>& set) {
    std::vector<std::size_t> out = set;
    std::sort(out.begin(), out.end());
    for (auto n : out)
        if (n >= s.n_servers()) throw Error(Errc::BadParams, "collusion set server out of range");
    return out;
}

std::string canonicalization(const SchemeInstance& s) {
    if (s.kind != SchemeKind::Aligned) return "table";
    return s.st.space_queries ? "rref" : "ordered-rows";
}

double factorial_d(std::size_t k) {
    double r = 1;
    for (std::size_t i = 2; i <= k; ++i) r *= static_cast<double>(i);
    return r;
}

// All invertible b x b matrices over F_p.
std::vector<Matrix> general_linear(std::size_t b, const FieldPrime& f) {
    std::vector<Matrix> out;
    const std::size_t cells = b * b;
    std::vector<Residue> digits(cells, 0);
    for (;;) {
        Matrix m(b, b, f);
        for (std::size_t i = 0; i < cells; ++i) m.at(i / b, i % b) = digits[i];
        if (mat_det(m) != 0) out.push_back(std::move(m));
        std::size_t i = 0;
        while (i < cells && ++digits[i] == f.p()) digits[i++] = 0;
        if (i == cells) break;
    }
    return out;
}

std::vector<std::vector<std::size_t>> perms_of(std::size_t k) {
    std::vector<std::size_t> p(k);
    for (std::size_t i = 0; i < k; ++i) p[i] = i;
    std::vector<std::vector<std::size_t>> out;
    do out.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));
    return out;
}

}  // namespace

PrivacyReport check_privacy_exhaustive(const SchemeInstance& s, const std::vector<std::vector<std::size_t>>& sets_in,
                                       double budget) {
    std::vector<std::vector<std::size_t>> sets;
    for (const auto& c : sets_in) sets.push_back(check_set(s, c));
    std::vector<Counts> counts(sets.size());
    std::uint64_t total = 0;
    auto add = [&](const SessionSecret& sec, std::uint64_t weight) {
        for (std::size_t theta = 1; theta <= 2; ++theta) {
            auto v = views_for(s, theta, sec);
            for (std::size_t i = 0; i < sets.size(); ++i) counts[i][full_key(v, sets[i])][theta - 1] += weight;
        }
        total += weight;
    };
    if (s.kind != SchemeKind::Aligned) {
        const std::size_t rows = s.kind == SchemeKind::Table2322 ? 16 : 64;
        for (std::size_t r = 1; r <= rows; ++r) {
            SessionSecret sec;
            sec.table_row = r;
            add(sec, 1);
        }
    } else {
        const AlignedStructure& st = s.st;
        const FieldPrime& f = s.field();
        if (st.replicas != 1) throw Error(Errc::NotEnumerable, "repeated schemes are not enumerable");
        const double gl_size_bound = std::pow(static_cast<double>(f.p()), static_cast<double>(st.b * st.b));
        if (gl_size_bound > budget) throw Error(Errc::NotEnumerable, "GL(b, p) exceeds the enumeration budget");
        std::vector<Matrix> gl = general_linear(st.b, f);
        double outcomes = std::pow(static_cast<double>(gl.size()), static_cast<double>(st.desired_bases + 1));
        if (!st.space_queries)
            for (std::size_t n = 0; n < st.n_servers; ++n) outcomes *= factorial_d(st.d(n)) * factorial_d(st.d(n));
        if (outcomes > budget)
            throw Error(Errc::NotEnumerable, "randomness space of " + std::to_string(outcomes) + " outcomes");
        // Enumerate (S blocks, S', desired perms, undesired perms) as a mixed-radix counter.
        std::vector<std::size_t> radix;
        for (std::size_t k = 0; k < st.desired_bases + 1; ++k) radix.push_back(gl.size());
        std::vector<std::vector<std::vector<std::size_t>>> plist;
        if (!st.space_queries)
            for (std::size_t n = 0; n < st.n_servers; ++n) {
                plist.push_back(perms_of(st.d(n)));
                radix.push_back(plist.back().size());
                radix.push_back(plist.back().size());
            }
        std::vector<std::size_t> idx(radix.size(), 0);
        for (;;) {
            SessionSecret sec;
            std::vector<Matrix> parts;
            for (std::size_t k = 0; k < st.desired_bases; ++k) parts.push_back(gl[idx[k]]);
            sec.s.push_back(vstack(parts));
            sec.s_prime.push_back(gl[idx[st.desired_bases]]);
            if (!st.space_queries) {
                sec.desired_perms.resize(st.n_servers);
                sec.undesired_perms.resize(st.n_servers);
                for (std::size_t n = 0; n < st.n_servers; ++n) {
                    sec.desired_perms[n] = {plist[n][idx[st.desired_bases + 1 + 2 * n]]};
                    sec.undesired_perms[n] = {plist[n][idx[st.desired_bases + 2 + 2 * n]]};
                }
            }
            add(sec, 1);
            std::size_t i = 0;
            while (i < idx.size() && ++idx[i] == radix[i]) idx[i++] = 0;
            if (i == idx.size()) break;
        }
    }
    PrivacyReport rep;
    rep.mode = "exhaustive";
    rep.canonicalization = canonicalization(s);
    rep.pass = true;
    for (std::size_t i = 0; i < sets.size(); ++i) {
        SetPrivacy sp;
        sp.set = sets[i];
        sp.mode = "exhaustive";
        sp.view = "full";
        sp.samples = static_cast<std::size_t>(total);
        sp.tv = total_variation(counts[i], total);
        sp.verdict = sp.tv == 0 ? "identical" : "differs";
        rep.pass = rep.pass && sp.tv == 0;
        rep.sets.push_back(std::move(sp));
    }
    return rep;
}

PrivacyReport check_privacy_statistical(const SchemeInstance& s, const std::vector<std::vector<std::size_t>>& sets_in,
                                        std::size_t samples, std::uint64_t seed, double alpha) {
    if (samples < 10000) throw Error(Errc::BadParams, "statistical privacy needs at least 10^4 samples per theta");
    std::vector<std::vector<std::size_t>> sets;
    for (const auto& c : sets_in) sets.push_back(check_set(s, c));
    const FieldPrime& f = s.field();
    std::vector<bool> full(sets.size());
    for (std::size_t i = 0; i < sets.size(); ++i) {
        if (s.kind != SchemeKind::Aligned) {
            full[i] = true;
            continue;
        }
        double entries = 0;
        for (auto n : sets[i]) entries += 2.0 * static_cast<double>(s.st.d(n) * s.st.b);
        full[i] = entries * std::log(static_cast<double>(f.p())) <= std::log(static_cast<double>(samples) / 10.0);
    }
    std::vector<Counts> counts(sets.size());
    FeatureScratch scratch;
    if (f.p() <= 65536) {
        scratch.inv.assign(f.p(), 0);
        for (Residue a = 1; a < f.p(); ++a) scratch.inv[a] = f.inv(a);
    }
    Key key;
    for (std::size_t theta = 1; theta <= 2; ++theta) {
        Rng rng(derive_seed(seed, theta));
        for (std::size_t k = 0; k < samples; ++k) {
            SessionSecret sec = draw_view_secret(s, rng);
            auto v = views_for(s, theta, sec);
            for (std::size_t i = 0; i < sets.size(); ++i) {
                if (full[i]) key = full_key(v, sets[i]);
                else feature_key(v, sets[i], f, scratch, key);
                counts[i][key][theta - 1] += 1;
            }
        }
    }
    PrivacyReport rep;
    rep.mode = "statistical";
    rep.canonicalization = canonicalization(s);
    rep.pass = true;
    const double threshold = alpha / static_cast<double>(std::max<std::size_t>(1, sets.size()));
    for (std::size_t i = 0; i < sets.size(); ++i) {
        SetPrivacy sp;
        sp.set = sets[i];
        sp.mode = "statistical";
        sp.view = full[i] ? "full" : "features";
        sp.samples = samples;
        sp.threshold = threshold;
        chi_square(counts[i], sp);
        rep.pass = rep.pass && sp.verdict == "consistent";
        rep.sets.push_back(std::move(sp));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Dimensions

std::vector<F13DimensionCase> f13_dimension_cases(const StorageCode& code) {
    if (code.n_servers != 4 || code.k_c != 2) throw Error(Errc::BadParams, "expects the F_13 code");
    // symbol x_i (i = 1..4) lives on servers 1-2, alpha_i on servers 3-4
    auto sym = [&](bool coded, std::size_t i) {
        const std::size_t server = (coded ? 2 : 0) + (i - 1) / 2;
        return select_rows(code.share_matrix(server, 4), {(i - 1) % 2});
    };
    std::vector<F13DimensionCase> out;
    for (char which : {'i', 'j'})
        for (std::size_t a = 1; a <= 2; ++a)
            for (std::size_t b = 3; b <= 4; ++b)
                for (std::size_t c = 1; c <= 2; ++c) {
                    F13DimensionCase lc;
                    lc.which = which;
                    lc.idx[0] = a;
                    lc.idx[1] = b;
                    lc.idx[2] = c;
                    const int i4 = tab2432_i4(a, b, c);
                    lc.idx4 = static_cast<std::size_t>(which == 'i' ? i4 : 7 - i4);
                    lc.idx4p = 7 - lc.idx4;
                    Matrix base = vstack(std::vector<Matrix>{sym(false, a), sym(false, b), sym(true, c)});
                    lc.dim4 = mat_rank(vstack(base, sym(true, lc.idx4)));
                    lc.dim4p = mat_rank(vstack(base, sym(true, lc.idx4p)));
                    lc.ok = which == 'i' ? (lc.dim4 == 4 && lc.dim4p == 3) : (lc.dim4 == 3 && lc.dim4p == 4);
                    out.push_back(lc);
                }
    return out;
}

DimensionReport check_dimensions(const SchemeInstance& s, std::uint64_t seed, std::size_t repeats) {
    DimensionReport rep;
    rep.expected_desired = s.params.message_len();
    rep.desired_min = rep.interference_min = static_cast<std::size_t>(-1);
    auto record = [&](const QueryPlan& plan) {
        std::vector<Matrix> d, u;
        for (std::size_t n = 0; n < s.n_servers(); ++n) {
            d.push_back(message_rows(s, plan, n, plan.theta - 1));
            u.push_back(message_rows(s, plan, n, 2 - plan.theta));
        }
        const std::size_t rd = mat_rank(vstack(d)), ru = mat_rank(vstack(u));
        rep.desired_min = std::min(rep.desired_min, rd);
        rep.desired_max = std::max(rep.desired_max, rd);
        rep.interference_min = std::min(rep.interference_min, ru);
        rep.interference_max = std::max(rep.interference_max, ru);
        ++rep.repeats;
    };
    if (s.kind == SchemeKind::Aligned) {
        rep.expected_interference = s.st.replicas * s.st.interference;
        for (std::size_t i = 0; i < repeats; ++i) {
            Rng rng(derive_seed(seed, i));
            record(gen_queries(s, 1 + i % 2, rng));
        }
    } else {
        const std::size_t rows = s.kind == SchemeKind::Table2322 ? 16 : 64;
        for (std::size_t r = 1; r <= rows; ++r)
            for (std::size_t theta = 1; theta <= 2; ++theta) {
                SessionSecret sec;
                sec.table_row = r;
                record(build_plan(s, theta, sec));
            }
        if (s.kind == SchemeKind::Table2432) rep.f13_cases = f13_dimension_cases(s.code);
    }
    rep.pass = rep.desired_min == rep.expected_desired && rep.desired_max == rep.expected_desired;
    if (rep.expected_interference)
        rep.pass = rep.pass && rep.interference_min == rep.expected_interference &&
                   rep.interference_max == rep.expected_interference;
    for (const auto& c : rep.f13_cases) rep.pass = rep.pass && c.ok;
    return rep;
}

// ---------------------------------------------------------------------------
// Linear audit

AuditReport audit_linear(const std::vector<Matrix>& q, std::size_t L, std::size_t k_c) {
    AuditReport rep;
    rep.L = L;
    const std::size_t N = q.size();
    for (const auto& m : q) rep.ranks.push_back(mat_rank(m));
    bool sym = !rep.ranks.empty() && std::all_of(rep.ranks.begin(), rep.ranks.end(), [&](std::size_t r) {
        return r == rep.ranks.front();
    });
    for (std::size_t a = 0; a < N; ++a)
        for (std::size_t b = a + 1; b < N; ++b) rep.pair_dims.push_back(row_space_intersect(q[a], q[b]).rows());
    if (!sym) {
        rep.status = Errc::AsymmetryDetected;
        return rep;
    }
    rep.d = rep.ranks.front();
    rep.epsilon_l = static_cast<std::int64_t>(N * rep.d) - static_cast<std::int64_t>(L);
    rep.epsilon = make_rational(rep.epsilon_l, static_cast<long long>(L));
    const bool equal_pairs = std::all_of(rep.pair_dims.begin(), rep.pair_dims.end(),
                                         [&](std::size_t x) { return x == rep.pair_dims.front(); });
    if (!equal_pairs) {
        rep.status = Errc::AsymmetryDetected;
        return rep;
    }
    rep.alpha_d = rep.pair_dims.empty() ? 0 : rep.pair_dims.front();
    rep.alpha = rep.d ? make_rational(static_cast<long long>(rep.alpha_d), static_cast<long long>(rep.d)) : Rational(0);
    if (N == 4 && k_c == 2) {
        const std::int64_t lhs = 3 * static_cast<std::int64_t>(rep.alpha_d);
        const std::int64_t rhs = static_cast<std::int64_t>(rep.d) + 2 * rep.epsilon_l;
        rep.inequality_holds = lhs <= rhs;
        rep.tight = lhs == rhs;
    }
    return rep;
}

AuditReport audit_scheme(const SchemeInstance& s, std::uint64_t seed) {
    Rng rng(seed);
    QueryPlan plan = gen_queries(s, 2, rng);
    std::vector<Matrix> q;
    for (const auto& sq : plan.servers) q.push_back(sq.q[1]);
    return audit_linear(q, s.params.message_len(), s.code.k_c);
}

}  // namespace pirlab
