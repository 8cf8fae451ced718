// SPDX-License-Identifier: MIT
//
// Acceptance checks. With no argument every criterion runs; with a number only
// that one. Prints one PASS/FAIL line per criterion, exits 1 on any failure.
#include <array>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include "pirlab/capacity.hpp"
#include "pirlab/simnet.hpp"
#include "pirlab/verify.hpp"

#ifndef PIRLAB_CLI_PATH
#error "PIRLAB_CLI_PATH must name the pirlab executable"
#endif

using namespace pirlab;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (ok) return;
        pass = false;
        detail << " [" << what << "]";
    }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

SchemeInstance build(const std::string& id, std::uint64_t p, bool combiner = true) {
    SchemeOverrides ov;
    ov.p = p;
    ov.build_combiner = combiner;
    return registry_build(id, ov);
}

void criterion1(Outcome& o) {
    const auto t0 = Clock::now();
    SchemeInstance s = registry_build("ctrex-2422");
    o.require(s.params.p == 349, "p = 349");
    o.require(s.total_download() == 20, "download 20");
    CorrectnessReport r = check_correctness(s, 1000, 1);
    o.require(r.pass && r.failures == 0 && r.download_mismatches == 0, "1000 trials exact");
    const Rational rate = declared_rate(s);
    const Rational conj = capacity_formula(CapacityKind::FghkConjecture, {2, 4, 2, 2});
    o.require(rate == make_rational(3, 5), "rate 3/5");
    o.require(rate > conj, "3/5 > 4/7");
    const double secs = seconds_since(t0);
    o.require(secs < 5, "under 5 s");
    o.detail << "trials=" << r.trials << " failures=" << r.failures << " rate=" << to_string(rate)
             << " conjecture=" << to_string(conj) << " time=" << secs << "s";
}

void criterion2(Outcome& o) {
    const auto t0 = Clock::now();
    SchemeInstance s = registry_build("ctrex-2422");
    const auto id = identity_realization(s.st);
    const std::vector<std::vector<std::size_t>> pick = {{0, 1}, {0, 2}, {1, 2}, {1, 2}};
    std::vector<Matrix> rows;
    for (std::size_t n = 0; n < 4; ++n) rows.push_back(select_rows(undesired_atoms(s.st, s.code, n, id[n]), pick[n]));
    const Realization r = {{{0, 1, 2}}, {{0, 2, 1}}, {{1, 2, 0}}, {{1, 2, 0}}};
    const Residue det = mat_det(interference_matrix(*s.combiner, s.st, s.code, r, vstack(rows)));
    CombinerReport rep = verify_combiner(*s.combiner, s.st, s.code);
    const double secs = seconds_since(t0);
    o.require(det == 321, "det 321");
    o.require(rep.pass && rep.checked == 1296 && rep.failing == 0, "1296 realizations");
    o.require(secs < 10, "under 10 s");
    o.detail << "det=" << det << " realizations=" << rep.checked << " failing=" << rep.failing << " time=" << secs
             << "s";
}

void criterion3(Outcome& o) {
    // Measured over M replicas, so the interference rank is M * I.
    auto dims = [&](const std::string& id, std::size_t interference, std::size_t repeats) {
        SchemeInstance s = build(id, 10007, false);
        const std::size_t m = s.params.replicas;
        DimensionReport r = check_dimensions(s, 1, repeats);
        const bool ok = r.pass && r.expected_interference == m * interference &&
                        r.interference_min == m * interference && r.interference_max == m * interference;
        o.require(ok, id);
        o.detail << id << ":M=" << m << ",MI=" << r.interference_min << "/" << m * interference << " ";
    };
    DimensionReport c = check_dimensions(registry_build("ctrex-2422"), 1, 100);
    o.require(c.pass && c.desired_min == 12 && c.desired_max == 12 && c.interference_min == 8 &&
                  c.interference_max == 8,
              "ctrex-2422 12/8");
    o.detail << "ctrex-2422:desired=" << c.desired_min << " I=" << c.interference_min << " ";
    for (std::size_t n : {3, 4, 5}) dims("class-t2(" + std::to_string(n) + ")", n * n - 2 * n + 2, 10);
    for (auto [n, t] : {std::pair<std::size_t, std::size_t>{4, 3}, {5, 3}, {5, 4}})
        dims("class-tgen(" + std::to_string(n) + "," + std::to_string(t) + ")", n * n - 2 * n + t, 10);
}

void criterion4(Outcome& o) {
    const auto t0 = Clock::now();
    for (const std::string id : {"tab-2322", "tab-2432"}) {
        SchemeInstance s = registry_build(id);
        CorrectnessReport c = check_correctness_exhaustive(s, 200, 1);
        o.require(c.pass && c.failures == 0, id + " correctness");
        PrivacyReport p = check_privacy_exhaustive(s, s.params.collusion_sets);
        bool tv0 = p.pass;
        for (const auto& set : p.sets) tv0 = tv0 && set.tv == 0;
        o.require(tv0, id + " privacy");
        o.detail << id << ":trials=" << c.trials << " failures=" << c.failures << " sets=" << p.sets.size() << " ";
    }
    std::size_t facts = 0;
    for (const auto& c : f13_dimension_cases(code_f13_4server())) facts += c.ok;
    o.require(facts == 16, "16 dimension facts");
    const double secs = seconds_since(t0);
    o.require(secs < 30, "under 30 s");
    o.detail << "dimension-facts=" << facts << " time=" << secs << "s";
}

void criterion5(Outcome& o) {
    SchemeInstance a = build("class-t2", 10007);
    const std::size_t m = a.params.replicas;
    o.require(a.params.message_len() == 12 * m && a.total_download() == 22 * m, "12/22 accounting");
    o.require(a.combiner && a.combiner->provenance == "searched", "searched combiner");
    CorrectnessReport ra = check_correctness(a, 1000, 1);
    o.require(ra.failures == 0 && ra.download_mismatches == 0, "class-t2 zero errors");
    SchemeInstance b = build("class-tgen", 10007);
    const std::size_t mb = b.params.replicas;
    o.require(b.params.message_len() == 12 * mb && b.total_download() == 23 * mb, "12M/23M accounting");
    CorrectnessReport rb = check_correctness(b, 1000, 1);
    o.require(rb.pass && rb.failures * 100 < rb.trials && rb.download_mismatches == 0, "class-tgen < 1%");
    o.detail << "class-t2:M=" << m << " L=" << a.params.message_len() << " D=" << a.total_download()
             << " failures=" << ra.failures << " class-tgen:M=" << mb << " L=" << b.params.message_len()
             << " D=" << b.total_download() << " failures=" << rb.failures << "/" << rb.trials;
}

void criterion6(Outcome& o) {
    const std::vector<Rational> want = {make_rational(6, 11), make_rational(4, 7), make_rational(4, 7),
                                        make_rational(4, 7)};
    auto table = four_case_table();
    bool table_ok = table.size() == 4;
    for (std::size_t i = 0; table_ok && i < 4; ++i) table_ok = table[i].value == want[i];
    o.require(table_ok, "four-case table");
    std::size_t agree = 0, total = 0;
    for (std::size_t n = 3; n <= 12; ++n)
        for (std::size_t t = 2; t < n; ++t, ++total)
            agree += capacity_formula(CapacityKind::Theorem3, {2, n, t, n - 1}) == outer_bound_general(2, n, t, n - 1);
    o.require(agree == total, "theorem3 == general bound");
    const Rational c2 = outer_bound_2422_family(2), c100 = outer_bound_2422_family(100);
    const double gap = std::abs(to_double(c100 - make_rational(5, 14)));
    o.require(c2 == make_rational(8, 13), "C(2) = 8/13");
    o.require(gap < 1e-9, "|C(100) - 5/14| < 1e-9");
    o.detail << "table=";
    for (const auto& c : table) o.detail << to_string(c.value) << ",";
    o.detail << " agree=" << agree << "/" << total << " C(2)=" << to_string(c2) << " gap(100)=" << gap;
}

void criterion7(Outcome& o) {
    const std::vector<std::pair<std::string, Rational>> schemes = {{"cyclic-2422", make_rational(8, 13)},
                                                                   {"disjoint-2423", make_rational(4, 7)},
                                                                   {"ex1-restricted", make_rational(2, 3)},
                                                                   {"ex2-restricted", make_rational(4, 7)}};
    for (const auto& [id, rate] : schemes) {
        SchemeInstance s = registry_build(id);
        CorrectnessReport r = check_correctness(s, 500, 1);
        o.require(declared_rate(s) == rate, id + " rate");
        o.require(r.failures == 0, id + " decode errors");
        o.detail << id << ":rate=" << to_string(declared_rate(s)) << " failures=" << r.failures << "/" << r.trials
                 << " ";
    }
    SchemeInstance c = build("cyclic-2422", 3, false);
    PrivacyReport adj = check_privacy_statistical(c, {{0, 1}, {1, 2}, {2, 3}, {0, 3}}, 100000, 1);
    o.require(adj.pass, "adjacent pairs consistent");
    PrivacyReport far = check_privacy_statistical(c, {{0, 2}}, 100000, 1);
    o.require(far.sets[0].verdict == "reject", "pair {1,3} rejected");
    o.detail << "cyclic adjacent=" << (adj.pass ? "consistent" : "reject") << " {1,3}=" << far.sets[0].verdict;
}

void criterion8(Outcome& o) {
    AuditReport r = audit_scheme(registry_build("ctrex-2422"), 1);
    o.require(!r.status && r.d == 3 && r.epsilon_l == 0 && r.alpha_d == 1, "d=3 eps=0 alpha_d=1");
    o.require(r.inequality_holds && *r.inequality_holds && r.tight, "equality");
    SchemeInstance s = registry_build("ctrex-2422");
    Rng rng(1);
    QueryPlan plan = gen_queries(s, 2, rng);
    const Matrix& same = plan.servers[0].q[1];
    AuditReport m = audit_linear({same, same, same, same}, s.params.message_len());
    o.require(m.alpha_d == m.d && m.inequality_holds && !*m.inequality_holds, "mutation flagged");
    o.detail << "d=" << r.d << " epsL=" << r.epsilon_l << " alpha_d=" << r.alpha_d << " tight=" << r.tight
             << " mutation:alpha_d=" << m.alpha_d << " holds=" << (m.inequality_holds && *m.inequality_holds);
}

void criterion9(Outcome& o) {
    std::size_t runs = 0, rejections = 0, underpowered = 0;
    for (const std::string& id : registry_ids()) {
        if (id == "baseline-download-all") continue;
        std::optional<std::uint64_t> p;
        if (!id.starts_with("tab-")) p = id == "class-tgen" ? 5 : 3;
        SchemeOverrides ov;
        ov.p = p;
        ov.build_combiner = false;
        SchemeInstance s = registry_build(id, ov);
        std::size_t rej = 0;
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            PrivacyReport r = check_privacy_statistical(s, s.params.collusion_sets, 100000, seed);
            ++runs;
            for (const auto& set : r.sets) {
                rej += set.verdict == "reject";
                underpowered += set.verdict == "under-powered";
            }
        }
        rejections += rej;
        o.require(rej == 0, id + " rejected");
        o.detail << id << "@" << s.params.p << ":rej=" << rej << " ";
    }
    o.detail << "runs=" << runs << " rejections=" << rejections << " under-powered=" << underpowered;
}

std::string capture(const std::string& args) {
    const std::string cmd = std::string(PIRLAB_CLI_PATH) + " " + args + " 2>/dev/null";
    std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
    if (!pipe) return {};
    std::string out;
    std::array<char, 4096> buf{};
    std::size_t got;
    while ((got = std::fread(buf.data(), 1, buf.size(), pipe.get())) > 0) out.append(buf.data(), got);
    return out;
}

void criterion10(Outcome& o) {
    const std::vector<std::string> commands = {
        "run ctrex-2422 --theta 1 --seed 7 --json",
        "run class-tgen --theta 2 --seed 7 --json",
        "run tab-2432 --theta 2 --seed 7 --json",
        "run disjoint-2423 --theta 1 --seed 7 --json",
        "verify ctrex-2422 --suite all --trials 50 --samples 10000 --repeats 3 --seed 7 --json",
        "verify tab-2322 --suite all --trials 4 --seed 7 --json",
        "verify cyclic-2422 --suite privacy --p 3 --collude 1,3 --samples 10000 --seed 7 --json",
        "search --kind combiner --scheme class-t2 --seed 7 --json",
        "search --kind pmatrix --n 5 --t 3 --p 10007 --seed 7 --json",
        "capacity --kind bound2422 --kmax 20 --format json",
        "capacity --kind table-four-cases --format json",
        "capacity --kind limits --format json",
    };
    std::size_t same = 0;
    for (const auto& c : commands) {
        const std::string a = capture(c), b = capture(c);
        const bool ok = !a.empty() && a == b;
        same += ok;
        o.require(ok, c);
    }
    o.detail << "identical=" << same << "/" << commands.size();
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::function<void(Outcome&)>> criteria = {criterion1, criterion2, criterion3, criterion4,
                                                                 criterion5, criterion6, criterion7, criterion8,
                                                                 criterion9, criterion10};
    std::size_t only = 0;
    if (argc > 1) only = std::strtoul(argv[1], nullptr, 10);
    if (argc > 2 || (argc > 1 && (only < 1 || only > criteria.size()))) {
        std::cerr << "usage: acceptance [1-10]\n";
        return 64;
    }
    bool all = true;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (only && only != i + 1) continue;
        Outcome o;
        try {
            criteria[i](o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " exception: " << e.what();
        }
        std::cout << "criterion " << (i + 1) << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail.str()
                  << std::endl;
        all = all && o.pass;
    }
    return all ? 0 : 1;
}
