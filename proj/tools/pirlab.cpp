// SPDX-License-Identifier: MIT
//
// pirlab: run retrieval sessions, verification suites, searches and capacity tables.
//
// Exit codes: 0 pass, 1 checks failed or library error, 2 decode failure,
// 3 search exhausted, 64 usage.
#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "pirlab/capacity.hpp"
#include "pirlab/simnet.hpp"
#include "pirlab/verify.hpp"

using namespace pirlab;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitFail = 1;
constexpr int kExitDecode = 2;
constexpr int kExitSearch = 3;
constexpr int kExitUsage = 64;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string decimal(const Rational& r) {
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(12) << to_double(r);
    return ss.str();
}

json rational_json(const Rational& r) { return json{{"exact", to_string(r)}, {"decimal", decimal(r)}}; }

json one_based(const std::vector<std::size_t>& set) {
    json a = json::array();
    for (auto x : set) a.push_back(x + 1);
    return a;
}

std::vector<std::size_t> parse_set(const std::string& text) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t pos = 0;
        unsigned long v = 0;
        try {
            v = std::stoul(item, &pos);
        } catch (const std::exception&) {
            throw UsageError("bad server list '" + text + "'");
        }
        if (pos != item.size() || v < 1) throw UsageError("bad server list '" + text + "'");
        out.push_back(v - 1);
    }
    if (out.empty()) throw UsageError("empty server list");
    std::sort(out.begin(), out.end());
    return out;
}

void emit(const json& report, const std::string& out) {
    const std::string text = report.dump(2) + "\n";
    if (out.empty() || out == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(out, std::ios::binary);
    if (!f) throw Error(Errc::IoError, "cannot write " + out);
    f << text;
}

std::uint64_t seed_or_env(std::uint64_t seed, bool given) {
    if (given) return seed;
    if (const char* env = std::getenv("PIRLAB_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw UsageError("PIRLAB_SEED is not an integer");
        }
    }
    return 1;
}

// ---------------------------------------------------------------------------
// Report serialization

json correctness_json(const CorrectnessReport& r) {
    return json{{"suite", "correctness"},
                {"mode", r.mode},
                {"trials", r.trials},
                {"failures", r.failures},
                {"decode_failures", r.decode_failures},
                {"download_mismatches", r.download_mismatches},
                {"first_failing_trial", r.first_failing_trial},
                {"pass", r.pass}};
}

json privacy_json(const PrivacyReport& r) {
    json sets = json::array();
    for (const auto& s : r.sets) {
        json j{{"servers", one_based(s.set)}, {"mode", s.mode}, {"view", s.view}, {"verdict", s.verdict}};
        if (s.mode == "exhaustive") {
            j["tv"] = rational_json(s.tv);
            j["outcomes"] = s.samples;
        } else {
            std::ostringstream st, pv, th;
            st << std::setprecision(10) << s.statistic;
            pv << std::setprecision(10) << s.p_value;
            th << std::setprecision(10) << s.threshold;
            j["samples_per_theta"] = s.samples;
            j["buckets"] = s.buckets;
            j["dof"] = s.dof;
            j["statistic"] = st.str();
            j["p_value"] = pv.str();
            j["threshold"] = th.str();
        }
        sets.push_back(j);
    }
    return json{{"suite", "privacy"},
                {"mode", r.mode},
                {"canonicalization", r.canonicalization},
                {"sets", sets},
                {"pass", r.pass}};
}

json dimensions_json(const DimensionReport& r) {
    json j{{"suite", "dimensions"},
           {"repeats", r.repeats},
           {"expected_desired", r.expected_desired},
           {"desired", {r.desired_min, r.desired_max}}};
    if (r.expected_interference) j["expected_interference"] = r.expected_interference;
    j["interference"] = {r.interference_min, r.interference_max};
    if (!r.f13_cases.empty()) {
        json cases = json::array();
        for (const auto& c : r.f13_cases)
            cases.push_back({{"which", std::string(1, c.which)},
                             {"triple", {c.idx[0], c.idx[1], c.idx[2]}},
                             {"fourth", c.idx4},
                             {"other", c.idx4p},
                             {"dims", {c.dim4, c.dim4p}},
                             {"ok", c.ok}});
        j["f13_cases"] = cases;
    }
    j["pass"] = r.pass;
    return j;
}

json audit_json(const AuditReport& r) {
    json j{{"suite", "audit"}, {"ranks", r.ranks}, {"L", r.L}, {"pair_dims", r.pair_dims}};
    if (r.status) {
        // the audit quantities are defined for symmetric schemes only
        j["status"] = errc_name(*r.status);
        j["applicable"] = false;
        j["pass"] = true;
        return j;
    }
    j["applicable"] = true;
    j["d"] = r.d;
    j["epsilon_L"] = r.epsilon_l;
    j["epsilon"] = rational_json(r.epsilon);
    j["alpha_d"] = r.alpha_d;
    j["alpha"] = rational_json(r.alpha);
    if (r.inequality_holds) {
        j["inequality_holds"] = *r.inequality_holds;
        j["tight"] = r.tight;
    }
    j["pass"] = r.inequality_holds.value_or(true);
    return j;
}

json scheme_json(const SchemeInstance& s) {
    return json{{"id", s.id},
                {"k", s.params.k_messages},
                {"n", s.params.n_servers},
                {"t", s.params.t_privacy},
                {"k_c", s.params.k_c},
                {"L", s.params.L},
                {"replicas", s.params.replicas},
                {"p", s.field().p()},
                {"error_model", error_model_name(s.error_model)},
                {"download", s.download},
                {"declared_rate", rational_json(declared_rate(s))}};
}

// ---------------------------------------------------------------------------
// Commands

struct Common {
    std::uint64_t seed = 1;
    std::uint64_t p = 0;
    std::string out;
    bool json_stdout = false;
    unsigned jobs = 1;
};

SchemeOverrides overrides(const Common& c, bool build_combiner) {
    SchemeOverrides ov;
    if (c.p) ov.p = c.p;
    ov.build_combiner = build_combiner;
    ov.combiner_seed = c.seed;
    return ov;
}

int cmd_run(const Common& c, const std::string& id, std::size_t theta) {
    if (theta < 1 || theta > 2) throw UsageError("--theta must be 1 or 2");
    SchemeInstance s = registry_build(id, overrides(c, true));
    Transcript t = run_session(s, session_messages(s, c.seed), theta, c.seed);
    if (!c.out.empty()) save_transcript(t, c.out);
    if (c.json_stdout) std::cout << transcript_json(t);
    else
        std::cout << "rate=" << to_string(declared_rate(s)) << " download=" << t.counts.download << " "
                  << t.status << "\n";
    if (t.status == "decode-failure") return kExitDecode;
    return t.status == "ok" ? 0 : kExitFail;
}

int cmd_verify(const Common& c, const std::string& id, const std::string& suite, std::size_t trials,
               std::size_t samples, std::size_t repeats, const std::vector<std::string>& collude,
               const std::string& privacy_mode) {
    static const std::vector<std::string> suites = {"correctness", "privacy", "dimensions", "audit", "all"};
    if (std::find(suites.begin(), suites.end(), suite) == suites.end()) throw UsageError("unknown suite " + suite);
    if (privacy_mode != "auto" && privacy_mode != "exhaustive" && privacy_mode != "statistical")
        throw UsageError("unknown privacy mode " + privacy_mode);
    std::vector<std::vector<std::size_t>> sets;
    for (const auto& text : collude) sets.push_back(parse_set(text));

    const bool need_combiner = suite == "correctness" || suite == "all";
    SchemeInstance s = registry_build(id, overrides(c, need_combiner));
    if (sets.empty()) sets = s.params.collusion_sets;
    auto want = [&](const char* name) { return suite == "all" || suite == name; };

    json results = json::array();
    bool pass = true;
    if (want("correctness")) {
        CorrectnessReport r = s.kind == SchemeKind::Aligned ? check_correctness(s, trials, c.seed, c.jobs)
                                                            : check_correctness_exhaustive(s, trials, c.seed);
        pass = pass && r.pass;
        results.push_back(correctness_json(r));
    }
    if (want("privacy")) {
        std::string mode = privacy_mode;
        if (mode == "auto") mode = s.kind == SchemeKind::Aligned ? "statistical" : "exhaustive";
        PrivacyReport r = mode == "exhaustive" ? check_privacy_exhaustive(s, sets)
                                               : check_privacy_statistical(s, sets, samples, c.seed);
        pass = pass && r.pass;
        results.push_back(privacy_json(r));
    }
    if (want("dimensions")) {
        DimensionReport r = check_dimensions(s, c.seed, repeats);
        pass = pass && r.pass;
        results.push_back(dimensions_json(r));
    }
    if (want("audit")) {
        json a = audit_json(audit_scheme(s, c.seed));
        pass = pass && a["pass"].get<bool>();
        results.push_back(a);
    }
    json config{{"scheme", scheme_json(s)},
                {"suite", suite},
                {"seed", c.seed},
                {"trials", trials},
                {"samples", samples},
                {"repeats", repeats},
                {"privacy_mode", privacy_mode}};
    json sets_json = json::array();
    for (const auto& st : sets) sets_json.push_back(one_based(st));
    config["collusion_sets"] = sets_json;
    json report{{"command", "verify"}, {"config", config}, {"results", results}, {"pass", pass}};
    if (!c.out.empty()) emit(report, c.out);
    if (c.json_stdout || c.out.empty()) emit(report, "");
    if (!c.json_stdout && !c.out.empty()) std::cout << id << " " << suite << " " << (pass ? "pass" : "fail") << "\n";
    return pass ? 0 : kExitFail;
}

int cmd_search(const Common& c, const std::string& kind, const std::string& id, std::size_t n, std::size_t t,
               std::size_t tries) {
    if (tries < 1) throw UsageError("--tries must be at least 1");
    json config{{"kind", kind}, {"seed", c.seed}, {"tries", tries}};
    json result;
    Rng rng(c.seed);
    if (kind == "combiner") {
        if (id.empty()) throw UsageError("--scheme is required for a combiner search");
        SchemeInstance s = registry_build(id, overrides(c, false));
        if (s.kind != SchemeKind::Aligned) throw UsageError("table-driven schemes have no combiner");
        config["scheme"] = scheme_json(s);
        const CombinerShape shape = s.st.replicas > 1 ? CombinerShape::ReplicaBlock : CombinerShape::Dense;
        SearchResult r = search_combiner(s.st, s.code, s.field(), rng, tries, shape);
        json cs = json::array();
        for (const auto& m : r.set.c) {
            json rows = json::array();
            for (std::size_t i = 0; i < m.rows(); ++i) rows.push_back(m.row(i));
            cs.push_back(rows);
        }
        result = {{"provenance", r.set.provenance},
                  {"tries", r.set.tries},
                  {"direct", r.set.direct},
                  {"c", cs},
                  {"certificate",
                   {{"p1", r.report.p1},
                    {"mode", r.report.mode},
                    {"realizations", r.report.realizations_total},
                    {"checked", r.report.checked},
                    {"failing", r.report.failing},
                    {"pass", r.report.pass}}}};
    } else if (kind == "pmatrix") {
        if (!c.p) throw UsageError("--p is required for a P matrix search");
        config["n"] = n;
        config["t"] = t;
        config["p"] = c.p;
        PMatrix pm = build_p_matrix(n, t, FieldPrime(c.p), rng, tries);
        json rows = json::array();
        for (std::size_t i = 0; i < pm.p.rows(); ++i) rows.push_back(pm.p.row(i));
        json common = json::array();
        for (const auto& [subset, vec] : pm.common) common.push_back({{"servers", one_based(subset)}, {"m", vec}});
        // rank of every T-subset of common vectors
        json ranks = json::array();
        std::vector<bool> pick(n, false);
        std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(t), true);
        do {
            std::vector<std::size_t> subset;
            for (std::size_t j = 0; j < n; ++j)
                if (pick[j]) subset.push_back(j);
            std::vector<std::vector<Residue>> vs;
            for (std::size_t drop = 0; drop < t; ++drop) {
                std::vector<std::size_t> sub;
                for (std::size_t x = 0; x < t; ++x)
                    if (x != drop) sub.push_back(subset[x]);
                vs.push_back(pm.common.at(sub));
            }
            Matrix m(vs.size(), t, FieldPrime(c.p));
            for (std::size_t r = 0; r < vs.size(); ++r)
                for (std::size_t x = 0; x < t; ++x) m.at(r, x) = vs[r][x];
            ranks.push_back({{"servers", one_based(subset)}, {"rank", mat_rank(m)}});
        } while (std::prev_permutation(pick.begin(), pick.end()));
        result = {{"tries", pm.tries}, {"p", rows}, {"common", common}, {"subset_ranks", ranks}};
    } else {
        throw UsageError("--kind must be combiner or pmatrix");
    }
    json report{{"command", "search"}, {"config", config}, {"results", json::array({result})}, {"pass", true}};
    emit(report, c.out);
    return 0;
}

int cmd_capacity(const Common& c, const std::string& kind, std::size_t k, std::size_t n, std::size_t t,
                 std::size_t k_c, std::size_t kmax, const std::string& format) {
    if (format != "csv" && format != "json") throw UsageError("--format must be csv or json");
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    auto rational_cells = [](const Rational& r) { return std::vector<std::string>{to_string(r), decimal(r)}; };
    if (kind == "bound2422") {
        if (kmax < 1) throw UsageError("--kmax must be at least 1");
        header = {"K", "bound", "decimal"};
        const auto series = outer_bound_2422_series(kmax);
        for (std::size_t i = 0; i < series.size(); ++i) {
            auto cells = rational_cells(series[i]);
            rows.push_back({std::to_string(i + 1), cells[0], cells[1]});
        }
    } else if (kind == "bound-general") {
        if (kmax < 1) throw UsageError("--kmax must be at least 1");
        header = {"K", "bound", "decimal"};
        const auto series = outer_bound_general_series(kmax, n, t, k_c);
        for (std::size_t i = 0; i < series.size(); ++i) {
            auto cells = rational_cells(series[i]);
            rows.push_back({std::to_string(i + 1), cells[0], cells[1]});
        }
    } else if (kind == "table-four-cases") {
        header = {"K", "N", "T", "K_c", "source", "capacity", "decimal"};
        for (const auto& fc : four_case_table()) {
            auto cells = rational_cells(fc.value);
            rows.push_back({std::to_string(fc.params.k), std::to_string(fc.params.n), std::to_string(fc.params.t),
                            std::to_string(fc.params.k_c), fc.source, cells[0], cells[1]});
        }
    } else if (kind == "limits") {
        header = {"family", "limit", "decimal", "K_reached", "distance"};
        LimitReport a = limit_2422();
        std::ostringstream da;
        da << std::setprecision(6) << a.distance;
        rows.push_back({"bound2422", to_string(a.limit), decimal(a.limit), std::to_string(a.k), da.str()});
        if (n) {
            LimitReport g = limit_general(n, t, k_c);
            std::ostringstream dg;
            dg << std::setprecision(6) << g.distance;
            rows.push_back({"K*bound-general", to_string(g.limit), decimal(g.limit), std::to_string(g.k), dg.str()});
        }
    } else {
        CapacityKind ck;
        try {
            ck = parse_capacity_kind(kind);
        } catch (const Error&) {
            throw UsageError("unknown capacity kind " + kind);
        }
        CapacityParams prm{k, n, t, k_c};
        if (ck == CapacityKind::Theorem3) prm.k_c = n - 1;
        header = {"kind", "K", "N", "T", "K_c", "capacity", "decimal"};
        auto cells = rational_cells(capacity_formula(ck, prm));
        rows.push_back({capacity_kind_name(ck), std::to_string(prm.k), std::to_string(prm.n), std::to_string(prm.t),
                        std::to_string(prm.k_c), cells[0], cells[1]});
    }
    std::ostringstream text;
    if (format == "csv") {
        auto line = [&](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size(); ++i) text << (i ? "," : "") << cells[i];
            text << "\n";
        };
        line(header);
        for (const auto& r : rows) line(r);
    } else {
        json results = json::array();
        for (const auto& r : rows) {
            json row;
            for (std::size_t i = 0; i < header.size(); ++i) row[header[i]] = r[i];
            results.push_back(row);
        }
        json config{{"kind", kind}, {"k", k}, {"n", n}, {"t", t}, {"k_c", k_c}, {"kmax", kmax}};
        text << json{{"command", "capacity"}, {"config", config}, {"results", results}, {"pass", true}}.dump(2)
             << "\n";
    }
    if (c.out.empty() || c.out == "-") {
        std::cout << text.str();
    } else {
        std::ofstream f(c.out, std::ios::binary);
        if (!f) throw Error(Errc::IoError, "cannot write " + c.out);
        f << text.str();
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pirlab: private retrieval from coded, colluding servers"};
    app.require_subcommand(1);
    Common common;
    std::uint64_t seed = 1;
    std::string scheme;
    std::size_t theta = 1, trials = 200, samples = 100000, repeats = 20, tries = 64;
    std::size_t k = 2, n = 0, t = 1, k_c = 1, kmax = 10;
    std::string suite = "all", privacy_mode = "auto", kind, format = "csv";
    std::vector<std::string> collude;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--seed", seed, "64-bit seed (falls back to PIRLAB_SEED)");
        sub->add_option("--p", common.p, "prime override");
        sub->add_option("--out", common.out, "output file");
        sub->add_flag("--json", common.json_stdout, "print JSON on standard output");
        sub->add_option("--jobs", common.jobs, "worker threads for trials")->check(CLI::Range(1u, 256u));
    };

    CLI::App* run = app.add_subcommand("run", "one retrieval session; writes a transcript with --out");
    run->add_option("scheme", scheme, "scheme id")->required();
    run->add_option("--theta", theta, "desired message (1 or 2)");
    add_common(run);

    CLI::App* verify = app.add_subcommand("verify", "verification suites");
    verify->add_option("scheme", scheme, "scheme id")->required();
    verify->add_option("--suite", suite, "correctness | privacy | dimensions | audit | all");
    verify->add_option("--trials", trials, "correctness trials (per table row for tabular schemes)");
    verify->add_option("--samples", samples, "statistical privacy samples per theta");
    verify->add_option("--repeats", repeats, "dimension check repeats");
    verify->add_option("--collude", collude, "1-based server list, e.g. 1,3 (repeatable)");
    verify->add_option("--privacy-mode", privacy_mode, "auto | exhaustive | statistical");
    add_common(verify);

    CLI::App* search = app.add_subcommand("search", "combiner or P matrix search");
    search->add_option("--kind", kind, "combiner | pmatrix")->required();
    search->add_option("--scheme", scheme, "scheme id (combiner)");
    search->add_option("--n", n, "servers (pmatrix)");
    search->add_option("--t", t, "collusion (pmatrix)");
    search->add_option("--tries", tries, "search budget");
    add_common(search);

    CLI::App* capacity = app.add_subcommand("capacity", "capacity formulas and outer bounds");
    capacity->add_option("--kind", kind,
                         "pir | tpir | mds-pir | fghk | theorem3 | bound2422 | bound-general | table-four-cases | limits")
        ->required();
    capacity->add_option("--k", k, "messages");
    capacity->add_option("--n", n, "servers");
    capacity->add_option("--t", t, "collusion");
    capacity->add_option("--kc", k_c, "storage code dimension");
    capacity->add_option("--kmax", kmax, "largest K for bound series");
    capacity->add_option("--format", format, "csv | json");
    add_common(capacity);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        const CLI::App* sub = app.get_subcommands().front();
        common.seed = seed_or_env(seed, sub->count("--seed") > 0);
        if (sub == run) return cmd_run(common, scheme, theta);
        if (sub == verify)
            return cmd_verify(common, scheme, suite, trials, samples, repeats, collude, privacy_mode);
        if (sub == search) return cmd_search(common, kind, scheme, n, t, tries);
        return cmd_capacity(common, kind, k, n, t, k_c, kmax, format);
    } catch (const UsageError& e) {
        std::cerr << "usage: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        switch (e.code()) {
            case Errc::UnknownScheme:
            case Errc::BadParams: return kExitUsage;
            case Errc::SearchExhausted: return kExitSearch;
            case Errc::DecodeFailure: return kExitDecode;
            default: return kExitFail;
        }
    }
}
