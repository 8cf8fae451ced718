// SPDX-License-Identifier: MIT
#include "pirlab/simnet.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

namespace pirlab {

using json = nlohmann::json;

ServerEndpoint::ServerEndpoint(std::size_t index, std::vector<Vec> own_shares)
    : index_(index), shares_(std::move(own_shares)) {}

Vec ServerEndpoint::answer(const ServerQuery& q) const { return answer_from_share(q, shares_); }

std::vector<ServerEndpoint> make_endpoints(const ShareSet& shares) {
    std::vector<ServerEndpoint> out;
    for (std::size_t n = 0; n < shares.shares.size(); ++n) out.emplace_back(n, shares.shares[n]);
    return out;
}

TrafficCounts account(const SchemeInstance& s, const QueryPlan& plan, const AnswerSet& ans) {
    TrafficCounts c;
    for (std::size_t n = 0; n < plan.servers.size(); ++n) {
        const ServerQuery& q = plan.servers[n];
        c.upload_symbols += q.q[0].rows() * q.q[0].cols() + q.q[1].rows() * q.q[1].cols();
        if (s.per_session_combiner) c.upload_symbols += q.combine.rows() * q.combine.cols();
        c.upload_bits += s.upload_bits;
        c.download_per_server.push_back(ans.answers[n].size());
        c.download += ans.answers[n].size();
    }
    return c;
}

std::vector<Vec> session_messages(const SchemeInstance& s, std::uint64_t seed) {
    Rng rng(derive_seed(seed, 1));
    return random_messages(s, rng);
}

Transcript run_session(const SchemeInstance& s, const std::vector<Vec>& messages, std::size_t theta,
                       std::uint64_t seed) {
    if (messages.size() != s.params.k_messages) throw Error(Errc::ShapeMismatch, "message count");
    for (const auto& w : messages)
        if (w.size() != s.params.message_len()) throw Error(Errc::ShapeMismatch, "message length");
    Rng rng(seed);
    const ShareSet shares = encode(s.code, messages);
    const auto endpoints = make_endpoints(shares);
    QueryPlan plan = gen_queries(s, theta, rng);
    plan.seed = seed;

    AnswerSet ans;
    ans.server_randomness.assign(endpoints.size(), Vec{});
    for (const auto& ep : endpoints) {
        ans.answers.push_back(ep.answer(plan.servers[ep.index()]));
        ans.download_count += ans.answers.back().size();
    }

    Transcript t;
    t.scheme = s.id;
    t.params = s.params;
    t.p = s.field().p();
    t.seed = seed;
    t.theta = theta;
    t.queries = plan.servers;
    t.answers = ans.answers;
    t.combiner_provenance = plan.combiner_provenance;
    t.counts = account(s, plan, ans);
    try {
        t.decoded = decode(s, plan, ans);
        t.status = *t.decoded == messages[theta - 1] ? "ok" : "wrong";
    } catch (const Error& e) {
        if (e.code() != Errc::DecodeFailure) throw;
        t.status = "decode-failure";
        t.error = e.what();
    }
    return t;
}

AdversaryView adversary_view(const Transcript& t, const ShareSet& shares, const std::vector<std::size_t>& set) {
    AdversaryView v;
    v.set = set;
    for (auto n : set) {
        if (n >= t.queries.size() || n >= shares.shares.size())
            throw Error(Errc::BadParams, "collusion set server out of range");
        v.queries.push_back(t.queries[n]);
        v.answers.push_back(t.answers[n]);
        v.shares.push_back(shares.shares[n]);
    }
    return v;
}

bool Transcript::operator==(const Transcript& o) const { return transcript_json(*this) == transcript_json(o); }

// ---------------------------------------------------------------------------
// JSON

namespace {

json matrix_json(const Matrix& m) {
    json rows = json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) rows.push_back(m.row(r));
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", rows}};
}

Matrix matrix_from(const json& j, const FieldPrime& f) {
    const std::size_t rows = j.at("rows").get<std::size_t>(), cols = j.at("cols").get<std::size_t>();
    const auto& data = j.at("data");
    if (data.size() != rows) throw Error(Errc::IoError, "matrix row count");
    Matrix m(rows, cols, f);
    for (std::size_t r = 0; r < rows; ++r) {
        if (data[r].size() != cols) throw Error(Errc::IoError, "matrix column count");
        for (std::size_t c = 0; c < cols; ++c) {
            const auto x = data[r][c].get<std::uint64_t>();
            if (x >= f.p()) throw Error(Errc::IoError, "residue out of range");
            m.at(r, c) = static_cast<Residue>(x);
        }
    }
    return m;
}

}  // namespace

std::string transcript_json(const Transcript& t) {
    json q = json::array();
    for (const auto& s : t.queries)
        q.push_back({{"q1", matrix_json(s.q[0])},
                     {"q2", matrix_json(s.q[1])},
                     {"combine", matrix_json(s.combine)},
                     {"mix", matrix_json(s.mix)},
                     {"direct", s.direct},
                     {"table_index", s.table_index}});
    json j;
    j["version"] = t.version;
    j["scheme"] = {{"id", t.scheme},
                   {"k", t.params.k_messages},
                   {"n", t.params.n_servers},
                   {"t", t.params.t_privacy},
                   {"k_c", t.params.k_c},
                   {"L", t.params.L},
                   {"replicas", t.params.replicas},
                   {"collusion_sets", t.params.collusion_sets},
                   {"combiner_provenance", t.combiner_provenance}};
    j["p"] = t.p;
    j["seed"] = t.seed;
    j["theta"] = t.theta;
    j["queries"] = q;
    j["answers"] = t.answers;
    j["decoded"] = {{"status", t.status}, {"error", t.error}};
    j["decoded"]["message"] = t.decoded ? json(*t.decoded) : json(nullptr);
    j["counts"] = {{"upload_symbols", t.counts.upload_symbols},
                   {"upload_bits", t.counts.upload_bits},
                   {"download", t.counts.download},
                   {"download_per_server", t.counts.download_per_server}};
    return j.dump(1) + "\n";
}

Transcript transcript_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(Errc::IoError, std::string("transcript parse: ") + e.what());
    }
    try {
        Transcript t;
        t.version = j.at("version").get<int>();
        if (t.version != Transcript::kVersion)
            throw Error(Errc::SchemaVersionMismatch, "transcript version " + std::to_string(t.version));
        const auto& s = j.at("scheme");
        t.scheme = s.at("id").get<std::string>();
        t.params.k_messages = s.at("k").get<std::size_t>();
        t.params.n_servers = s.at("n").get<std::size_t>();
        t.params.t_privacy = s.at("t").get<std::size_t>();
        t.params.k_c = s.at("k_c").get<std::size_t>();
        t.params.L = s.at("L").get<std::size_t>();
        t.params.replicas = s.at("replicas").get<std::size_t>();
        t.params.collusion_sets = s.at("collusion_sets").get<std::vector<std::vector<std::size_t>>>();
        t.combiner_provenance = s.at("combiner_provenance").get<std::string>();
        t.p = j.at("p").get<std::uint64_t>();
        t.params.p = t.p;
        t.seed = j.at("seed").get<std::uint64_t>();
        t.theta = j.at("theta").get<std::size_t>();
        const FieldPrime f(t.p);
        for (const auto& q : j.at("queries")) {
            ServerQuery sq;
            sq.q[0] = matrix_from(q.at("q1"), f);
            sq.q[1] = matrix_from(q.at("q2"), f);
            sq.combine = matrix_from(q.at("combine"), f);
            sq.mix = matrix_from(q.at("mix"), f);
            sq.direct = q.at("direct").get<std::size_t>();
            sq.table_index = q.at("table_index").get<std::size_t>();
            t.queries.push_back(std::move(sq));
        }
        t.answers = j.at("answers").get<std::vector<Vec>>();
        const auto& d = j.at("decoded");
        t.status = d.at("status").get<std::string>();
        t.error = d.at("error").get<std::string>();
        if (!d.at("message").is_null()) t.decoded = d.at("message").get<Vec>();
        const auto& c = j.at("counts");
        t.counts.upload_symbols = c.at("upload_symbols").get<std::size_t>();
        t.counts.upload_bits = c.at("upload_bits").get<std::size_t>();
        t.counts.download = c.at("download").get<std::size_t>();
        t.counts.download_per_server = c.at("download_per_server").get<std::vector<std::size_t>>();
        return t;
    } catch (const json::exception& e) {
        throw Error(Errc::IoError, std::string("transcript field: ") + e.what());
    }
}

void save_transcript(const Transcript& t, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::IoError, "cannot write " + path);
    out << transcript_json(t);
    if (!out) throw Error(Errc::IoError, "write failed for " + path);
}

Transcript load_transcript(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::IoError, "cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return transcript_from_json(ss.str());
}

}  // namespace pirlab
