// SPDX-License-Identifier: MIT
//
// In-process retrieval sessions between a client and N server endpoints,
// traffic accounting, adversary views and JSON transcripts.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pirlab/scheme.hpp"

namespace pirlab {

// A server holding only its own shares.
class ServerEndpoint {
public:
    ServerEndpoint(std::size_t index, std::vector<Vec> own_shares);
    std::size_t index() const { return index_; }
    const std::vector<Vec>& shares() const { return shares_; }
    Vec answer(const ServerQuery& q) const;

private:
    std::size_t index_;
    std::vector<Vec> shares_;
};

std::vector<ServerEndpoint> make_endpoints(const ShareSet& shares);

struct TrafficCounts {
    std::size_t upload_symbols = 0;  // payload field symbols (plus per-session combiners)
    std::size_t upload_bits = 0;     // table index bits, tabular schemes only
    std::size_t download = 0;        // field symbols
    std::vector<std::size_t> download_per_server;
};

struct Transcript {
    static constexpr int kVersion = 1;
    int version = kVersion;
    std::string scheme;
    SchemeParams params;
    std::uint64_t p = 0;
    std::uint64_t seed = 0;
    std::size_t theta = 1;
    std::vector<ServerQuery> queries;
    std::vector<Vec> answers;
    std::optional<Vec> decoded;  // empty on decode failure
    std::string status;          // ok | wrong | decode-failure
    std::string error;
    std::string combiner_provenance;
    TrafficCounts counts;

    bool operator==(const Transcript& o) const;
};

// Query randomness comes from Rng(seed) only, so (scheme, seed, theta) replays
// the same payloads. A DecodeFailure is recorded in the transcript.
Transcript run_session(const SchemeInstance& s, const std::vector<Vec>& messages, std::size_t theta,
                       std::uint64_t seed);

// Messages drawn from derive_seed(seed, 1), queries from seed.
std::vector<Vec> session_messages(const SchemeInstance& s, std::uint64_t seed);

TrafficCounts account(const SchemeInstance& s, const QueryPlan& plan, const AnswerSet& ans);

struct AdversaryView {
    std::vector<std::size_t> set;
    std::vector<ServerQuery> queries;
    std::vector<Vec> answers;
    std::vector<std::vector<Vec>> shares;
};
AdversaryView adversary_view(const Transcript& t, const ShareSet& shares, const std::vector<std::size_t>& set);

std::string transcript_json(const Transcript& t);
Transcript transcript_from_json(const std::string& text);
void save_transcript(const Transcript& t, const std::string& path);
Transcript load_transcript(const std::string& path);

}  // namespace pirlab
