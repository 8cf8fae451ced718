// SPDX-License-Identifier: MIT
//
// Retrieval schemes: registry, query generation, server answers, decoding.
//
// Every scheme is linear. Server n receives, per message k, a payload q[k]
// (rows over its share of that message), a square combiner C and a mixing
// matrix; it returns mix * [C q[0] share(W1); C q[1] share(W2)].
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pirlab/combiner.hpp"
#include "pirlab/rational.hpp"

namespace pirlab {

enum class ErrorModel { ZeroError, EpsilonError };
enum class SchemeKind { Aligned, Table2322, Table2432 };

const char* error_model_name(ErrorModel m);

struct SchemeParams {
    std::size_t k_messages = 2;
    std::size_t n_servers = 0;
    std::size_t t_privacy = 0;
    std::size_t k_c = 0;
    std::size_t L = 0;         // base message length
    std::size_t replicas = 1;  // M
    std::uint64_t p = 0;
    std::vector<std::vector<std::size_t>> collusion_sets;  // 0-based, sorted

    std::size_t message_len() const { return replicas * L; }
};

struct SchemeOverrides {
    std::optional<std::uint64_t> p;
    std::optional<std::size_t> n;
    std::optional<std::size_t> t;
    std::optional<std::vector<std::vector<std::size_t>>> collusion_sets;
    bool build_combiner = true;  // privacy sampling never looks at C_n
    std::uint64_t combiner_seed = 1;
    std::size_t search_tries = 64;
};

struct SchemeInstance {
    std::string id;
    SchemeParams params;
    SchemeKind kind = SchemeKind::Aligned;
    ErrorModel error_model = ErrorModel::ZeroError;
    StorageCode code;
    AlignedStructure st;                  // aligned schemes only
    std::optional<CombinerSet> combiner;  // fixed combiner
    bool per_session_combiner = false;
    std::optional<PMatrix> pmatrix;
    std::vector<std::size_t> download;  // per server
    std::size_t upload_bits = 0;        // tabular schemes: index bits per server

    const FieldPrime& field() const { return code.field(); }
    std::size_t n_servers() const { return params.n_servers; }
    std::size_t share_len() const { return params.message_len() / code.k_c; }
    std::size_t total_download() const;
};

// Scheme ids, also accepted with arguments: "class-t2(5)", "class-tgen(4,3)".
const std::vector<std::string>& registry_ids();
SchemeInstance registry_build(const std::string& id, const SchemeOverrides& ov = {});

Rational declared_rate(const SchemeInstance& s);

// All user randomness of one session.
struct SessionSecret {
    std::size_t table_row = 0;        // tabular schemes, 1-based
    std::vector<Matrix> s;            // per replica, (desired_bases*b) x b
    std::vector<Matrix> s_prime;      // per replica, b x b
    Realization desired_perms;        // [server][replica] -> slot order
    Realization undesired_perms;
    std::vector<Matrix> session_c;    // per server, epsilon-error schemes
};

struct ServerQuery {
    Matrix q[2];     // rows over the server's share of W1, W2
    Matrix combine;  // square, size q[k].rows()
    Matrix mix;      // download x 2*rows
    std::size_t direct = 0;
    std::size_t table_index = 0;  // tabular schemes: the index actually uploaded

    std::size_t download() const { return mix.rows(); }
};

struct QueryPlan {
    std::string scheme;
    std::size_t theta = 1;
    std::uint64_t seed = 0;
    SessionSecret secret;
    std::vector<ServerQuery> servers;
    std::string combiner_provenance;
};

struct AnswerSet {
    std::vector<Vec> answers;
    std::size_t download_count = 0;
    // Server randomness slot; all implemented servers are deterministic.
    std::vector<Vec> server_randomness;
};

SessionSecret draw_secret(const SchemeInstance& s, Rng& rng);
// Replica 0 only and no combiner draw; enough for replica_view(.., 0).
SessionSecret draw_view_secret(const SchemeInstance& s, Rng& rng);
QueryPlan build_plan(const SchemeInstance& s, std::size_t theta, const SessionSecret& sec);
QueryPlan gen_queries(const SchemeInstance& s, std::size_t theta, Rng& rng);

// Per-server payload pair (desired-independent view) of a single replica.
struct ReplicaView {
    Matrix q[2];
};
std::vector<ReplicaView> replica_view(const SchemeInstance& s, std::size_t theta, const SessionSecret& sec,
                                      std::size_t replica);

// Answer computed from one server's own shares (one Vec per message).
Vec answer_from_share(const ServerQuery& q, const std::vector<Vec>& own_shares);
Vec server_answer(const SchemeInstance& s, std::size_t server, const ServerQuery& q, const ShareSet& shares);
AnswerSet collect_answers(const SchemeInstance& s, const QueryPlan& plan, const ShareSet& shares);

// Structured decode for aligned schemes, generic for tabular ones.
Vec decode(const SchemeInstance& s, const QueryPlan& plan, const AnswerSet& ans);
// Interference cancellation by the left null space of the full download matrix.
Vec decode_generic(const SchemeInstance& s, const QueryPlan& plan, const AnswerSet& ans);

// Rows of server n's queried symbols of message k (0-based) over the L' message coordinates.
Matrix message_rows(const SchemeInstance& s, const QueryPlan& plan, std::size_t server, std::size_t k);

std::vector<Vec> random_messages(const SchemeInstance& s, Rng& rng);

// Fourth-server index of the F_13 table for theta = 1: i4 from (i1, i2, i3) with
// i1, i3 in {1, 2} and i2 in {3, 4}; j4 from the same triple is 7 - i4, and
// theta = 2 uses the complement 7 - x in both cases.
int tab2432_i4(std::size_t i1, std::size_t i2, std::size_t i3);

// Mixing matrix: X_1..X_i, Y_1..Y_i, X_j + Y_j for j > i.
Matrix mix_matrix(std::size_t queried, std::size_t direct, const FieldPrime& f);

}  // namespace pirlab
