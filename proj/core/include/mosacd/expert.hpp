#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mosacd/graph.hpp"
#include "mosacd/metadata.hpp"
#include "mosacd/prompt.hpp"
#include "mosacd/skeleton.hpp"

namespace mosacd {

/// One trial as seen by a backend. Scripted backends read the structured fields; an LLM
/// only ever sees `prompt`.
struct ExpertRequest {
    std::string prompt;
    NodeId u = 0;
    NodeId v = 0;
    TemplateVariant variant = TemplateVariant::None;
    AnswerOrder order = AnswerOrder::Forward;
    int trial = 0;
};

/// Must tolerate concurrent query() calls.
class ExpertBackend {
public:
    virtual ~ExpertBackend() = default;
    /// Returns the raw response text; throws BackendError on transport failure.
    virtual std::string query(const ExpertRequest& request) = 0;
    virtual std::string describe() const = 0;
    virtual bool uses_network() const { return false; }
};

/// Answers from a known DAG. Whether an edge is abstained on or answered wrongly is drawn
/// once per edge from (seed, edge), so all trials of an edge agree.
class GroundTruthExpert final : public ExpertBackend {
public:
    struct Options {
        double abstain_rate = 0.0;
        double error_rate = 0.0;
        std::uint64_t seed = 0;
    };
    GroundTruthExpert(const Dag& truth, Options options) : truth_(truth), options_(options) {}
    std::string query(const ExpertRequest& request) override;
    std::string describe() const override;

    /// The direction this expert claims for {u,v} (before letter encoding).
    Claim claim(NodeId u, NodeId v) const;

private:
    Dag truth_;
    Options options_;
};

/// Always picks option B, the first direction-bearing option of whatever order it is shown.
class PositionalBiasExpert final : public ExpertBackend {
public:
    std::string query(const ExpertRequest&) override { return "Final choice: <Answer>B</Answer>"; }
    std::string describe() const override { return "scripted:first"; }
};

/// Replays transcript JSON lines keyed by (prompt hash, trial).
class ReplayBackend final : public ExpertBackend {
public:
    explicit ReplayBackend(const std::filesystem::path& transcript);
    std::string query(const ExpertRequest& request) override;
    std::string describe() const override { return "replay:" + source_; }
    std::size_t size() const noexcept { return responses_.size(); }

private:
    std::string source_;
    std::map<std::pair<std::uint64_t, int>, std::string> responses_;
};

/// OpenAI-style chat-completions endpoint.
struct HttpBackendConfig {
    std::string base_url = "https://api.openai.com";
    std::string path = "/v1/chat/completions";
    std::string model = "gpt-4o-mini";
    double temperature = 0.0;
    int max_retries = 3;
    int timeout_seconds = 60;
    std::string api_key_env = "OPENAI_API_KEY";
};

class HttpLlmBackend final : public ExpertBackend {
public:
    explicit HttpLlmBackend(HttpBackendConfig config);
    std::string query(const ExpertRequest& request) override;
    std::string describe() const override;
    bool uses_network() const override { return true; }

private:
    HttpBackendConfig config_;
    std::string api_key_;
};

/// Thread-safe JSON-lines sink for every trial.
class TranscriptLog {
public:
    TranscriptLog() = default;
    explicit TranscriptLog(const std::filesystem::path& path);
    void write(const std::string& u, const std::string& v, const ExpertRequest& request, const std::string& response,
               std::optional<char> letter);
    /// Records kept in memory as well (handy for tests).
    std::vector<std::string> lines() const;

private:
    mutable std::mutex mutex_;
    std::ofstream out_;
    std::vector<std::string> lines_;
};

/// Hex form of the FNV-1a prompt hash used as the replay key.
std::string prompt_hash_hex(std::string_view prompt);

struct OrderVotes {
    std::array<int, 5> letters{};  // A..E
    int failures = 0;               // no parsable tag
    int u_to_v = 0;
    int v_to_u = 0;
};

struct VoteRecord {
    NodeId u = 0;
    NodeId v = 0;
    TemplateVariant variant = TemplateVariant::None;
    OrderVotes forward;
    OrderVotes reversed;
    bool shuffled = true;
    std::vector<std::string> responses;

    /// Direction votes for u -> v minus those for v -> u, over both orders.
    int net_support() const { return forward.u_to_v + reversed.u_to_v - forward.v_to_u - reversed.v_to_u; }
};

struct VoteOutcome {
    Claim decision = Claim::Undecided;
    VoteRecord record;
};

struct VoteOptions {
    int repeats = 5;
    bool shuffle = true;          // false: forward order only (no positional-bias filter)
    bool reversed_first = false;  // order in which the two listings are run
};

/// A direction wins only as the strict majority of direction votes in every order run.
Claim decide(const VoteRecord& record);

VoteOutcome shuffled_vote(const ExpertQuery& q, ExpertBackend& backend, const VoteOptions& options,
                          TranscriptLog* log = nullptr);

struct SeedVerdict {
    bool accepted = true;
    std::string reason;
};

/// Rejects u -> v if it contradicts Sigma at an unshielded triple around u or v given the
/// arrows already in p, or if it closes a directed cycle. A semi-directed path v ~> u is not
/// grounds for rejection: it may run through an undirected edge the truth orients backwards,
/// and true seeds would then be refused.
SeedVerdict validate_seed(const Pdag& p, const SepsetRecord& sigma, Edge seed);

struct Seed {
    Edge edge;
    int net_support = 0;
};

struct SeedSet {
    std::vector<Seed> seeds;
    std::vector<VoteRecord> votes;                             // every queried edge
    std::vector<std::pair<Edge, std::string>> rejected;        // decided but refuted
    std::vector<std::pair<NodePair, std::string>> errors;      // backend failures
    std::size_t abstained = 0;
};

struct SeedApplication {
    std::vector<Seed> accepted;
    std::vector<std::pair<Edge, std::string>> rejected;
};

/// Inserts candidates into p in order. Without `validate` only the directed-cycle guard applies.
SeedApplication apply_seeds(Pdag& p, const SepsetRecord& sigma, std::span<const Seed> candidates, bool validate);

struct SeedingConfig {
    VoteOptions vote;
    bool validate = true;
    int concurrency = 4;
};

/// Queries every undirected edge of p (lexicographic order), then validates and applies the
/// decisions in that same order. p is updated in place with the accepted seeds.
SeedSet run_seeding(Pdag& p, const SepsetRecord& sigma, std::span<const std::string> names, const Metadata& meta,
                    ExpertBackend& backend, const SeedingConfig& config, TranscriptLog* log = nullptr);

std::string seeds_to_json(const SeedSet& seeds, std::span<const std::string> names);

/// Parses "none", "scripted:truth[,abstain=..][,error=..][,seed=..]", "scripted:first",
/// "replay:<path>" or "llm[:key=value,...]". Truth-based specs need `truth`.
std::unique_ptr<ExpertBackend> make_backend(std::string_view spec, const Dag* truth);

}  // namespace mosacd
