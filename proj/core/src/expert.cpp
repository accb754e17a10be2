#include "mosacd/expert.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <nlohmann/json.hpp>
#include <thread>

#include "mosacd/error.hpp"
#include "mosacd/rng.hpp"

namespace mosacd {

std::string prompt_hash_hex(std::string_view prompt) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(prompt)));
    return buf;
}

TranscriptLog::TranscriptLog(const std::filesystem::path& path) : out_(path, std::ios::app) {
    if (!out_) throw InputError("cannot open transcript log " + path.string());
}

void TranscriptLog::write(const std::string& u, const std::string& v, const ExpertRequest& request,
                          const std::string& response, std::optional<char> letter) {
    nlohmann::json rec;
    rec["edge"] = {u, v};
    rec["variant"] = to_string(request.variant);
    rec["order"] = to_string(request.order);
    rec["prompt_hash"] = prompt_hash_hex(request.prompt);
    rec["response_text"] = response;
    rec["parsed_letter"] = letter ? nlohmann::json(std::string(1, *letter)) : nlohmann::json(nullptr);
    rec["timestamp"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::system_clock::now().time_since_epoch())
                           .count();
    rec["trial"] = request.trial;
    const std::string line = rec.dump();
    std::lock_guard lock(mutex_);
    lines_.push_back(line);
    if (out_.is_open()) out_ << line << '\n' << std::flush;
}

std::vector<std::string> TranscriptLog::lines() const {
    std::lock_guard lock(mutex_);
    return lines_;
}

Claim decide(const VoteRecord& record) {
    auto majority = [](const OrderVotes& o) {
        if (o.u_to_v > o.v_to_u) return Claim::UToV;
        if (o.v_to_u > o.u_to_v) return Claim::VToU;
        return Claim::Undecided;
    };
    const Claim f = majority(record.forward);
    if (!record.shuffled) return f;
    return f == majority(record.reversed) ? f : Claim::Undecided;
}

VoteOutcome shuffled_vote(const ExpertQuery& q, ExpertBackend& backend, const VoteOptions& options,
                          TranscriptLog* log) {
    if (options.repeats < 1) throw InputError("repeats must be >= 1");
    VoteOutcome out;
    out.record.u = q.u;
    out.record.v = q.v;
    out.record.variant = q.variant;
    out.record.shuffled = options.shuffle;

    std::vector<AnswerOrder> orders{AnswerOrder::Forward};
    if (options.shuffle) {
        orders.push_back(AnswerOrder::Reversed);
        if (options.reversed_first) std::swap(orders[0], orders[1]);
    }
    for (AnswerOrder order : orders) {
        OrderVotes& tally = order == AnswerOrder::Forward ? out.record.forward : out.record.reversed;
        ExpertRequest request{render_prompt(q, order), q.u, q.v, q.variant, order, 0};
        for (int t = 0; t < options.repeats; ++t) {
            request.trial = t;
            const std::string response = backend.query(request);
            const auto letter = parse_answer(response);
            if (log) log->write(q.u_name, q.v_name, request, response, letter);
            out.record.responses.push_back(response);
            if (!letter) {
                ++tally.failures;
                continue;
            }
            ++tally.letters[*letter - 'A'];
            switch (claim_of(q.variant, order, *letter)) {
                case Claim::UToV: ++tally.u_to_v; break;
                case Claim::VToU: ++tally.v_to_u; break;
                case Claim::Undecided: break;
            }
        }
    }
    out.decision = decide(out.record);
    return out;
}

SeedVerdict validate_seed(const Pdag& p, const SepsetRecord& sigma, Edge seed) {
    const NodeId u = seed.from, v = seed.to;
    if (!p.is_undirected(u, v)) return {false, "pair is not undirected"};
    // Triples u - v - w: the new arrowhead sits at v.
    for (NodeId w : p.neighbors(v)) {
        if (w == u || p.adjacent(u, w)) continue;
        const Membership m = sigma.membership(u, w, v);
        if (p.is_directed(w, v) && m == Membership::All)
            return {false, "collider at " + std::to_string(v) + " but it separates " + std::to_string(u) + " and " +
                               std::to_string(w)};
        if (p.is_directed(v, w) && m == Membership::None)
            return {false, "non-collider at " + std::to_string(v) + " but it separates neither " +
                               std::to_string(u) + " nor " + std::to_string(w)};
    }
    // Triples w - u - v: the new arrow leaves u, so an arrow w -> u makes u a non-collider.
    for (NodeId w : p.neighbors(u)) {
        if (w == v || p.adjacent(v, w)) continue;
        if (p.is_directed(w, u) && sigma.membership(w, v, u) == Membership::None)
            return {false, "non-collider at " + std::to_string(u) + " contradicts the separating sets of " +
                               std::to_string(w) + " and " + std::to_string(v)};
    }
    if (has_directed_path(p, v, u)) return {false, "closes a directed cycle"};
    return {};
}

SeedSet run_seeding(Pdag& p, const SepsetRecord& sigma, std::span<const std::string> names, const Metadata& meta,
                    ExpertBackend& backend, const SeedingConfig& config, TranscriptLog* log) {
    const auto edges = p.undirected_edges();
    std::vector<std::optional<VoteOutcome>> outcomes(edges.size());
    std::vector<std::string> failures(edges.size());

    // Queries fan out over a small worker pool; everything after is sequential in edge order.
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < edges.size(); i = next++) {
            try {
                const auto q = build_query(p, sigma, names, meta, edges[i].first, edges[i].second);
                outcomes[i] = shuffled_vote(q, backend, config.vote, log);
            } catch (const std::exception& e) {
                failures[i] = e.what();
                if (failures[i].empty()) failures[i] = "query failed";
            }
        }
    };
    const int threads = std::max(1, std::min<int>(config.concurrency, static_cast<int>(edges.size())));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    }

    SeedSet out;
    std::vector<Seed> candidates;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        if (!outcomes[i]) {
            out.errors.emplace_back(edges[i], failures[i]);
            continue;
        }
        const auto& o = *outcomes[i];
        out.votes.push_back(o.record);
        if (o.decision == Claim::Undecided) {
            ++out.abstained;
            continue;
        }
        const Edge e = o.decision == Claim::UToV ? Edge{edges[i].first, edges[i].second}
                                                 : Edge{edges[i].second, edges[i].first};
        const int support = o.record.net_support();
        candidates.push_back({e, e.from == o.record.u ? support : -support});
    }
    auto applied = apply_seeds(p, sigma, candidates, config.validate);
    out.seeds = std::move(applied.accepted);
    out.rejected = std::move(applied.rejected);
    return out;
}

SeedApplication apply_seeds(Pdag& p, const SepsetRecord& sigma, std::span<const Seed> candidates, bool validate) {
    SeedApplication out;
    for (const Seed& s : candidates) {
        SeedVerdict verdict;
        if (validate)
            verdict = validate_seed(p, sigma, s.edge);
        else if (!try_orient(p, s.edge.from, s.edge.to, CycleGuard::Directed))
            verdict = {false, p.is_undirected(s.edge.from, s.edge.to) ? "closes a directed cycle"
                                                                      : "pair is not undirected"};
        if (!verdict.accepted) {
            out.rejected.emplace_back(s.edge, verdict.reason);
            continue;
        }
        if (validate) p.set_directed(s.edge.from, s.edge.to);
        out.accepted.push_back(s);
    }
    return out;
}

std::string seeds_to_json(const SeedSet& seeds, std::span<const std::string> names) {
    nlohmann::json doc = nlohmann::json::array();
    for (const auto& s : seeds.seeds) doc.push_back({{"from", names[s.edge.from]}, {"to", names[s.edge.to]}, {"votes", s.net_support}});
    return doc.dump(2);
}

}  // namespace mosacd
