#include <charconv>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "mosacd/error.hpp"
#include "mosacd/expert.hpp"
#include "mosacd/rng.hpp"

namespace mosacd {

Claim GroundTruthExpert::claim(NodeId u, NodeId v) const {
    Claim truth;
    if (truth_.has_edge(u, v))
        truth = Claim::UToV;
    else if (truth_.has_edge(v, u))
        truth = Claim::VToU;
    else
        return Claim::Undecided;  // spurious skeleton edge: nothing to say
    const std::uint64_t key = hash_combine(hash_combine(options_.seed, static_cast<std::uint64_t>(std::min(u, v))),
                                           static_cast<std::uint64_t>(std::max(u, v)));
    if (to_unit(mix64(key ^ 0xa5a5a5a5ULL)) < options_.abstain_rate) return Claim::Undecided;
    if (to_unit(mix64(key ^ 0x5a5a5a5aULL)) < options_.error_rate)
        return truth == Claim::UToV ? Claim::VToU : Claim::UToV;
    return truth;
}

std::string GroundTruthExpert::query(const ExpertRequest& request) {
    const char letter = letter_for(request.variant, request.order, claim(request.u, request.v));
    return "1. Scripted expert.\n2. Ground truth lookup.\n3. Final choice: <Answer>" + std::string(1, letter) +
           "</Answer>";
}

std::string GroundTruthExpert::describe() const {
    std::ostringstream out;
    out << "scripted:truth,abstain=" << options_.abstain_rate << ",error=" << options_.error_rate
        << ",seed=" << options_.seed;
    return out.str();
}

ReplayBackend::ReplayBackend(const std::filesystem::path& transcript) : source_(transcript.string()) {
    std::ifstream in(transcript);
    if (!in) throw InputError("cannot open transcript " + source_);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto rec = nlohmann::json::parse(line);
            const auto hex = rec.at("prompt_hash").get<std::string>();
            std::uint64_t hash = 0;
            auto [ptr, ec] = std::from_chars(hex.data(), hex.data() + hex.size(), hash, 16);
            if (ec != std::errc() || ptr != hex.data() + hex.size()) throw ParseError("bad prompt_hash", lineno);
            responses_[{hash, rec.at("trial").get<int>()}] = rec.at("response_text").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("transcript: ") + e.what(), lineno, 1);
        }
    }
}

std::string ReplayBackend::query(const ExpertRequest& request) {
    auto it = responses_.find({fnv1a64(request.prompt), request.trial});
    if (it == responses_.end())
        throw BackendError("replay has no response for prompt " + prompt_hash_hex(request.prompt) + " trial " +
                           std::to_string(request.trial));
    return it->second;
}

namespace {

std::map<std::string, std::string> parse_options(std::string_view text) {
    std::map<std::string, std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find(',', start);
        if (end == std::string_view::npos) end = text.size();
        const std::string_view item = text.substr(start, end - start);
        if (!item.empty()) {
            const std::size_t eq = item.find('=');
            if (eq == std::string_view::npos)
                out[std::string(item)] = "";
            else
                out[std::string(item.substr(0, eq))] = std::string(item.substr(eq + 1));
        }
        start = end + 1;
    }
    return out;
}

double as_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double d = std::stod(value, &used);
        if (used == value.size()) return d;
    } catch (const std::exception&) {
    }
    throw InputError("expert option '" + key + "' needs a number, got '" + value + "'");
}

}  // namespace

std::unique_ptr<ExpertBackend> make_backend(std::string_view spec, const Dag* truth) {
    if (spec == "none" || spec.empty()) return nullptr;
    const std::size_t colon = spec.find(':');
    const std::string_view kind = spec.substr(0, colon);
    const std::string_view rest = colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);
    if (kind == "scripted") {
        auto opts = parse_options(rest);
        if (opts.count("first")) return std::make_unique<PositionalBiasExpert>();
        if (!opts.count("truth")) throw InputError("scripted expert needs 'truth' or 'first'");
        if (!truth) throw InputError("scripted:truth needs a ground-truth network");
        GroundTruthExpert::Options o;
        for (const auto& [k, val] : opts) {
            if (k == "truth") continue;
            if (k == "abstain")
                o.abstain_rate = as_double(k, val);
            else if (k == "error")
                o.error_rate = as_double(k, val);
            else if (k == "seed")
                o.seed = static_cast<std::uint64_t>(as_double(k, val));
            else
                throw InputError("unknown scripted expert option '" + k + "'");
        }
        if (o.abstain_rate < 0 || o.abstain_rate > 1 || o.error_rate < 0 || o.error_rate > 1)
            throw InputError("scripted expert rates must lie in [0,1]");
        return std::make_unique<GroundTruthExpert>(*truth, o);
    }
    if (kind == "replay") {
        if (rest.empty()) throw InputError("replay expert needs a transcript path");
        return std::make_unique<ReplayBackend>(std::filesystem::path(std::string(rest)));
    }
    if (kind == "llm") {
        HttpBackendConfig c;
        for (const auto& [k, val] : parse_options(rest)) {
            if (k == "url")
                c.base_url = val;
            else if (k == "path")
                c.path = val;
            else if (k == "model")
                c.model = val;
            else if (k == "temperature")
                c.temperature = as_double(k, val);
            else if (k == "retries")
                c.max_retries = static_cast<int>(as_double(k, val));
            else if (k == "timeout")
                c.timeout_seconds = static_cast<int>(as_double(k, val));
            else if (k == "key_env")
                c.api_key_env = val;
            else
                throw InputError("unknown llm option '" + k + "'");
        }
        return std::make_unique<HttpLlmBackend>(c);
    }
    throw InputError("unknown expert backend '" + std::string(spec) + "'");
}

}  // namespace mosacd
