#include <httplib.h>

#include <chrono>
#include <cstdlib>
#include <nlohmann/json.hpp>
#include <thread>

#include "mosacd/error.hpp"
#include "mosacd/expert.hpp"

namespace mosacd {

HttpLlmBackend::HttpLlmBackend(HttpBackendConfig config) : config_(std::move(config)) {
    if (config_.max_retries < 0) throw InputError("max_retries must be >= 0");
    const char* key = std::getenv(config_.api_key_env.c_str());
    if (!key || !*key) throw BackendError("environment variable " + config_.api_key_env + " is not set");
    api_key_ = key;
}

std::string HttpLlmBackend::describe() const {
    return "llm:url=" + config_.base_url + ",model=" + config_.model + ",temperature=" +
           std::to_string(config_.temperature);
}

std::string HttpLlmBackend::query(const ExpertRequest& request) {
    nlohmann::json body{{"model", config_.model},
                        {"temperature", config_.temperature},
                        {"messages", {{{"role", "user"}, {"content", request.prompt}}}}};
    const std::string payload = body.dump();
    std::string last_error;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
        if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(500 << (attempt - 1)));
        // One client per call keeps concurrent queries independent.
        httplib::Client client(config_.base_url);
        client.set_connection_timeout(config_.timeout_seconds, 0);
        client.set_read_timeout(config_.timeout_seconds, 0);
        client.set_bearer_token_auth(api_key_);
        auto res = client.Post(config_.path, payload, "application/json");
        if (!res) {
            last_error = httplib::to_string(res.error());
            continue;
        }
        if (res->status == 429 || res->status >= 500) {
            last_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200) throw BackendError("HTTP " + std::to_string(res->status) + ": " + res->body);
        try {
            const auto doc = nlohmann::json::parse(res->body);
            return doc.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw BackendError(std::string("malformed completion: ") + e.what());
        }
    }
    throw BackendError("expert query failed after retries: " + last_error);
}

}  // namespace mosacd
