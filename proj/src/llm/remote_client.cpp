#include <algorithm>
#include <cmath>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "actprompt/llm/llm_bridge.hpp"

namespace actprompt::llm {
namespace {

using Clock = std::chrono::steady_clock;

struct SplitEndpoint {
    std::string origin;  // scheme://host[:port]
    std::string path;    // request path including the API suffix
};

SplitEndpoint split_endpoint(const std::string& endpoint) {
    const auto scheme_end = endpoint.find("://");
    if (scheme_end == std::string::npos) throw ArgumentError("endpoint must include a scheme: " + endpoint);
    const auto path_start = endpoint.find('/', scheme_end + 3);
    SplitEndpoint split;
    split.origin = endpoint.substr(0, path_start);
    std::string base = path_start == std::string::npos ? "" : endpoint.substr(path_start);
    while (!base.empty() && base.back() == '/') base.pop_back();
    split.path = base + "/v1/chat/completions";
    return split;
}

bool transient_status(int status) { return status == 429 || status >= 500; }

std::string extract_content(const std::string& body) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error&) {
        throw ProtocolError("completion response is not valid JSON");
    }
    if (!doc.is_object() || !doc.contains("choices") || !doc["choices"].is_array() || doc["choices"].empty()) {
        throw ProtocolError("completion response has no choices");
    }
    const auto& choice = doc["choices"][0];
    if (!choice.is_object() || !choice.contains("message") || !choice["message"].is_object()) {
        throw ProtocolError("completion choice has no message");
    }
    const auto& content = choice["message"]["content"];
    if (!content.is_string()) throw ProtocolError("completion message content is not a string");
    return content.get<std::string>();
}

}  // namespace

TokenBucket::TokenBucket(double rate_per_second, double burst)
    : rate_(rate_per_second), burst_(burst), tokens_(burst), last_(Clock::now()) {
    if (!(rate_per_second > 0.0) || !(burst >= 1.0)) throw ArgumentError("token bucket needs rate > 0 and burst >= 1");
}

void TokenBucket::acquire() {
    std::unique_lock lock(mutex_);
    while (true) {
        const auto now = Clock::now();
        const double elapsed = std::chrono::duration<double>(now - last_).count();
        tokens_ = std::min(burst_, tokens_ + elapsed * rate_);
        last_ = now;
        if (tokens_ >= 1.0) {
            tokens_ -= 1.0;
            return;
        }
        const double wait_s = (1.0 - tokens_) / rate_;
        lock.unlock();
        std::this_thread::sleep_for(std::chrono::duration<double>(wait_s));
        lock.lock();
    }
}

RemoteClient::RemoteClient(std::string endpoint, std::string credential, RemoteOptions options)
    : endpoint_(std::move(endpoint)),
      credential_(std::move(credential)),
      options_(options),
      bucket_(options.requests_per_second, options.burst) {
    if (credential_.empty()) throw ArgumentError("remote provider needs a non-empty credential");
    if (options_.max_attempts < 1) throw ArgumentError("max_attempts must be >= 1");
    split_endpoint(endpoint_);
}

CompletionResult RemoteClient::complete(const CompletionRequest& request) {
    request.validate();
    const auto target = split_endpoint(endpoint_);

    nlohmann::json payload = {
        {"model", request.model},
        {"messages",
         nlohmann::json::array({{{"role", "system"}, {"content", request.system}},
                                {{"role", "user"}, {"content", request.user}}})},
        {"temperature", request.temperature},
        {"max_tokens", request.max_tokens},
    };
    const std::string body = payload.dump();

    const auto timeout = options_.timeout;
    const auto timeout_s = std::chrono::duration_cast<std::chrono::seconds>(timeout).count();
    const auto timeout_us = std::chrono::duration_cast<std::chrono::microseconds>(timeout).count() % 1'000'000;

    auto backoff = std::chrono::duration<double, std::milli>(options_.initial_backoff);
    std::string last_failure;
    int last_status = 0;
    bool last_was_timeout = false;
    const auto started = Clock::now();

    for (int attempt = 1; attempt <= options_.max_attempts; ++attempt) {
        if (attempt > 1) {
            std::this_thread::sleep_for(backoff);
            backoff *= options_.backoff_factor;
        }
        bucket_.acquire();

        httplib::Client client(target.origin);
        client.set_connection_timeout(timeout_s, timeout_us);
        client.set_read_timeout(timeout_s, timeout_us);
        client.set_write_timeout(timeout_s, timeout_us);
        const httplib::Headers headers = {{"Authorization", "Bearer " + credential_}};

        const auto attempt_start = Clock::now();
        auto res = client.Post(target.path, headers, body, "application/json");
        const auto attempt_elapsed = Clock::now() - attempt_start;

        if (!res) {
            const auto err = res.error();
            last_was_timeout = err == httplib::Error::ConnectionTimeout ||
                               (err == httplib::Error::Read && attempt_elapsed >= timeout * 9 / 10);
            last_status = 0;
            last_failure = last_was_timeout ? "timed out" : "request failed: " + httplib::to_string(err);
            continue;
        }
        last_was_timeout = false;
        last_status = res->status;
        if (res->status >= 200 && res->status < 300) {
            CompletionResult result;
            result.text = extract_content(res->body);
            result.latency_ms = std::chrono::duration<double, std::milli>(Clock::now() - started).count();
            result.provider = Provider::Remote;
            result.attempts = attempt;
            return result;
        }
        last_failure = "HTTP status " + std::to_string(res->status);
        if (!transient_status(res->status)) break;
    }

    const std::string where = "completion request to " + endpoint_ + " failed after retries: ";
    if (last_was_timeout) throw TimeoutError(where + last_failure);
    throw TransportError(where + last_failure, last_status);
}

CompletionResult complete_remote(const CompletionRequest& request, const std::string& endpoint,
                                 const std::string& credential, const RemoteOptions& options) {
    RemoteClient client(endpoint, credential, options);
    return client.complete(request);
}

}  // namespace actprompt::llm
