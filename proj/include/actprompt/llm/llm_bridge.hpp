#pragma once

#include <chrono>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "actprompt/core/errors.hpp"

namespace actprompt::llm {

enum class Provider { Remote, MockNearest, MockCompositional };

const char* to_string(Provider provider);
Provider provider_from_string(std::string_view name);

struct CompletionRequest {
    std::string system;
    std::string user;
    std::string model = "gpt-4-turbo";
    int max_tokens = 1024;
    double temperature = 0.0;

    /// Throws ArgumentError on empty texts, negative temperature or a
    /// non-positive token limit.
    void validate() const;
};

struct CompletionResult {
    std::string text;
    double latency_ms = 0.0;
    Provider provider = Provider::MockNearest;
    int attempts = 1;
};

class LlmError : public Error {
public:
    using Error::Error;
};

/// Non-2xx status (or no connection, status 0) after all retries.
class TransportError : public LlmError {
public:
    TransportError(const std::string& message, int status) : LlmError(message), status_(status) {}
    int status() const { return status_; }

private:
    int status_;
};

/// The endpoint answered 2xx with a body lacking choices[0].message.content.
class ProtocolError : public LlmError {
public:
    using LlmError::LlmError;
};

class TimeoutError : public LlmError {
public:
    using LlmError::LlmError;
};

/// A mock oracle could not find a compatible demonstration.
class OracleError : public LlmError {
public:
    using LlmError::LlmError;
};

/// Thread-safe token bucket; acquire() blocks until a token is available.
class TokenBucket {
public:
    TokenBucket(double rate_per_second, double burst);

    void acquire();

private:
    using Clock = std::chrono::steady_clock;

    double rate_;
    double burst_;
    double tokens_;
    Clock::time_point last_;
    std::mutex mutex_;
};

struct RemoteOptions {
    int max_attempts = 3;
    std::chrono::milliseconds initial_backoff{500};
    double backoff_factor = 2.0;
    std::chrono::milliseconds timeout{60'000};
    double requests_per_second = 1.0;
    double burst = 1.0;
};

/// Chat-completions client: POST <endpoint>/v1/chat/completions with a system
/// and a user message, returning choices[0].message.content. 5xx, 429,
/// connection failures and timeouts are retried with exponential backoff.
/// The credential only ever appears in the Authorization header.
class RemoteClient {
public:
    RemoteClient(std::string endpoint, std::string credential, RemoteOptions options = {});

    CompletionResult complete(const CompletionRequest& request);

    const std::string& endpoint() const { return endpoint_; }

private:
    std::string endpoint_;
    std::string credential_;
    RemoteOptions options_;
    TokenBucket bucket_;
};

CompletionResult complete_remote(const CompletionRequest& request, const std::string& endpoint,
                                 const std::string& credential, const RemoteOptions& options = {});

/// Structured demonstration handed to the offline oracles.
struct MockDemo {
    std::vector<int> observation;  // concatenated observation bins
    std::string instruction;
    std::string output;  // output block in the wire grammar
};

/// Lower-cased, whitespace-collapsed, trailing '.' stripped.
std::string normalize_instruction(std::string_view instruction);
/// normalize_instruction with color words replaced by "<color>".
std::string instruction_template(std::string_view instruction);

/// Returns the stored output of the demonstration closest (squared distance
/// over bins) to `test_observation`. Candidates are demos whose normalized
/// instruction equals the test instruction; when none exists, demos sharing
/// the color-wildcarded template. Ties go to the lowest index.
CompletionResult complete_mock_nearest(std::span<const MockDemo> demos, std::span<const int> test_observation,
                                       std::string_view test_instruction);

/// Index chosen by complete_mock_nearest.
std::size_t nearest_demo_index(std::span<const MockDemo> demos, std::span<const int> test_observation,
                               std::string_view test_instruction);

/// Splits the instruction on ", then ", resolves each segment with the
/// nearest oracle and concatenates the resulting action lists.
CompletionResult complete_mock_compositional(std::span<const MockDemo> demos, std::span<const int> test_observation,
                                             std::string_view test_instruction);

/// Everything any provider may need; remote providers read only `request`.
struct CompletionQuery {
    CompletionRequest request;
    std::vector<MockDemo> demos;
    std::vector<int> test_observation;
    std::string test_instruction;
};

class CompletionProvider {
public:
    virtual ~CompletionProvider() = default;
    virtual Provider kind() const = 0;
    virtual CompletionResult complete(const CompletionQuery& query) = 0;
};

class RemoteProvider final : public CompletionProvider {
public:
    RemoteProvider(std::string endpoint, std::string credential, RemoteOptions options = {})
        : client_(std::move(endpoint), std::move(credential), options) {}
    Provider kind() const override { return Provider::Remote; }
    CompletionResult complete(const CompletionQuery& query) override { return client_.complete(query.request); }

private:
    RemoteClient client_;
};

class MockNearestProvider final : public CompletionProvider {
public:
    Provider kind() const override { return Provider::MockNearest; }
    CompletionResult complete(const CompletionQuery& query) override {
        return complete_mock_nearest(query.demos, query.test_observation, query.test_instruction);
    }
};

class MockCompositionalProvider final : public CompletionProvider {
public:
    Provider kind() const override { return Provider::MockCompositional; }
    CompletionResult complete(const CompletionQuery& query) override {
        return complete_mock_compositional(query.demos, query.test_observation, query.test_instruction);
    }
};

}  // namespace actprompt::llm
