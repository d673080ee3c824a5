#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "orchard/clock.hpp"
#include "orchard/error.hpp"

namespace orchard {

struct BackendIdentity {
    std::string name;   // provider or backend family: "openai", "mock", ...
    std::string model;  // model label, also the pricing key

    std::string label() const { return name + "/" + model; }
    bool operator==(const BackendIdentity&) const = default;
};

struct AgentRequest {
    std::string subtask_id;
    std::string instruction;
    std::string context;
    std::optional<std::chrono::milliseconds> timeout;
};

/// One agent invocation result. Token counts are whatever the backend
/// reported; nothing downstream re-tokenizes.
struct AgentOutput {
    std::string subtask_id;
    std::string text;
    std::uint64_t prompt_tokens = 0;
    std::uint64_t completion_tokens = 0;
    std::chrono::nanoseconds latency{0};
    BackendIdentity backend;
};

nlohmann::json to_json(const AgentOutput& output);

enum class FailureKind { Transient, Permanent, Timeout };

std::string_view to_string(FailureKind kind) noexcept;

class BackendFailure : public Error {
public:
    BackendFailure(FailureKind kind, std::string backend, const std::string& message);
    FailureKind kind() const noexcept { return kind_; }
    bool retryable() const noexcept { return kind_ != FailureKind::Permanent; }
    const std::string& backend() const noexcept { return backend_; }

private:
    FailureKind kind_;
    std::string backend_;
};

/// An agent that turns (instruction, context) into text. Implementations
/// must tolerate concurrent invoke() calls and must either return or throw
/// BackendFailure; sleeping for simulated latency goes through `clock`.
class AgentBackend {
public:
    virtual ~AgentBackend() = default;
    virtual const BackendIdentity& identity() const noexcept = 0;
    virtual std::size_t max_context_tokens() const noexcept = 0;
    virtual AgentOutput invoke(const AgentRequest& request, Clock& clock) = 0;
};

/// Whitespace-delimited word count; the fallback token estimate.
std::uint64_t approximate_tokens(std::string_view text) noexcept;

struct MockBackendOptions {
    std::string name = "mock";
    std::string model = "mock";
    std::chrono::milliseconds latency{100};
    std::size_t max_context_tokens = 128000;
    std::size_t echo_words = 24;  // instruction words echoed into the output
    std::uint64_t seed = 0;
    std::set<std::string> fail_permanently;                 // subtask ids
    std::map<std::string, int> fail_transiently;            // subtask id -> failures before success
};

/// Deterministic offline backend: echoes the instruction, reports word-count
/// tokens, and sleeps a constant latency on the supplied clock.
class MockBackend final : public AgentBackend {
public:
    explicit MockBackend(MockBackendOptions options);

    const BackendIdentity& identity() const noexcept override { return identity_; }
    std::size_t max_context_tokens() const noexcept override { return options_.max_context_tokens; }
    AgentOutput invoke(const AgentRequest& request, Clock& clock) override;

    std::size_t calls() const;

private:
    MockBackendOptions options_;
    BackendIdentity identity_;
    mutable std::mutex mutex_;
    std::map<std::string, int> transient_left_;
    std::size_t calls_ = 0;
};

struct ScriptedResponse {
    std::string text;
    std::optional<std::uint64_t> prompt_tokens;  // defaults to a word count of the request
    std::uint64_t completion_tokens = 0;
    std::chrono::milliseconds latency{0};
    std::optional<FailureKind> fail;
};

/// Replays canned responses from a fixture, keyed by subtask id.
///
/// Fixture layout:
///   { "name": "scripted", "model": "fixture", "latency_ms": 100,
///     "responses": { "<id>": {response} | [{response}, ...] },
///     "default": {response} }
/// A response is { "text", "prompt_tokens", "completion_tokens",
/// "latency_ms", "fail": "transient"|"permanent"|"timeout" }. A list is
/// consumed one entry per call and its last entry repeats. Synthesis and
/// lead calls use the ids "@merge", "@arbiter", "@lead.assign" and
/// "@lead.reconcile".
class ScriptedBackend final : public AgentBackend {
public:
    static std::unique_ptr<ScriptedBackend> from_json(const nlohmann::json& fixture);
    static std::unique_ptr<ScriptedBackend> from_file(const std::string& path);

    ScriptedBackend(BackendIdentity identity, std::map<std::string, std::vector<ScriptedResponse>> responses,
                    std::optional<ScriptedResponse> fallback, std::chrono::milliseconds default_latency);

    const BackendIdentity& identity() const noexcept override { return identity_; }
    std::size_t max_context_tokens() const noexcept override { return 128000; }
    AgentOutput invoke(const AgentRequest& request, Clock& clock) override;

    /// Calls made so far for one key.
    std::size_t calls(const std::string& key) const;
    std::size_t total_calls() const;
    /// Requests seen, in arrival order.
    std::vector<AgentRequest> requests() const;

private:
    BackendIdentity identity_;
    std::map<std::string, std::vector<ScriptedResponse>> responses_;
    std::optional<ScriptedResponse> fallback_;
    std::chrono::milliseconds default_latency_;
    mutable std::mutex mutex_;
    std::map<std::string, std::size_t> calls_;
    std::vector<AgentRequest> requests_;
};

}  // namespace orchard
