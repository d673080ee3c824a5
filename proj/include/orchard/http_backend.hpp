#pragma once

#include <chrono>
#include <string>
#include <utility>
#include <vector>

#include "orchard/backend.hpp"

namespace orchard {

enum class Provider { OpenAI, Anthropic, Google };

std::string_view to_string(Provider provider) noexcept;
Provider parse_provider(std::string_view text);

struct HttpBackendOptions {
    Provider provider = Provider::OpenAI;
    std::string model;
    std::string base_url;  // scheme://host[:port]
    std::string api_key;
    double temperature = 0.0;
    int max_tokens = 4096;
    std::size_t max_context_tokens = 128000;
    std::chrono::milliseconds timeout{60000};
};

/// Stock endpoint, model id and API key for a provider. Keys come from
/// OPENAI_API_KEY, ANTHROPIC_API_KEY, or GOOGLE_API_KEY (GEMINI_API_KEY).
HttpBackendOptions provider_defaults(Provider provider);

struct ProviderRequest {
    std::string path;
    std::vector<std::pair<std::string, std::string>> headers;
    nlohmann::json body;
};

struct ProviderReply {
    std::string text;
    std::uint64_t prompt_tokens = 0;
    std::uint64_t completion_tokens = 0;
};

/// Chat-completion request for one agent call.
ProviderRequest build_provider_request(const HttpBackendOptions& options, const AgentRequest& request);

/// Extracts text and provider-reported usage. Throws ParseError when the
/// payload lacks either.
ProviderReply parse_provider_reply(Provider provider, const nlohmann::json& payload);

/// Maps an HTTP status to the failure class used for retries.
FailureKind classify_http_status(int status) noexcept;

class HttpBackend final : public AgentBackend {
public:
    explicit HttpBackend(HttpBackendOptions options);

    const BackendIdentity& identity() const noexcept override { return identity_; }
    std::size_t max_context_tokens() const noexcept override { return options_.max_context_tokens; }
    AgentOutput invoke(const AgentRequest& request, Clock& clock) override;

private:
    HttpBackendOptions options_;
    BackendIdentity identity_;
};

}  // namespace orchard
