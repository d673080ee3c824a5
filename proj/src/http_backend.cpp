#include "orchard/http_backend.hpp"

#include <cstdlib>

#include <httplib.h>

namespace orchard {

using nlohmann::json;

std::string_view to_string(Provider provider) noexcept {
    switch (provider) {
    case Provider::OpenAI: return "openai";
    case Provider::Anthropic: return "anthropic";
    case Provider::Google: return "google";
    }
    return "openai";
}

Provider parse_provider(std::string_view text) {
    if (text == "openai") return Provider::OpenAI;
    if (text == "anthropic") return Provider::Anthropic;
    if (text == "google" || text == "gemini") return Provider::Google;
    throw ParseError("unknown provider '" + std::string(text) + "' (expected openai|anthropic|google)");
}

namespace {

std::string env_or_empty(const char* name) {
    const char* value = std::getenv(name);
    return value ? value : "";
}

std::string user_content(const AgentRequest& request) {
    if (request.context.empty()) return request.instruction;
    return request.context + "\n\n" + request.instruction;
}

}  // namespace

HttpBackendOptions provider_defaults(Provider provider) {
    HttpBackendOptions options;
    options.provider = provider;
    switch (provider) {
    case Provider::OpenAI:
        options.model = "gpt-4o-mini-2024-07-18";
        options.base_url = "https://api.openai.com";
        options.api_key = env_or_empty("OPENAI_API_KEY");
        break;
    case Provider::Anthropic:
        options.model = "claude-3-5-haiku-20241022";
        options.base_url = "https://api.anthropic.com";
        options.api_key = env_or_empty("ANTHROPIC_API_KEY");
        options.max_context_tokens = 200000;
        break;
    case Provider::Google:
        options.model = "gemini-2.0-flash-001";
        options.base_url = "https://generativelanguage.googleapis.com";
        options.api_key = env_or_empty("GOOGLE_API_KEY");
        if (options.api_key.empty()) options.api_key = env_or_empty("GEMINI_API_KEY");
        options.max_context_tokens = 1000000;
        break;
    }
    return options;
}

ProviderRequest build_provider_request(const HttpBackendOptions& options, const AgentRequest& request) {
    ProviderRequest out;
    const std::string content = user_content(request);
    switch (options.provider) {
    case Provider::OpenAI:
        out.path = "/v1/chat/completions";
        out.headers = {{"Authorization", "Bearer " + options.api_key}};
        out.body = {{"model", options.model},
                    {"messages", json::array({{{"role", "user"}, {"content", content}}})},
                    {"temperature", options.temperature},
                    {"max_tokens", options.max_tokens}};
        break;
    case Provider::Anthropic:
        out.path = "/v1/messages";
        out.headers = {{"x-api-key", options.api_key}, {"anthropic-version", "2023-06-01"}};
        out.body = {{"model", options.model},
                    {"messages", json::array({{{"role", "user"}, {"content", content}}})},
                    {"temperature", options.temperature},
                    {"max_tokens", options.max_tokens}};
        break;
    case Provider::Google:
        out.path = "/v1beta/models/" + options.model + ":generateContent";
        out.headers = {{"x-goog-api-key", options.api_key}};
        out.body = {{"contents", json::array({{{"role", "user"}, {"parts", json::array({{{"text", content}}})}}})},
                    {"generationConfig",
                     {{"temperature", options.temperature}, {"maxOutputTokens", options.max_tokens}}}};
        break;
    }
    return out;
}

ProviderReply parse_provider_reply(Provider provider, const json& payload) {
    ProviderReply reply;
    try {
        switch (provider) {
        case Provider::OpenAI:
            reply.text = payload.at("choices").at(0).at("message").at("content").get<std::string>();
            reply.prompt_tokens = payload.at("usage").at("prompt_tokens").get<std::uint64_t>();
            reply.completion_tokens = payload.at("usage").at("completion_tokens").get<std::uint64_t>();
            break;
        case Provider::Anthropic:
            for (const auto& block : payload.at("content"))
                if (block.value("type", std::string("text")) == "text") reply.text += block.at("text").get<std::string>();
            reply.prompt_tokens = payload.at("usage").at("input_tokens").get<std::uint64_t>();
            reply.completion_tokens = payload.at("usage").at("output_tokens").get<std::uint64_t>();
            break;
        case Provider::Google:
            for (const auto& part : payload.at("candidates").at(0).at("content").at("parts"))
                reply.text += part.value("text", std::string{});
            reply.prompt_tokens = payload.at("usageMetadata").at("promptTokenCount").get<std::uint64_t>();
            reply.completion_tokens = payload.at("usageMetadata").value("candidatesTokenCount", std::uint64_t{0});
            break;
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string(to_string(provider)) + " response: " + e.what());
    }
    return reply;
}

FailureKind classify_http_status(int status) noexcept {
    if (status == 408) return FailureKind::Timeout;
    if (status == 409 || status == 425 || status == 429 || status >= 500) return FailureKind::Transient;
    return FailureKind::Permanent;
}

HttpBackend::HttpBackend(HttpBackendOptions options)
    : options_(std::move(options)), identity_{std::string(to_string(options_.provider)), options_.model} {
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
    if (options_.base_url.rfind("https://", 0) == 0)
        throw ConfigError("HTTPS backends need a build with OpenSSL support");
#endif
    if (options_.api_key.empty() && options_.base_url.rfind("https://", 0) == 0)
        throw ConfigError("no API key configured for provider " + identity_.name);
}

AgentOutput HttpBackend::invoke(const AgentRequest& request, Clock& clock) {
    const auto timeout = request.timeout.value_or(options_.timeout);
    httplib::Client client(options_.base_url);
    client.set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout).count() + 1);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);

    const ProviderRequest spec = build_provider_request(options_, request);
    httplib::Headers headers;
    for (const auto& [key, value] : spec.headers) headers.emplace(key, value);

    const auto start = clock.now();
    auto result = client.Post(spec.path, headers, spec.body.dump(), "application/json");
    const auto latency = clock.now() - start;

    if (!result) {
        const auto error = result.error();
        const auto kind = error == httplib::Error::Read || error == httplib::Error::ConnectionTimeout
                              ? FailureKind::Timeout
                              : FailureKind::Transient;
        throw BackendFailure(kind, identity_.label(), "request failed: " + httplib::to_string(error));
    }
    if (result->status != 200)
        throw BackendFailure(classify_http_status(result->status), identity_.label(),
                             "HTTP " + std::to_string(result->status) + ": " + result->body.substr(0, 200));

    json payload;
    try {
        payload = json::parse(result->body);
    } catch (const json::parse_error& e) {
        throw BackendFailure(FailureKind::Permanent, identity_.label(), std::string("unparseable body: ") + e.what());
    }
    ProviderReply reply;
    try {
        reply = parse_provider_reply(options_.provider, payload);
    } catch (const ParseError& e) {
        throw BackendFailure(FailureKind::Permanent, identity_.label(), e.what());
    }

    AgentOutput out;
    out.subtask_id = request.subtask_id;
    out.text = std::move(reply.text);
    out.prompt_tokens = reply.prompt_tokens;
    out.completion_tokens = reply.completion_tokens;
    out.latency = latency;
    out.backend = identity_;
    return out;
}

}  // namespace orchard
