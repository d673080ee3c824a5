#include "orchard/backend.hpp"

#include <cctype>
#include <cstdio>
#include <sstream>

namespace orchard {

nlohmann::json to_json(const AgentOutput& output) {
    return {{"subtask_id", output.subtask_id},
            {"text", output.text},
            {"prompt_tokens", output.prompt_tokens},
            {"completion_tokens", output.completion_tokens},
            {"latency_ms", std::chrono::duration<double, std::milli>(output.latency).count()},
            {"backend", output.backend.name},
            {"model", output.backend.model}};
}

std::string_view to_string(FailureKind kind) noexcept {
    switch (kind) {
    case FailureKind::Transient: return "transient";
    case FailureKind::Permanent: return "permanent";
    case FailureKind::Timeout: return "timeout";
    }
    return "permanent";
}

BackendFailure::BackendFailure(FailureKind kind, std::string backend, const std::string& message)
    : Error(backend + " (" + std::string(to_string(kind)) + "): " + message), kind_(kind),
      backend_(std::move(backend)) {}

std::uint64_t approximate_tokens(std::string_view text) noexcept {
    std::uint64_t count = 0;
    bool in_word = false;
    for (char c : text) {
        const bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
        if (!space && !in_word) ++count;
        in_word = !space;
    }
    return count;
}

namespace {

std::uint32_t fnv1a(std::string_view text, std::uint32_t hash = 2166136261u) {
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 16777619u;
    }
    return hash;
}

std::string first_words(std::string_view text, std::size_t limit) {
    std::istringstream in{std::string(text)};
    std::string word, out;
    for (std::size_t i = 0; i < limit && in >> word; ++i) {
        if (!out.empty()) out += ' ';
        out += word;
    }
    return out;
}

}  // namespace

MockBackend::MockBackend(MockBackendOptions options)
    : options_(std::move(options)), identity_{options_.name, options_.model},
      transient_left_(options_.fail_transiently) {}

std::size_t MockBackend::calls() const {
    std::lock_guard lock(mutex_);
    return calls_;
}

AgentOutput MockBackend::invoke(const AgentRequest& request, Clock& clock) {
    bool fail_transient = false;
    {
        std::lock_guard lock(mutex_);
        ++calls_;
        auto it = transient_left_.find(request.subtask_id);
        if (it != transient_left_.end() && it->second > 0) {
            --it->second;
            fail_transient = true;
        }
    }

    const auto start = clock.now();
    if (request.timeout && options_.latency > *request.timeout) {
        clock.sleep_for(*request.timeout);
        throw BackendFailure(FailureKind::Timeout, identity_.label(),
                             "no response for '" + request.subtask_id + "' within timeout");
    }
    clock.sleep_for(options_.latency);
    if (options_.fail_permanently.count(request.subtask_id))
        throw BackendFailure(FailureKind::Permanent, identity_.label(),
                             "injected failure for '" + request.subtask_id + "'");
    if (fail_transient)
        throw BackendFailure(FailureKind::Transient, identity_.label(),
                             "injected transient failure for '" + request.subtask_id + "'");

    const std::uint32_t tag =
        fnv1a(request.instruction, fnv1a(request.subtask_id, fnv1a(std::to_string(options_.seed))));
    char tag_text[16];
    std::snprintf(tag_text, sizeof tag_text, "%08x", tag);

    AgentOutput out;
    out.subtask_id = request.subtask_id;
    out.text = "[" + identity_.model + " " + tag_text + "] " + request.subtask_id + ": " +
               first_words(request.instruction, options_.echo_words);
    out.prompt_tokens = approximate_tokens(request.instruction) + approximate_tokens(request.context);
    out.completion_tokens = approximate_tokens(out.text);
    out.latency = clock.now() - start;
    out.backend = identity_;
    return out;
}

}  // namespace orchard
