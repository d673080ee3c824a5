#include <fstream>

#include "orchard/backend.hpp"
#include "orchard/decomposition.hpp"

namespace orchard {

namespace {

ScriptedResponse parse_response(const nlohmann::json& item, std::chrono::milliseconds default_latency,
                                const std::string& key) {
    if (!item.is_object()) throw ParseError("scripted response for '" + key + "' must be an object");
    ScriptedResponse r;
    try {
        r.text = item.value("text", std::string{});
        r.completion_tokens = item.value("completion_tokens", approximate_tokens(r.text));
        if (item.contains("prompt_tokens")) r.prompt_tokens = item["prompt_tokens"].get<std::uint64_t>();
        r.latency = item.contains("latency_ms") ? std::chrono::milliseconds(item["latency_ms"].get<long long>())
                                                : default_latency;
        if (item.contains("fail")) {
            const auto kind = item["fail"].get<std::string>();
            if (kind == "transient") r.fail = FailureKind::Transient;
            else if (kind == "permanent") r.fail = FailureKind::Permanent;
            else if (kind == "timeout") r.fail = FailureKind::Timeout;
            else throw ParseError("scripted response for '" + key + "': unknown failure kind '" + kind + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("scripted response for '" + key + "': " + e.what());
    }
    return r;
}

}  // namespace

std::unique_ptr<ScriptedBackend> ScriptedBackend::from_json(const nlohmann::json& fixture) {
    if (!fixture.is_object()) throw ParseError("scripted fixture must be a JSON object");
    BackendIdentity identity{fixture.value("name", std::string("scripted")),
                             fixture.value("model", std::string("fixture"))};
    const std::chrono::milliseconds latency(fixture.value("latency_ms", 0LL));

    std::map<std::string, std::vector<ScriptedResponse>> responses;
    if (fixture.contains("responses")) {
        const auto& table = fixture["responses"];
        if (!table.is_object()) throw ParseError("scripted fixture: 'responses' must be an object");
        for (const auto& [key, value] : table.items()) {
            auto& list = responses[key];
            if (value.is_array()) {
                for (const auto& item : value) list.push_back(parse_response(item, latency, key));
                if (list.empty()) throw ParseError("scripted response list for '" + key + "' is empty");
            } else {
                list.push_back(parse_response(value, latency, key));
            }
        }
    }
    std::optional<ScriptedResponse> fallback;
    if (fixture.contains("default")) fallback = parse_response(fixture["default"], latency, "default");
    return std::make_unique<ScriptedBackend>(std::move(identity), std::move(responses), std::move(fallback),
                                             latency);
}

std::unique_ptr<ScriptedBackend> ScriptedBackend::from_file(const std::string& path) {
    return from_json(read_json_file(path));
}

ScriptedBackend::ScriptedBackend(BackendIdentity identity,
                                 std::map<std::string, std::vector<ScriptedResponse>> responses,
                                 std::optional<ScriptedResponse> fallback, std::chrono::milliseconds default_latency)
    : identity_(std::move(identity)), responses_(std::move(responses)), fallback_(std::move(fallback)),
      default_latency_(default_latency) {}

std::size_t ScriptedBackend::calls(const std::string& key) const {
    std::lock_guard lock(mutex_);
    auto it = calls_.find(key);
    return it == calls_.end() ? 0 : it->second;
}

std::size_t ScriptedBackend::total_calls() const {
    std::lock_guard lock(mutex_);
    std::size_t total = 0;
    for (const auto& [key, count] : calls_) total += count;
    return total;
}

std::vector<AgentRequest> ScriptedBackend::requests() const {
    std::lock_guard lock(mutex_);
    return requests_;
}

AgentOutput ScriptedBackend::invoke(const AgentRequest& request, Clock& clock) {
    ScriptedResponse response;
    {
        std::lock_guard lock(mutex_);
        const std::size_t call = calls_[request.subtask_id]++;
        requests_.push_back(request);
        auto it = responses_.find(request.subtask_id);
        if (it != responses_.end()) {
            response = it->second[std::min(call, it->second.size() - 1)];
        } else if (fallback_) {
            response = *fallback_;
            if (response.text.empty()) response.text = "scripted output for " + request.subtask_id;
            if (response.completion_tokens == 0) response.completion_tokens = approximate_tokens(response.text);
        } else {
            throw BackendFailure(FailureKind::Permanent, identity_.label(),
                                 "no scripted response for '" + request.subtask_id + "'");
        }
    }

    const auto start = clock.now();
    if (response.fail == FailureKind::Timeout ||
        (request.timeout && response.latency > *request.timeout)) {
        clock.sleep_for(request.timeout.value_or(response.latency));
        throw BackendFailure(FailureKind::Timeout, identity_.label(),
                             "no response for '" + request.subtask_id + "' within timeout");
    }
    clock.sleep_for(response.latency);
    if (response.fail)
        throw BackendFailure(*response.fail, identity_.label(), "scripted failure for '" + request.subtask_id + "'");

    AgentOutput out;
    out.subtask_id = request.subtask_id;
    out.text = response.text;
    out.prompt_tokens = response.prompt_tokens.value_or(approximate_tokens(request.instruction) +
                                                        approximate_tokens(request.context));
    out.completion_tokens = response.completion_tokens;
    out.latency = clock.now() - start;
    out.backend = identity_;
    return out;
}

}  // namespace orchard
