#include "orchard/manifest.hpp"

#include <cstdlib>

#include "orchard/decomposition.hpp"
#include "orchard/error.hpp"

#ifndef ORCHARD_DEFAULT_DATA_DIR
#define ORCHARD_DEFAULT_DATA_DIR "data"
#endif

namespace orchard {

std::string_view to_string(BackendMode mode) noexcept {
    switch (mode) {
        case BackendMode::Mock: return "mock";
        case BackendMode::Scripted: return "scripted";
        case BackendMode::Provider: return "provider";
    }
    return "mock";
}

BackendSelection parse_backend_spec(std::string_view spec) {
    BackendSelection s;
    if (spec == "mock") return s;
    if (spec.starts_with("scripted:")) {
        s.mode = BackendMode::Scripted;
        s.fixture = std::string(spec.substr(9));
        if (s.fixture.empty()) throw ConfigError("scripted backend needs a fixture path");
        return s;
    }
    try {
        s.provider = parse_provider(spec);
    } catch (const Error&) {
        throw ConfigError("unknown backend '" + std::string(spec) + "' (mock, scripted:<path>, openai, anthropic, google)");
    }
    s.mode = BackendMode::Provider;
    return s;
}

PipelineAgents build_agents(const BackendSelection& selection, std::uint64_t seed) {
    if (selection.pool_size < 1) throw ConfigError("pool size must be at least 1");
    PipelineAgents agents;
    switch (selection.mode) {
        case BackendMode::Mock:
            for (std::size_t i = 0; i < selection.pool_size; ++i) {
                auto opts = selection.mock;
                opts.seed = seed + i;
                agents.pool.push_back(std::make_shared<MockBackend>(std::move(opts)));
            }
            return agents;
        case BackendMode::Scripted: {
            std::shared_ptr<AgentBackend> backend = ScriptedBackend::from_file(selection.fixture.string());
            agents.pool.assign(selection.pool_size, backend);
            return agents;
        }
        case BackendMode::Provider: {
            auto opts = provider_defaults(selection.provider);
            if (selection.model) opts.model = *selection.model;
            if (selection.base_url) opts.base_url = *selection.base_url;
            std::shared_ptr<AgentBackend> backend = std::make_shared<HttpBackend>(std::move(opts));
            agents.pool.assign(selection.pool_size, backend);
            return agents;
        }
    }
    throw ConfigError("unknown backend mode");
}

std::filesystem::path default_data_dir() {
    if (const char* env = std::getenv("ORCHARD_DATA_DIR"); env && *env) return env;
    return ORCHARD_DEFAULT_DATA_DIR;
}

void RunManifest::validate() const {
    auto need = [](const std::filesystem::path& p, const char* what) {
        if (p.empty()) throw ConfigError(std::string("manifest: ") + what + " path is required");
        if (!std::filesystem::exists(p)) throw ConfigError(std::string("manifest: ") + what + " not found: " + p.string());
    };
    need(dag, "dag");
    need(pricing, "pricing");
    if (router_config) need(*router_config, "router_config");
    if (templates) need(*templates, "templates");
    if (backend.mode == BackendMode::Scripted) need(backend.fixture, "backend fixture");
    if (concurrency < 1) throw ConfigError("manifest: concurrency must be at least 1");
    if (context_budget < 1) throw ConfigError("manifest: context_budget must be positive");
    if (!(theta_cs >= 0.0 && theta_cs <= 1.0)) throw ConfigError("manifest: theta_cs must lie in [0, 1]");
    if (backend.pool_size < 1) throw ConfigError("manifest: pool_size must be at least 1");
    if (output_dir.empty()) throw ConfigError("manifest: output_dir is required");
}

RunManifest parse_manifest(const nlohmann::json& doc, const std::filesystem::path& base_dir) {
    if (!doc.is_object()) throw ConfigError("manifest must be a JSON object");
    auto path_of = [&](const std::string& value) {
        std::filesystem::path p(value);
        return p.is_absolute() ? p : base_dir / p;
    };
    RunManifest m;
    m.pricing = default_data_dir() / "config" / "pricing.json";
    try {
        m.task_id = doc.value("task_id", m.task_id);
        m.task_text = doc.value("task_text", std::string{});
        m.domain = doc.value("domain", std::string{});
        if (!doc.contains("dag")) throw ConfigError("manifest: 'dag' is required");
        m.dag = path_of(doc["dag"].get<std::string>());
        if (doc.contains("router_config")) m.router_config = path_of(doc["router_config"].get<std::string>());
        if (doc.contains("pricing")) m.pricing = path_of(doc["pricing"].get<std::string>());
        if (doc.contains("templates")) m.templates = path_of(doc["templates"].get<std::string>());

        if (!doc.contains("backend") || !doc["backend"].is_object())
            throw ConfigError("manifest: 'backend' object is required");
        const auto& b = doc["backend"];
        int modes = 0;
        const std::string mode = b.value("mode", std::string{});
        if (mode == "mock") {
            ++modes;
            m.backend.mode = BackendMode::Mock;
        } else if (mode == "scripted") {
            ++modes;
            m.backend.mode = BackendMode::Scripted;
            if (!b.contains("fixture")) throw ConfigError("manifest: scripted backend needs 'fixture'");
            m.backend.fixture = path_of(b["fixture"].get<std::string>());
        } else if (mode == "provider") {
            ++modes;
            m.backend.mode = BackendMode::Provider;
            if (!b.contains("provider")) throw ConfigError("manifest: provider backend needs 'provider'");
            m.backend.provider = parse_provider(b["provider"].get<std::string>());
            if (b.contains("model")) m.backend.model = b["model"].get<std::string>();
            if (b.contains("base_url")) m.backend.base_url = b["base_url"].get<std::string>();
        }
        if (modes != 1) throw ConfigError("manifest: backend.mode must be one of mock, scripted, provider");
        m.backend.pool_size = b.value("pool_size", std::size_t{1});
        if (b.contains("latency_ms")) m.backend.mock.latency = std::chrono::milliseconds(b["latency_ms"].get<long long>());
        if (b.contains("fail"))
            for (auto& id : b["fail"]) m.backend.mock.fail_permanently.insert(id.get<std::string>());
        if (b.contains("fail_transient"))
            for (auto& [id, n] : b["fail_transient"].items()) m.backend.mock.fail_transiently[id] = n.get<int>();

        m.concurrency = doc.value("concurrency", m.concurrency);
        m.seed = doc.value("seed", m.seed);
        const std::string clock =
            doc.value("clock", std::string(m.backend.mode == BackendMode::Provider ? "steady" : "virtual"));
        if (clock != "virtual" && clock != "steady") throw ConfigError("manifest: clock must be virtual or steady");
        m.virtual_clock = clock == "virtual";
        if (doc.contains("timeout_ms")) m.timeout = std::chrono::milliseconds(doc["timeout_ms"].get<long long>());
        m.context_budget = doc.value("context_budget", m.context_budget);
        m.theta_cs = doc.value("theta_cs", m.theta_cs);
        m.output_dir = path_of(doc.value("output_dir", std::string("out")));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("manifest: ") + e.what());
    } catch (const ParseError& e) {
        throw ConfigError(std::string("manifest: ") + e.what());
    }
    m.validate();
    return m;
}

RunManifest load_manifest(const std::filesystem::path& path) {
    nlohmann::json doc;
    try {
        doc = read_json_file(path);
    } catch (const ParseError& e) {
        throw ConfigError(e.what());
    }
    return parse_manifest(doc, path.parent_path());
}

}  // namespace orchard
