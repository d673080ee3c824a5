#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "orchard/backend.hpp"
#include "orchard/http_backend.hpp"
#include "orchard/pipeline.hpp"

namespace orchard {

enum class BackendMode { Mock, Scripted, Provider };

std::string_view to_string(BackendMode mode) noexcept;

struct BackendSelection {
    BackendMode mode = BackendMode::Mock;
    std::filesystem::path fixture;  // Scripted
    Provider provider = Provider::OpenAI;
    std::optional<std::string> model;     // Provider override
    std::optional<std::string> base_url;  // Provider override
    MockBackendOptions mock;
    std::size_t pool_size = 1;
};

/// "mock", "scripted:<fixture path>", or a provider name.
BackendSelection parse_backend_spec(std::string_view spec);

/// Builds the agent pool. Mock pools get one backend per slot, seeded
/// seed + slot; scripted and provider pools share one backend across slots.
PipelineAgents build_agents(const BackendSelection& selection, std::uint64_t seed);

/// Directory holding config/ and templates/. ORCHARD_DATA_DIR overrides the
/// build-time default.
std::filesystem::path default_data_dir();

/// Everything one exec run needs. Paths in a manifest file resolve against
/// the manifest's directory.
///
///   { "task_id": "diamond", "task_text": "...", "domain": "demo",
///     "dag": "diamond.json", "router_config": "router.json",
///     "pricing": "pricing.json", "templates": "templates/",
///     "backend": { "mode": "mock" | "scripted" | "provider",
///                  "fixture": "...", "provider": "openai", "model": "...",
///                  "latency_ms": 100, "pool_size": 3,
///                  "fail": ["id"], "fail_transient": {"id": 1} },
///     "concurrency": 8, "seed": 42, "clock": "virtual" | "steady",
///     "timeout_ms": 60000, "context_budget": 8192, "theta_cs": 0.8,
///     "output_dir": "out" }
struct RunManifest {
    std::string task_id = "task";
    std::string task_text;
    std::string domain;
    std::filesystem::path dag;
    std::optional<std::filesystem::path> router_config;
    std::filesystem::path pricing;
    std::optional<std::filesystem::path> templates;
    BackendSelection backend;
    std::size_t concurrency = kDefaultMaxWorkers;
    std::uint64_t seed = 42;
    bool virtual_clock = true;
    std::optional<std::chrono::milliseconds> timeout;
    std::size_t context_budget = kDefaultContextBudget;
    double theta_cs = kDefaultThetaCs;
    std::filesystem::path output_dir = "out";

    /// Throws ConfigError for missing files or out-of-range values.
    void validate() const;
};

RunManifest parse_manifest(const nlohmann::json& doc, const std::filesystem::path& base_dir);
RunManifest load_manifest(const std::filesystem::path& path);

}  // namespace orchard
