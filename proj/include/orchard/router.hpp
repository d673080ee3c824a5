#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "orchard/dag.hpp"
#include "orchard/metrics.hpp"

namespace orchard {

enum class TopologyKind { Parallel, Sequential, Hierarchical, Hybrid };

inline constexpr TopologyKind kAllTopologies[] = {TopologyKind::Parallel, TopologyKind::Sequential,
                                                  TopologyKind::Hierarchical, TopologyKind::Hybrid};

std::string_view to_string(TopologyKind kind) noexcept;
/// Single-letter label used in tables: P, S, H, X.
std::string_view short_label(TopologyKind kind) noexcept;
TopologyKind parse_topology(std::string_view text);
std::size_t topology_index(TopologyKind kind) noexcept;

struct Topology {
    TopologyKind kind = TopologyKind::Parallel;
    std::vector<std::vector<std::string>> stages;  // Hybrid only

    bool operator==(const Topology&) const = default;
};

struct RouterConfig {
    double theta_omega = 0.5;
    double theta_gamma = 0.6;
    std::size_t theta_delta = 5;
    WidthMode width_mode = WidthMode::Approximate;

    /// Throws ConfigError when a threshold is outside its range.
    void validate() const;
};

RouterConfig router_config_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const RouterConfig& config);
RouterConfig load_router_config(const std::filesystem::path& path);

/// Which branch of the routing rule produced the topology.
enum class FiredRule {
    NoEdges,                   // |E| = 0
    SingleChain,               // omega = 1
    HighCouplingManySubtasks,  // gamma > theta_gamma and |V| > theta_delta
    WideLowCoupling,           // r > theta_omega and gamma <= theta_gamma
    HybridFallback,
};

std::string_view to_string(FiredRule rule) noexcept;

struct RoutingDecision {
    Topology topology;
    DagMetrics metrics;
    FiredRule fired_rule = FiredRule::NoEdges;
    std::chrono::nanoseconds elapsed{0};
};

/// Branch selection on precomputed metrics. Pure: the same metrics and config
/// always give the same answer. All comparisons are strict; values within
/// 1e-9 of a threshold count as equal to it.
std::pair<TopologyKind, FiredRule> select_topology(const DagMetrics& metrics, const RouterConfig& config);

/// Computes metrics under config.width_mode and applies select_topology.
/// Hybrid decisions carry the longest-path layering as their stages.
RoutingDecision route(const TaskDag& dag, const RouterConfig& config);

/// Same as route but with the coupling density replaced by `gamma`; used when
/// synthesis asks for a re-route with raised coupling.
RoutingDecision route_with_coupling(const TaskDag& dag, const RouterConfig& config, double gamma);

nlohmann::json to_json(const DagMetrics& metrics);
nlohmann::json to_json(const Topology& topology);
nlohmann::json to_json(const RoutingDecision& decision);

}  // namespace orchard
