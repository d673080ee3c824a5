#include "orchard/router.hpp"

#include <algorithm>
#include <cmath>

#include "orchard/decomposition.hpp"

namespace orchard {

namespace {

constexpr double kThresholdSlack = 1e-9;

bool exceeds(double value, double threshold) { return value > threshold + kThresholdSlack; }

Topology make_topology(const TaskDag& dag, TopologyKind kind) {
    Topology t{kind, {}};
    if (kind == TopologyKind::Hybrid) t.stages = topological_layer_ids(dag);
    return t;
}

}  // namespace

std::string_view to_string(TopologyKind kind) noexcept {
    switch (kind) {
    case TopologyKind::Parallel: return "Parallel";
    case TopologyKind::Sequential: return "Sequential";
    case TopologyKind::Hierarchical: return "Hierarchical";
    case TopologyKind::Hybrid: return "Hybrid";
    }
    return "Parallel";
}

std::string_view short_label(TopologyKind kind) noexcept {
    switch (kind) {
    case TopologyKind::Parallel: return "P";
    case TopologyKind::Sequential: return "S";
    case TopologyKind::Hierarchical: return "H";
    case TopologyKind::Hybrid: return "X";
    }
    return "P";
}

TopologyKind parse_topology(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "parallel" || lower == "p") return TopologyKind::Parallel;
    if (lower == "sequential" || lower == "s") return TopologyKind::Sequential;
    if (lower == "hierarchical" || lower == "h") return TopologyKind::Hierarchical;
    if (lower == "hybrid" || lower == "x") return TopologyKind::Hybrid;
    throw ParseError("unknown topology '" + std::string(text) + "'");
}

std::size_t topology_index(TopologyKind kind) noexcept { return static_cast<std::size_t>(kind); }

std::string_view to_string(FiredRule rule) noexcept {
    switch (rule) {
    case FiredRule::NoEdges: return "no-edges";
    case FiredRule::SingleChain: return "single-chain";
    case FiredRule::HighCouplingManySubtasks: return "high-coupling-many-subtasks";
    case FiredRule::WideLowCoupling: return "wide-low-coupling";
    case FiredRule::HybridFallback: return "hybrid-fallback";
    }
    return "hybrid-fallback";
}

void RouterConfig::validate() const {
    if (!(theta_omega > 0.0 && theta_omega <= 1.0))
        throw ConfigError("theta_omega must lie in (0, 1], got " + std::to_string(theta_omega));
    if (!(theta_gamma >= 0.0 && theta_gamma <= 1.0))
        throw ConfigError("theta_gamma must lie in [0, 1], got " + std::to_string(theta_gamma));
    if (theta_delta < 1) throw ConfigError("theta_delta must be a positive integer");
}

RouterConfig router_config_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ParseError("router config must be a JSON object");
    RouterConfig config;
    try {
        if (doc.contains("theta_omega")) config.theta_omega = doc["theta_omega"].get<double>();
        if (doc.contains("theta_gamma")) config.theta_gamma = doc["theta_gamma"].get<double>();
        if (doc.contains("theta_delta")) {
            const auto delta = doc["theta_delta"].get<long long>();
            if (delta < 1) throw ConfigError("theta_delta must be a positive integer");
            config.theta_delta = static_cast<std::size_t>(delta);
        }
        if (doc.contains("width_mode")) config.width_mode = parse_width_mode(doc["width_mode"].get<std::string>());
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("router config: ") + e.what());
    }
    config.validate();
    return config;
}

nlohmann::json to_json(const RouterConfig& config) {
    return {{"theta_omega", config.theta_omega},
            {"theta_gamma", config.theta_gamma},
            {"theta_delta", config.theta_delta},
            {"width_mode", std::string(to_string(config.width_mode))}};
}

RouterConfig load_router_config(const std::filesystem::path& path) {
    return router_config_from_json(read_json_file(path));
}

std::pair<TopologyKind, FiredRule> select_topology(const DagMetrics& m, const RouterConfig& config) {
    const double gamma = m.coupling_density;
    const double ratio = m.parallelism_ratio;
    if (m.edge_count == 0) return {TopologyKind::Parallel, FiredRule::NoEdges};
    if (m.width() == 1) return {TopologyKind::Sequential, FiredRule::SingleChain};
    if (exceeds(gamma, config.theta_gamma) && m.vertex_count > config.theta_delta)
        return {TopologyKind::Hierarchical, FiredRule::HighCouplingManySubtasks};
    if (exceeds(ratio, config.theta_omega) && !exceeds(gamma, config.theta_gamma))
        return {TopologyKind::Parallel, FiredRule::WideLowCoupling};
    return {TopologyKind::Hybrid, FiredRule::HybridFallback};
}

RoutingDecision route(const TaskDag& dag, const RouterConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    RoutingDecision decision;
    decision.metrics = compute_metrics(dag, config.width_mode);
    auto [kind, rule] = select_topology(decision.metrics, config);
    decision.topology = make_topology(dag, kind);
    decision.fired_rule = rule;
    decision.elapsed = std::chrono::steady_clock::now() - start;
    return decision;
}

RoutingDecision route_with_coupling(const TaskDag& dag, const RouterConfig& config, double gamma) {
    const auto start = std::chrono::steady_clock::now();
    RoutingDecision decision;
    decision.metrics = compute_metrics(dag, config.width_mode);
    decision.metrics.coupling_density = std::clamp(gamma, 0.0, 1.0);
    auto [kind, rule] = select_topology(decision.metrics, config);
    decision.topology = make_topology(dag, kind);
    decision.fired_rule = rule;
    decision.elapsed = std::chrono::steady_clock::now() - start;
    return decision;
}

nlohmann::json to_json(const DagMetrics& m) {
    return {{"width_exact", m.width_exact},
            {"width_approx", m.width_approx},
            {"width_is_exact", m.width_is_exact},
            {"depth", m.depth},
            {"coupling_density", m.coupling_density},
            {"parallelism_ratio", m.parallelism_ratio},
            {"vertex_count", m.vertex_count},
            {"edge_count", m.edge_count},
            {"total_weight", m.total_weight}};
}

nlohmann::json to_json(const Topology& topology) {
    nlohmann::json out = {{"kind", std::string(to_string(topology.kind))}};
    if (topology.kind == TopologyKind::Hybrid) out["stages"] = topology.stages;
    return out;
}

nlohmann::json to_json(const RoutingDecision& decision) {
    return {{"topology", to_json(decision.topology)},
            {"fired_rule", std::string(to_string(decision.fired_rule))},
            {"metrics", to_json(decision.metrics)},
            {"elapsed_us", std::chrono::duration<double, std::micro>(decision.elapsed).count()}};
}

}  // namespace orchard
