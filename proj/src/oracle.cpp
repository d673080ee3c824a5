#include "orchard/oracle.hpp"

#include <cmath>
#include <cstdio>

namespace orchard {

OracleError::OracleError(TopologyKind topology, const std::string& message)
    : Error("oracle evaluation of " + std::string(to_string(topology)) + " failed: " + message),
      topology_(topology) {}

OracleResult oracle_route(const TaskDag& dag, const TopologyEvaluator& evaluator) {
    OracleResult result;
    bool first = true;
    for (auto kind : kAllTopologies) {
        double score;
        try {
            score = evaluator(dag, kind);
        } catch (const std::exception& e) {
            throw OracleError(kind, e.what());
        }
        if (!std::isfinite(score)) throw OracleError(kind, "score is not finite");
        result.scores[topology_index(kind)] = score;
        if (first || score > result.scores[topology_index(result.best)]) result.best = kind;
        first = false;
    }
    return result;
}

TopologyEvaluator quality_model_evaluator(QualityModel model, WidthMode mode, double base) {
    return [model, mode, base](const TaskDag& dag, TopologyKind kind) {
        return model.qualities(compute_metrics(dag, mode), base)[topology_index(kind)];
    };
}

void ConfusionMatrix::add(TopologyKind router, TopologyKind oracle) {
    ++counts[topology_index(router)][topology_index(oracle)];
}

std::size_t ConfusionMatrix::total() const noexcept {
    std::size_t n = 0;
    for (auto& row : counts)
        for (auto c : row) n += c;
    return n;
}

std::size_t ConfusionMatrix::agreements() const noexcept {
    std::size_t n = 0;
    for (std::size_t i = 0; i < 4; ++i) n += counts[i][i];
    return n;
}

double ConfusionMatrix::accuracy() const noexcept {
    const auto n = total();
    return n == 0 ? 0.0 : static_cast<double>(agreements()) / static_cast<double>(n);
}

std::size_t ConfusionMatrix::row_sum(TopologyKind router) const noexcept {
    std::size_t n = 0;
    for (auto c : counts[topology_index(router)]) n += c;
    return n;
}

std::size_t ConfusionMatrix::column_sum(TopologyKind oracle) const noexcept {
    std::size_t n = 0;
    for (auto& row : counts) n += row[topology_index(oracle)];
    return n;
}

std::string ConfusionMatrix::table() const {
    std::string out;
    char buf[96];
    std::snprintf(buf, sizeof buf, "%-15s", "Router\\Oracle");
    out += buf;
    for (auto kind : kAllTopologies) {
        std::snprintf(buf, sizeof buf, "%8s", std::string(short_label(kind)).c_str());
        out += buf;
    }
    out += "\n";
    for (auto r : kAllTopologies) {
        std::snprintf(buf, sizeof buf, "%-15s", std::string(short_label(r)).c_str());
        out += buf;
        for (auto o : kAllTopologies) {
            std::snprintf(buf, sizeof buf, "%8zu", counts[topology_index(r)][topology_index(o)]);
            out += buf;
        }
        out += "\n";
    }
    std::snprintf(buf, sizeof buf, "Overall router accuracy: %.1f%% (%zu/%zu)\n", 100.0 * accuracy(), agreements(),
                  total());
    out += buf;
    return out;
}

std::string ConfusionMatrix::csv() const {
    std::string out = "router";
    for (auto kind : kAllTopologies) out += "," + std::string(to_string(kind));
    out += "\n";
    for (auto r : kAllTopologies) {
        out += std::string(to_string(r));
        for (auto o : kAllTopologies) out += "," + std::to_string(counts[topology_index(r)][topology_index(o)]);
        out += "\n";
    }
    return out;
}

nlohmann::json ConfusionMatrix::to_json() const {
    nlohmann::json labels = nlohmann::json::array();
    for (auto kind : kAllTopologies) labels.push_back(to_string(kind));
    return {{"labels", labels}, {"counts", counts}, {"total", total()}, {"accuracy", accuracy()}};
}

ConfusionMatrix confusion_matrix(std::span<const TaskDag> tasks, const RouterConfig& config,
                                 const TopologyEvaluator& evaluator) {
    if (tasks.empty()) throw ParameterError("confusion matrix needs at least one task");
    ConfusionMatrix m;
    for (const auto& dag : tasks) m.add(route(dag, config).topology.kind, oracle_route(dag, evaluator).best);
    return m;
}

}  // namespace orchard
