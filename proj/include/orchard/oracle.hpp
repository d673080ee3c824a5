#pragma once

#include <array>
#include <functional>
#include <span>
#include <string>

#include <json.hpp>

#include "orchard/calibration.hpp"
#include "orchard/convergence.hpp"
#include "orchard/error.hpp"
#include "orchard/router.hpp"

namespace orchard {

/// Quality of running `dag` under `topology`; higher is better.
using TopologyEvaluator = std::function<double(const TaskDag& dag, TopologyKind topology)>;

class OracleError : public Error {
public:
    OracleError(TopologyKind topology, const std::string& message);
    TopologyKind topology() const noexcept { return topology_; }

private:
    TopologyKind topology_;
};

struct OracleResult {
    TopologyKind best = TopologyKind::Parallel;
    TopologyScores scores{};
};

/// Scores all four topologies and takes the best; ties go to the earlier of
/// Parallel, Sequential, Hierarchical, Hybrid. Evaluator exceptions and
/// non-finite scores raise OracleError.
OracleResult oracle_route(const TaskDag& dag, const TopologyEvaluator& evaluator);

/// Evaluator backed by QualityModel over the DAG's metrics.
TopologyEvaluator quality_model_evaluator(QualityModel model = {}, WidthMode mode = WidthMode::Exact,
                                          double base = 0.9);

struct ConfusionMatrix {
    /// counts[router][oracle], indexed by topology_index().
    std::array<std::array<std::size_t, 4>, 4> counts{};

    void add(TopologyKind router, TopologyKind oracle);
    std::size_t total() const noexcept;
    std::size_t agreements() const noexcept;
    /// Diagonal share; 0 for an empty matrix.
    double accuracy() const noexcept;
    std::size_t row_sum(TopologyKind router) const noexcept;
    std::size_t column_sum(TopologyKind oracle) const noexcept;

    /// Router rows against oracle columns, followed by the accuracy line.
    std::string table() const;
    std::string csv() const;
    nlohmann::json to_json() const;
};

ConfusionMatrix confusion_matrix(std::span<const TaskDag> tasks, const RouterConfig& config,
                                 const TopologyEvaluator& evaluator);

}  // namespace orchard
