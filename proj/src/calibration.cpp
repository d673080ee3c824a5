#include "orchard/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace orchard {

namespace {

constexpr double kTieTolerance = 1e-12;

bool better_candidate(const CalibrationRow& challenger, const CalibrationRow& incumbent) {
    if (challenger.mean_quality > incumbent.mean_quality + kTieTolerance) return true;
    if (challenger.mean_quality < incumbent.mean_quality - kTieTolerance) return false;
    const bool challenger_default = std::abs(challenger.theta_gamma - kDefaultThetaGamma) < 1e-9;
    const bool incumbent_default = std::abs(incumbent.theta_gamma - kDefaultThetaGamma) < 1e-9;
    if (challenger_default != incumbent_default) return challenger_default;
    return challenger.theta_gamma > incumbent.theta_gamma;
}

}  // namespace

std::vector<double> default_gamma_grid() { return {0.3, 0.4, 0.5, 0.6, 0.7, 0.8}; }

CalibrationResult calibrate_gamma(std::span<const DevTask> dev_tasks, std::span<const double> grid,
                                  const RouterConfig& base) {
    if (dev_tasks.empty()) throw ParameterError("calibration needs at least one dev task");
    if (grid.empty()) throw ParameterError("calibration grid is empty");

    // Metrics do not depend on theta_gamma; compute them once per task.
    std::vector<DagMetrics> metrics;
    metrics.reserve(dev_tasks.size());
    for (const DevTask& task : dev_tasks) metrics.push_back(compute_metrics(task.dag, base.width_mode));

    CalibrationResult result{};
    for (double theta : grid) {
        RouterConfig config = base;
        config.theta_gamma = theta;
        config.validate();

        CalibrationRow row{theta, 0.0, {}};
        double total = 0.0;
        for (std::size_t i = 0; i < dev_tasks.size(); ++i) {
            const auto kind = select_topology(metrics[i], config).first;
            ++row.routed[topology_index(kind)];
            total += dev_tasks[i].scores[topology_index(kind)];
        }
        row.mean_quality = total / static_cast<double>(dev_tasks.size());
        result.table.push_back(row);
    }

    const CalibrationRow* best = &result.table.front();
    for (const CalibrationRow& row : result.table)
        if (better_candidate(row, *best)) best = &row;
    result.chosen_theta_gamma = best->theta_gamma;
    return result;
}

DevTestSplit split_dev_test(std::span<const std::string> ids, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction < 1.0))
        throw ParameterError("dev fraction must lie in (0, 1), got " + std::to_string(fraction));

    const std::size_t n = ids.size();
    const auto dev_count =
        std::min(n, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9)));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<bool> is_dev(n, false);
    for (std::size_t i = 0; i < dev_count; ++i) is_dev[order[i]] = true;

    DevTestSplit split;
    for (std::size_t i = 0; i < n; ++i) (is_dev[i] ? split.dev : split.test).push_back(ids[i]);
    return split;
}

}  // namespace orchard
