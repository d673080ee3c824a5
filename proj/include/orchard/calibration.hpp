#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "orchard/router.hpp"

namespace orchard {

/// Quality of each topology on one dev task, indexed by topology_index().
using TopologyScores = std::array<double, 4>;

struct DevTask {
    TaskDag dag;
    TopologyScores scores;
};

struct CalibrationRow {
    double theta_gamma;
    double mean_quality;
    std::array<std::size_t, 4> routed;  // how many dev tasks went to each topology
};

struct CalibrationResult {
    double chosen_theta_gamma;
    std::vector<CalibrationRow> table;  // one row per grid value, grid order
};

inline constexpr double kDefaultThetaGamma = 0.6;

/// Grid search for theta_gamma. For each candidate, routes every dev task with
/// `base` (theta_gamma replaced) and averages the quality of the routed
/// topology. Ties go to 0.6 first, then to the larger candidate.
CalibrationResult calibrate_gamma(std::span<const DevTask> dev_tasks, std::span<const double> grid,
                                  const RouterConfig& base = {});

/// The default grid {0.3, 0.4, ..., 0.8}.
std::vector<double> default_gamma_grid();

struct DevTestSplit {
    std::vector<std::string> dev;
    std::vector<std::string> test;
};

/// Seeded sample of ceil(fraction * n) ids as dev; the rest, in input order, as test.
DevTestSplit split_dev_test(std::span<const std::string> ids, double fraction, std::uint64_t seed);

}  // namespace orchard
