#pragma once

#include <cstddef>

#include <json.hpp>

#include "orchard/calibration.hpp"
#include "orchard/metrics.hpp"

namespace orchard {

struct ConvergenceParams {
    double epsilon = 0.05;
    double omega = 1.0;
    double gamma = 0.0;
    std::size_t k = 1;
    double c_tau = 0.5;
    double lipschitz = 1.0;

    /// Throws ParameterError when a field is outside its range. The epsilon
    /// check admits 0, which the ratio reports as divergence.
    void validate() const;
    /// Whether c_tau >= 1 / (4k).
    bool satisfies_c_tau_hypothesis() const noexcept;
};

struct RatioBound {
    bool diverges = false;  // epsilon = 0 with a non-zero numerator
    double value = 0.0;     // meaningful only when !diverges
};

/// (omega - 1)^2 (1 - gamma)^2 / (4 epsilon^2 k)
RatioBound variance_ratio_bound(const ConvergenceParams& p);

/// epsilon^2
double model_variance_bound(double epsilon);

/// c_tau (omega - 1) (1 - gamma)
double topology_quality_gap(const ConvergenceParams& p);

/// Topology quality model used by the simulator and the oracle. Sequential
/// scores `base`; the others move by the parallel/sequential gap
/// g = c_tau (omega - 1)(1 - gamma):
///   Parallel      base + g when gamma < 0.5, base - g otherwise, minus a
///                 context-loss penalty lambda (1 - r)
///   Hybrid        base + g (1 - depth / total weight)
///   Hierarchical  base + g / 2 - arbitration penalty
struct QualityModel {
    double c_tau = 0.5;
    double context_loss = 0.05;         // lambda
    double arbitration_penalty = 0.05;
    double sign_split_gamma = 0.5;

    TopologyScores qualities(const DagMetrics& metrics, double base) const;
    nlohmann::json describe() const;
};

}  // namespace orchard
