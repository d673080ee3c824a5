#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "orchard/archetype.hpp"
#include "orchard/convergence.hpp"

namespace orchard {

inline constexpr double kSimulatedTopScore = 0.9;  // S*
inline constexpr double kSimulatedUniformWeight = 1000.0;

struct SimConfig {
    ArchetypeKind archetype = ArchetypeKind::Diamond;
    std::size_t archetype_size = 6;
    std::size_t pool_size = 5;
    double epsilon = 0.05;
    std::size_t trials = 1000;
    std::uint64_t seed = 42;
    QualityModel quality;
    WidthMode width_mode = WidthMode::Exact;
    double lipschitz = 1.0;
    /// Uniform vertex weights, as the bound's derivation assumes. When false
    /// the weights are drawn and the summary flags the run as outside it.
    bool uniform_weights = true;

    void validate() const;
};

struct TrialResult {
    std::size_t trial = 0;
    std::uint64_t archetype_seed = 0;
    DagMetrics metrics;
    double var_m = 0.0;
    double var_tau = 0.0;
    double ratio = 0.0;
    double bound = 0.0;

    bool holds() const noexcept { return ratio >= bound; }
};

struct SimSummary {
    SimConfig config;
    std::vector<TrialResult> trials;
    double mean_var_m = 0.0;
    double mean_var_tau = 0.0;
    double mean_ratio = 0.0;      // mean of per-trial ratios
    double ratio_of_means = 0.0;  // mean_var_tau / mean_var_m
    double mean_bound = 0.0;      // mean of per-trial bounds
    std::size_t trials_holding = 0;

    bool all_trials_hold() const noexcept { return trials_holding == trials.size(); }
    /// mean_var_m <= (1 + tolerance) epsilon^2
    bool model_variance_within(double tolerance = 0.1) const noexcept;
};

/// Monte-Carlo estimate of model and topology variance. Trial t seeds its own
/// generator with seed + t; that generator yields the archetype seed and
/// then the pool's scores, S* - epsilon u with u ~ U[0, 1]. Var_M is the
/// sample variance of L_f times those scores; Var_tau is the sample variance
/// of the quality model's four topology scores for the trial's DAG.
SimSummary simulate_variance(const SimConfig& config);

/// One row per trial, fixed column order, deterministic formatting.
std::string simulation_csv(const SimSummary& summary);
nlohmann::json simulation_summary_json(const SimSummary& summary);

/// Unbiased sample variance; 0 for fewer than two values.
double sample_variance(const std::vector<double>& values);

/// Least-squares slope of log(y) against log(x).
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace orchard
