#include "orchard/convergence.hpp"

#include <cmath>

#include "orchard/error.hpp"
#include "orchard/router.hpp"

namespace orchard {

void ConvergenceParams::validate() const {
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ParameterError("epsilon must lie in [0, 1]");
    if (!(omega >= 1.0) || !std::isfinite(omega)) throw ParameterError("omega must be at least 1");
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw ParameterError("gamma must lie in [0, 1]");
    if (k < 1) throw ParameterError("k must be at least 1");
    if (!(c_tau > 0.0)) throw ParameterError("c_tau must be positive");
    if (!(lipschitz > 0.0)) throw ParameterError("lipschitz constant must be positive");
}

bool ConvergenceParams::satisfies_c_tau_hypothesis() const noexcept {
    return c_tau >= 1.0 / (4.0 * static_cast<double>(k));
}

RatioBound variance_ratio_bound(const ConvergenceParams& p) {
    p.validate();
    const double numerator = (p.omega - 1.0) * (p.omega - 1.0) * (1.0 - p.gamma) * (1.0 - p.gamma);
    if (numerator == 0.0) return {false, 0.0};
    if (p.epsilon == 0.0) return {true, 0.0};
    return {false, numerator / (4.0 * p.epsilon * p.epsilon * static_cast<double>(p.k))};
}

double model_variance_bound(double epsilon) {
    if (!(epsilon >= 0.0)) throw ParameterError("epsilon must be non-negative");
    return epsilon * epsilon;
}

double topology_quality_gap(const ConvergenceParams& p) {
    p.validate();
    return p.c_tau * (p.omega - 1.0) * (1.0 - p.gamma);
}

TopologyScores QualityModel::qualities(const DagMetrics& m, double base) const {
    const double omega = static_cast<double>(m.width());
    const double gap = c_tau * (omega - 1.0) * (1.0 - m.coupling_density);
    const double sign = m.coupling_density < sign_split_gamma ? 1.0 : -1.0;
    const double span = m.total_weight > 0.0 ? m.depth / m.total_weight : 1.0;

    TopologyScores q{};
    q[topology_index(TopologyKind::Parallel)] = base + sign * gap - context_loss * (1.0 - m.parallelism_ratio);
    q[topology_index(TopologyKind::Sequential)] = base;
    q[topology_index(TopologyKind::Hierarchical)] = base + 0.5 * gap - arbitration_penalty;
    q[topology_index(TopologyKind::Hybrid)] = base + gap * (1.0 - span);
    return q;
}

nlohmann::json QualityModel::describe() const {
    return {{"model", "linear-gap"},
            {"c_tau", c_tau},
            {"gap", "c_tau * (omega - 1) * (1 - gamma)"},
            {"sequential", "base"},
            {"parallel", "base + gap if gamma < split else base - gap; minus context_loss * (1 - r)"},
            {"hybrid", "base + gap * (1 - depth / total_weight)"},
            {"hierarchical", "base + gap / 2 - arbitration_penalty"},
            {"sign_split_gamma", sign_split_gamma},
            {"context_loss", context_loss},
            {"arbitration_penalty", arbitration_penalty}};
}

}  // namespace orchard
