#include "orchard/simulator.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include "orchard/error.hpp"

namespace orchard {

void SimConfig::validate() const {
    if (archetype_size < 1) throw ParameterError("archetype size must be at least 1");
    if (archetype == ArchetypeKind::Diamond && archetype_size < 3)
        throw ParameterError("diamond archetype needs at least 3 vertices");
    if (pool_size < 2) throw ParameterError("pool size must be at least 2");
    if (!(epsilon > 0.0 && epsilon <= 1.0)) throw ParameterError("epsilon must lie in (0, 1]");
    if (trials < 1) throw ParameterError("trials must be at least 1");
    if (!(lipschitz > 0.0)) throw ParameterError("lipschitz constant must be positive");
    if (!(quality.c_tau > 0.0)) throw ParameterError("c_tau must be positive");
}

bool SimSummary::model_variance_within(double tolerance) const noexcept {
    return mean_var_m <= (1.0 + tolerance) * config.epsilon * config.epsilon;
}

double sample_variance(const std::vector<double>& values) {
    if (values.size() < 2) return 0.0;
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return ss / static_cast<double>(values.size() - 1);
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw ParameterError("slope needs two or more paired points");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0 && y[i] > 0.0)) throw ParameterError("log-log slope needs positive values");
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw ParameterError("slope undefined for identical x values");
    return (n * sxy - sx * sy) / denom;
}

SimSummary simulate_variance(const SimConfig& config) {
    config.validate();
    SimSummary summary;
    summary.config = config;
    summary.trials.reserve(config.trials);

    for (std::size_t t = 0; t < config.trials; ++t) {
        std::mt19937_64 rng(config.seed + t);
        TrialResult trial;
        trial.trial = t;
        trial.archetype_seed = rng();

        DagArchetype spec{config.archetype, config.archetype_size, trial.archetype_seed, std::nullopt};
        if (config.uniform_weights) spec.uniform_weight = kSimulatedUniformWeight;
        const TaskDag dag = generate_archetype(spec);
        trial.metrics = compute_metrics(dag, config.width_mode);

        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::vector<double> pool(config.pool_size);
        for (auto& s : pool) s = config.lipschitz * (kSimulatedTopScore - config.epsilon * unit(rng));
        trial.var_m = sample_variance(pool);

        const auto q = config.quality.qualities(trial.metrics, kSimulatedTopScore);
        trial.var_tau = sample_variance({q.begin(), q.end()});
        trial.ratio = trial.var_m > 0.0 ? trial.var_tau / trial.var_m : INFINITY;

        ConvergenceParams p;
        p.epsilon = config.epsilon;
        p.omega = static_cast<double>(trial.metrics.width());
        p.gamma = trial.metrics.coupling_density;
        p.k = trial.metrics.vertex_count;
        p.c_tau = config.quality.c_tau;
        p.lipschitz = config.lipschitz;
        trial.bound = variance_ratio_bound(p).value;

        summary.mean_var_m += trial.var_m;
        summary.mean_var_tau += trial.var_tau;
        summary.mean_ratio += trial.ratio;
        summary.mean_bound += trial.bound;
        if (trial.holds()) ++summary.trials_holding;
        summary.trials.push_back(trial);
    }
    const double n = static_cast<double>(config.trials);
    summary.mean_var_m /= n;
    summary.mean_var_tau /= n;
    summary.mean_ratio /= n;
    summary.mean_bound /= n;
    summary.ratio_of_means = summary.mean_var_tau / summary.mean_var_m;
    return summary;
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace

std::string simulation_csv(const SimSummary& summary) {
    std::string out =
        "trial,archetype_seed,vertices,edges,omega,gamma,depth,total_weight,var_m,var_tau,ratio,bound,holds\n";
    for (const auto& t : summary.trials) {
        out += std::to_string(t.trial) + "," + std::to_string(t.archetype_seed) + "," +
               std::to_string(t.metrics.vertex_count) + "," + std::to_string(t.metrics.edge_count) + "," +
               std::to_string(t.metrics.width()) + "," + fmt(t.metrics.coupling_density) + "," +
               fmt(t.metrics.depth) + "," + fmt(t.metrics.total_weight) + "," + fmt(t.var_m) + "," +
               fmt(t.var_tau) + "," + fmt(t.ratio) + "," + fmt(t.bound) + "," + (t.holds() ? "1" : "0") + "\n";
    }
    return out;
}

nlohmann::json simulation_summary_json(const SimSummary& s) {
    const auto& c = s.config;
    return {{"archetype", to_string(c.archetype)},
            {"archetype_size", c.archetype_size},
            {"pool_size", c.pool_size},
            {"epsilon", c.epsilon},
            {"trials", c.trials},
            {"seed", c.seed},
            {"width_mode", to_string(c.width_mode)},
            {"top_score", kSimulatedTopScore},
            {"lipschitz", c.lipschitz},
            {"uniform_weights", c.uniform_weights},
            {"within_uniform_weight_hypothesis", c.uniform_weights},
            {"quality_model", c.quality.describe()},
            {"mean_var_m", s.mean_var_m},
            {"mean_var_tau", s.mean_var_tau},
            {"mean_ratio", s.mean_ratio},
            {"ratio_of_means", s.ratio_of_means},
            {"mean_bound", s.mean_bound},
            {"model_variance_bound", model_variance_bound(c.epsilon)},
            {"model_variance_within", s.model_variance_within()},
            {"trials_holding", s.trials_holding},
            {"all_trials_hold", s.all_trials_hold()},
            {"ratio_exceeds_bound", s.ratio_of_means >= s.mean_bound}};
}

}  // namespace orchard
