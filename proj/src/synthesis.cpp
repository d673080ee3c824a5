#include "orchard/synthesis.hpp"

#include <algorithm>
#include <cmath>

#include "orchard/engine.hpp"

namespace orchard {

namespace {

double sorted_mean(std::vector<double>& values) {
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

}  // namespace

double consistency_score(const std::vector<std::string>& outputs, const Embedder& embedder) {
    if (outputs.empty()) throw ParameterError("consistency score needs at least one output");
    if (outputs.size() == 1) return 1.0;
    std::vector<std::vector<double>> vectors;
    vectors.reserve(outputs.size());
    for (auto& o : outputs) vectors.push_back(embedder.embed(o));
    std::vector<double> sims;
    sims.reserve(outputs.size() * (outputs.size() - 1) / 2);
    for (std::size_t i = 0; i < vectors.size(); ++i)
        for (std::size_t j = i + 1; j < vectors.size(); ++j) sims.push_back(cosine_similarity(vectors[i], vectors[j]));
    return sorted_mean(sims);
}

double consistency_of_candidate(const std::string& candidate, const std::vector<std::string>& originals,
                                const Embedder& embedder) {
    if (originals.empty()) throw ParameterError("candidate consistency needs at least one original");
    const auto c = embedder.embed(candidate);
    std::vector<double> sims;
    sims.reserve(originals.size());
    for (auto& o : originals) sims.push_back(cosine_similarity(c, embedder.embed(o)));
    return sorted_mean(sims);
}

int synthesis_round_bound(double gamma0) {
    const double rounds = std::ceil((1.0 - gamma0) / kCouplingStep - 1e-9);
    return std::max(1, static_cast<int>(rounds));
}

nlohmann::json to_json(const SynthesisResult& result) {
    nlohmann::json trail = nlohmann::json::array();
    for (auto& step : result.route_trail) {
        nlohmann::json s = {{"gamma", step.gamma},
                            {"topology", to_string(step.topology)},
                            {"consistency", step.consistency}};
        if (step.candidate_consistency) s["candidate_consistency"] = *step.candidate_consistency;
        trail.push_back(std::move(s));
    }
    return {{"final_text", result.final_text},
            {"consistency", result.consistency},
            {"iterations", result.iterations},
            {"route_trail", std::move(trail)},
            {"escalated", result.escalated},
            {"converged", result.converged},
            {"agent_calls", result.agent_calls.size()}};
}

SynthesisFailed::SynthesisFailed(const std::string& message, SynthesisResult partial)
    : Error(message), partial_(std::move(partial)) {}

namespace {

std::string join_outputs(const std::vector<std::string>& outputs) {
    std::string joined;
    for (std::size_t i = 0; i < outputs.size(); ++i) {
        if (i) joined += "\n\n";
        joined += outputs[i];
    }
    return joined;
}

}  // namespace

SynthesisResult synthesize(const ExecutedRound& first, const SynthesisConfig& config, AgentBackend& merge_agent,
                           AgentBackend& arbiter_agent, const RerouteFn& reroute) {
    if (!(config.theta_cs >= 0.0 && config.theta_cs <= 1.0))
        throw ParameterError("consistency threshold must lie in [0, 1]");
    if (!(config.gamma0 >= 0.0 && config.gamma0 <= 1.0)) throw ParameterError("coupling must lie in [0, 1]");

    const int bound = synthesis_round_bound(config.gamma0);
    const Embedder& embedder = *config.embedder;
    SynthesisResult result;
    ExecutedRound round = first;
    double gamma = config.gamma0;

    auto call = [&](AgentBackend& agent, const char* key, const std::string& tmpl) {
        AgentRequest req{key, render_template(tmpl, {{"outputs", join_outputs(round.outputs)}}), "", config.timeout};
        try {
            auto out = invoke_with_retry(agent, req, *config.clock, config.max_retries, config.backoff);
            result.agent_calls.push_back(out);
            return out.text;
        } catch (const BackendFailure& f) {
            throw SynthesisFailed(std::string(key) + " agent failed: " + f.what(), result);
        }
    };

    for (int it = 1;; ++it) {
        result.iterations = it;
        RouteStep step{gamma, round.topology.kind, 1.0, std::nullopt};
        if (round.outputs.empty() && !round.reconciled) {
            result.route_trail.push_back(step);
            throw SynthesisFailed("round produced no outputs", result);
        }
        step.consistency = round.outputs.empty() ? 1.0 : consistency_score(round.outputs, embedder);
        result.escalated = false;
        result.converged = true;
        result.consistency = step.consistency;

        if (round.topology.kind == TopologyKind::Sequential) {
            result.route_trail.push_back(step);
            result.final_text = round.outputs.back();
            return result;
        }
        if (round.topology.kind == TopologyKind::Hierarchical && round.reconciled) {
            result.route_trail.push_back(step);
            result.final_text = *round.reconciled;
            return result;
        }
        if (step.consistency >= config.theta_cs) {
            result.route_trail.push_back(step);
            result.final_text = call(merge_agent, "@merge", config.templates.merge);
            return result;
        }

        result.route_trail.push_back(step);
        result.escalated = true;
        result.final_text = call(arbiter_agent, "@arbiter", config.templates.arbiter);
        const double candidate = consistency_of_candidate(result.final_text, round.outputs, embedder);
        result.route_trail.back().candidate_consistency = candidate;
        result.consistency = candidate;
        if (candidate >= config.theta_cs) return result;
        if (it >= bound) {
            result.converged = false;
            return result;
        }

        gamma = std::min(gamma + kCouplingStep, 1.0);
        try {
            round = reroute(gamma);
        } catch (const SynthesisFailed&) {
            throw;
        } catch (const std::exception& e) {
            throw SynthesisFailed(std::string("re-route failed: ") + e.what(), result);
        }
    }
}

}  // namespace orchard
