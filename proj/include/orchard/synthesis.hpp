#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "orchard/backend.hpp"
#include "orchard/clock.hpp"
#include "orchard/embedder.hpp"
#include "orchard/error.hpp"
#include "orchard/router.hpp"
#include "orchard/templates.hpp"

namespace orchard {

inline constexpr double kDefaultThetaCs = 0.8;
inline constexpr double kCouplingStep = 0.2;

/// Mean pairwise cosine over all unordered pairs; a single output scores 1.
/// Pair similarities are summed in sorted order, so the score does not
/// depend on input order. Throws ParameterError on an empty list.
double consistency_score(const std::vector<std::string>& outputs, const Embedder& embedder);

/// Mean cosine between the candidate and each original.
double consistency_of_candidate(const std::string& candidate, const std::vector<std::string>& originals,
                                const Embedder& embedder);

/// Rounds allowed for a starting coupling gamma0: ceil((1 - gamma0) / 0.2),
/// never less than one.
int synthesis_round_bound(double gamma0);

/// One executed attempt handed to synthesis.
struct ExecutedRound {
    Topology topology;
    std::vector<std::string> outputs;       // schedule order
    std::optional<std::string> reconciled;  // lead output under Hierarchical
};

struct RouteStep {
    double gamma = 0.0;
    TopologyKind topology = TopologyKind::Parallel;
    double consistency = 1.0;                  // CS of the round's outputs
    std::optional<double> candidate_consistency;  // arbiter output vs originals
};

struct SynthesisResult {
    std::string final_text;
    double consistency = 1.0;  // CS of the final round's outputs, or the candidate's when arbitrated
    int iterations = 0;
    std::vector<RouteStep> route_trail;
    bool escalated = false;  // arbiter path taken in the final round
    bool converged = true;   // false when the round bound ran out
    std::vector<AgentOutput> agent_calls;  // merge and arbiter calls, in order
};

nlohmann::json to_json(const SynthesisResult& result);

struct SynthesisConfig {
    double theta_cs = kDefaultThetaCs;
    double gamma0 = 0.0;
    int max_retries = 2;
    std::chrono::milliseconds backoff{100};
    std::optional<std::chrono::milliseconds> timeout;
    std::shared_ptr<Clock> clock = std::make_shared<SteadyClock>();
    std::shared_ptr<const Embedder> embedder = std::make_shared<HashedBagEmbedder>();
    PromptTemplates templates = PromptTemplates::defaults();
};

/// Re-executes the task with the coupling raised to `gamma`.
using RerouteFn = std::function<ExecutedRound(double gamma)>;

class SynthesisFailed : public Error {
public:
    SynthesisFailed(const std::string& message, SynthesisResult partial);
    const SynthesisResult& partial() const noexcept { return partial_; }

private:
    SynthesisResult partial_;
};

/// Adaptive synthesis. Each round:
///   Sequential    the last output is final
///   Hierarchical  the lead's reconciled output is final
///   CS >= theta   one merge call
///   otherwise     one arbiter call; if its output still scores below theta
///                 against the originals, re-route with gamma + 0.2 (capped
///                 at 1) and go again, up to synthesis_round_bound rounds.
SynthesisResult synthesize(const ExecutedRound& first, const SynthesisConfig& config, AgentBackend& merge_agent,
                           AgentBackend& arbiter_agent, const RerouteFn& reroute);

}  // namespace orchard
