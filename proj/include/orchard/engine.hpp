#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "orchard/backend.hpp"
#include "orchard/clock.hpp"
#include "orchard/dag.hpp"
#include "orchard/embedder.hpp"
#include "orchard/router.hpp"
#include "orchard/templates.hpp"

namespace orchard {

using BackendPool = std::vector<std::shared_ptr<AgentBackend>>;

inline constexpr std::size_t kDefaultMaxWorkers = 8;
inline constexpr std::size_t kDefaultContextBudget = 8192;

struct ExecutionPlan {
    Topology topology;
    std::map<std::string, std::size_t> assignments;  // subtask id -> pool index
    std::vector<std::vector<std::string>> groups;    // run in order, members concurrently
    std::size_t context_budget = kDefaultContextBudget;
};

/// Round-robin assignment: vertices sorted by (layer, id) take pool[i % |pool|].
std::map<std::string, std::size_t> assign_agents(const TaskDag& dag, std::size_t pool_size);

/// Vertex ids sorted by (layer, id).
std::vector<std::string> layer_then_id_order(const TaskDag& dag);

/// Schedule for a topology:
///   Parallel      one group with every vertex
///   Sequential    one vertex per group, (layer, id) order
///   Hierarchical  topological layers
///   Hybrid        the topology's stages
ExecutionPlan make_plan(const TaskDag& dag, const Topology& topology, std::size_t pool_size,
                        std::size_t context_budget = kDefaultContextBudget);

/// Throws ConfigError when a vertex is unassigned or scheduled twice, or when
/// a non-Parallel schedule runs a vertex no later than a predecessor.
void validate_plan(const TaskDag& dag, const ExecutionPlan& plan, std::size_t pool_size);

struct MergedContext {
    std::string text;
    std::vector<std::string> included;  // subtask ids, rank order
    std::uint64_t tokens = 0;
    bool approximate = false;  // some token count fell back to a word count
};

/// Ranks `outputs` by relevance to the target description and includes
/// them whole, in rank order, until the next would overflow `budget`.
/// Sizes are the reported completion tokens.
MergedContext merge_context(const std::vector<const AgentOutput*>& outputs, const Subtask& target,
                            std::size_t budget, const RelevanceFn& relevance);

struct InvocationRecord {
    Clock::duration start{0};
    Clock::duration end{0};
    int attempts = 0;
    std::size_t group = 0;
    std::string context;
    std::optional<std::string> error;
};

struct ExecutionTrace {
    TopologyKind topology = TopologyKind::Parallel;
    std::map<std::string, AgentOutput> outputs;
    std::map<std::string, InvocationRecord> invocations;
    std::optional<AgentOutput> lead_assign;
    std::optional<AgentOutput> lead;  // reconciled output (Hierarchical)
    Clock::duration wall_clock{0};
    std::vector<Clock::duration> group_timings;
    std::vector<std::string> failed;
    std::vector<std::pair<std::string, std::string>> edge_violations;

    /// Outputs in schedule order: group by group, plan order within a group.
    std::vector<AgentOutput> ordered_outputs(const ExecutionPlan& plan) const;
    /// Every agent call, sub-agents in schedule order then lead calls.
    std::vector<AgentOutput> all_calls(const ExecutionPlan& plan) const;
};

nlohmann::json to_json(const ExecutionTrace& trace, const ExecutionPlan& plan);

/// A run that lost subtasks after retries. Carries whatever completed.
class ExecutionFailed : public Error {
public:
    ExecutionFailed(ExecutionTrace partial, std::string message);
    const ExecutionTrace& partial() const noexcept { return partial_; }
    const std::vector<std::string>& failed() const noexcept { return partial_.failed; }

private:
    ExecutionTrace partial_;
};

struct EngineOptions {
    std::size_t max_workers = kDefaultMaxWorkers;
    int max_retries = 2;
    std::chrono::milliseconds backoff{100};  // doubles per retry
    std::optional<std::chrono::milliseconds> timeout;
    std::string task_text;
    std::shared_ptr<Clock> clock = std::make_shared<SteadyClock>();
    std::shared_ptr<const Embedder> embedder = std::make_shared<HashedBagEmbedder>();
    PromptTemplates templates = PromptTemplates::defaults();
};

/// Calls backend.invoke, retrying retryable failures up to `max_retries`
/// times with backoff doubling from `backoff`, sleeping on `clock`. Rethrows
/// the last failure. `attempts`, when given, receives the number of calls.
AgentOutput invoke_with_retry(AgentBackend& backend, const AgentRequest& request, Clock& clock, int max_retries,
                              std::chrono::milliseconds backoff, int* attempts = nullptr);

/// Text every agent sees: the task plus a one-line plan summary.
std::string global_context(const std::string& task_text, const ExecutionPlan& plan, std::size_t vertex_count);

/// Every vertex at once with only the global context.
ExecutionTrace exec_parallel(const TaskDag& dag, const ExecutionPlan& plan, const BackendPool& pool,
                             const EngineOptions& options);

/// One vertex at a time; each gets its direct predecessors' outputs.
ExecutionTrace exec_sequential(const TaskDag& dag, const ExecutionPlan& plan, const BackendPool& pool,
                               const EngineOptions& options);

/// Lead assigns, sub-agents run layer by layer, lead reconciles. Lead
/// failure throws; sub-agent failures reach the lead as notices.
ExecutionTrace exec_hierarchical(const TaskDag& dag, const ExecutionPlan& plan, const BackendPool& pool,
                                 AgentBackend& lead, const EngineOptions& options);

/// Stage by stage; each vertex gets outputs of every earlier stage.
ExecutionTrace exec_hybrid(const TaskDag& dag, const ExecutionPlan& plan, const BackendPool& pool,
                           const EngineOptions& options);

/// Dispatches on plan.topology.kind. The lead defaults to pool[0].
ExecutionTrace execute(const TaskDag& dag, const ExecutionPlan& plan, const BackendPool& pool,
                       const EngineOptions& options, AgentBackend* lead = nullptr);

}  // namespace orchard
