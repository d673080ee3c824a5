#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "orchard/accounting.hpp"
#include "orchard/engine.hpp"
#include "orchard/router.hpp"
#include "orchard/synthesis.hpp"

namespace orchard {

struct PipelineAgents {
    BackendPool pool;
    std::shared_ptr<AgentBackend> lead;     // defaults to pool[0]
    std::shared_ptr<AgentBackend> merge;    // defaults to pool[0]
    std::shared_ptr<AgentBackend> arbiter;  // defaults to pool[0]
};

struct PipelineOptions {
    std::string task_id = "task";
    std::string domain;
    RouterConfig router;
    EngineOptions engine;  // clock, embedder and templates are shared with synthesis
    std::size_t context_budget = kDefaultContextBudget;
    double theta_cs = kDefaultThetaCs;
};

/// One execution attempt: the routing that produced it and what ran.
struct PipelineRound {
    RoutingDecision decision;
    ExecutionPlan plan;
    ExecutionTrace trace;
};

struct PipelineResult {
    std::vector<PipelineRound> rounds;
    std::optional<SynthesisResult> synthesis;
    CostLedger ledger;
    RunReport report;
    std::vector<nlohmann::json> log_records;
};

/// A pipeline stage failed; carries everything produced before the failure.
class PipelineFailed : public Error {
public:
    enum class Stage { Route, Execute, Synthesize };
    PipelineFailed(Stage stage, const std::string& message, PipelineResult partial);
    Stage stage() const noexcept { return stage_; }
    const PipelineResult& partial() const noexcept { return partial_; }

private:
    Stage stage_;
    PipelineResult partial_;
};

std::string_view to_string(PipelineFailed::Stage stage) noexcept;

/// route -> execute -> synthesize, re-routing with raised coupling when
/// synthesis asks for it. Every agent call lands in the ledger in schedule
/// order, so mock and scripted runs give identical artifacts.
PipelineResult run_pipeline(const TaskDag& dag, const PipelineAgents& agents, const PipelineOptions& options,
                            const Pricing& pricing);

/// Trace artifact: every round's routing (without timing noise), plan and
/// trace, plus the synthesis result.
nlohmann::json trace_document(const PipelineResult& result, const std::string& task_id);

}  // namespace orchard
