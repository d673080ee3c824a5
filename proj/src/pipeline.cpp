#include "orchard/pipeline.hpp"

#include "orchard/runlog.hpp"

namespace orchard {

PipelineFailed::PipelineFailed(Stage stage, const std::string& message, PipelineResult partial)
    : Error(std::string(to_string(stage)) + ": " + message), stage_(stage), partial_(std::move(partial)) {}

std::string_view to_string(PipelineFailed::Stage stage) noexcept {
    switch (stage) {
        case PipelineFailed::Stage::Route: return "route";
        case PipelineFailed::Stage::Execute: return "execute";
        case PipelineFailed::Stage::Synthesize: return "synthesize";
    }
    return "route";
}

namespace {

class Pipeline {
public:
    Pipeline(const TaskDag& dag, const PipelineAgents& agents, const PipelineOptions& options, const Pricing& pricing)
        : dag_(dag), agents_(agents), options_(options), pricing_(pricing) {
        if (agents.pool.empty()) throw ConfigError("agent pool is empty");
        lead_ = agents.lead ? agents.lead : agents.pool.front();
        merge_ = agents.merge ? agents.merge : agents.pool.front();
        arbiter_ = agents.arbiter ? agents.arbiter : agents.pool.front();
    }

    PipelineResult run() {
        Clock& clock = *options_.engine.clock;
        const auto start = clock.now();

        auto decision = guarded(PipelineFailed::Stage::Route, [&] { return route(dag_, options_.router); });
        const ExecutedRound first = execute_round(std::move(decision));

        SynthesisConfig sc;
        sc.theta_cs = options_.theta_cs;
        sc.gamma0 = result_.rounds.front().decision.metrics.coupling_density;
        sc.max_retries = options_.engine.max_retries;
        sc.backoff = options_.engine.backoff;
        sc.timeout = options_.engine.timeout;
        sc.clock = options_.engine.clock;
        sc.embedder = options_.engine.embedder;
        sc.templates = options_.engine.templates;

        auto reroute = [&](double gamma) {
            auto d = guarded(PipelineFailed::Stage::Route,
                             [&] { return route_with_coupling(dag_, options_.router, gamma); });
            return execute_round(std::move(d));
        };

        try {
            result_.synthesis = synthesize(first, sc, *merge_, *arbiter_, reroute);
        } catch (const SynthesisFailed& e) {
            record_synthesis(e.partial());
            finish(clock.now() - start);
            throw PipelineFailed(PipelineFailed::Stage::Synthesize, e.what(), result_);
        }
        record_synthesis(*result_.synthesis);
        finish(clock.now() - start, true);
        return result_;
    }

private:
    template <class F>
    auto guarded(PipelineFailed::Stage stage, F&& f) -> decltype(f()) {
        try {
            return f();
        } catch (const PipelineFailed&) {
            throw;
        } catch (const std::exception& e) {
            throw PipelineFailed(stage, e.what(), result_);
        }
    }

    ExecutedRound execute_round(RoutingDecision decision) {
        result_.log_records.push_back(routing_record(options_.task_id, decision));
        auto plan = guarded(PipelineFailed::Stage::Route, [&] {
            return make_plan(dag_, decision.topology, agents_.pool.size(), options_.context_budget);
        });
        ExecutionTrace trace;
        try {
            trace = execute(dag_, plan, agents_.pool, options_.engine, lead_.get());
        } catch (const ExecutionFailed& e) {
            result_.rounds.push_back({decision, plan, e.partial()});
            record_calls(e.partial(), plan);
            finish(e.partial().wall_clock);
            throw PipelineFailed(PipelineFailed::Stage::Execute, e.what(), result_);
        } catch (const std::exception& e) {
            result_.rounds.push_back({decision, plan, {}});
            finish({});
            throw PipelineFailed(PipelineFailed::Stage::Execute, e.what(), result_);
        }
        record_calls(trace, plan);
        ExecutedRound round;
        round.topology = decision.topology;
        for (auto& o : trace.ordered_outputs(plan)) round.outputs.push_back(o.text);
        if (trace.lead) round.reconciled = trace.lead->text;
        result_.rounds.push_back({std::move(decision), std::move(plan), std::move(trace)});
        return round;
    }

    void record_calls(const ExecutionTrace& trace, const ExecutionPlan& plan) {
        for (auto& o : trace.all_calls(plan)) result_.ledger.record(o, Phase::Execute);
    }

    void record_synthesis(const SynthesisResult& s) {
        for (auto& o : s.agent_calls) result_.ledger.record(o, Phase::Synthesize);
        result_.log_records.push_back(synthesis_record(options_.task_id, s));
    }

    /// Fills the report. A missing pricing row propagates only when `strict`;
    /// failure paths keep their original error.
    void finish(Clock::duration wall, bool strict = false) {
        const TopologyKind routed =
            result_.rounds.empty() ? TopologyKind::Parallel : result_.rounds.front().plan.topology.kind;
        const int iterations = result_.synthesis ? result_.synthesis->iterations : 0;
        try {
            result_.report = make_report(result_.ledger, pricing_, routed, iterations, wall);
        } catch (const ConfigError&) {
            if (strict) throw;
            result_.report = RunReport{};
            result_.report.topology = routed;
            result_.report.iterations = iterations;
            result_.report.wall_clock = wall;
        }
        result_.report.task_id = options_.task_id;
        result_.report.domain = options_.domain;
        if (result_.synthesis) {
            result_.report.converged = result_.synthesis->converged;
            result_.report.escalated = result_.synthesis->escalated;
        }
        result_.log_records.push_back(run_record(result_.report));
    }

    const TaskDag& dag_;
    const PipelineAgents& agents_;
    const PipelineOptions& options_;
    const Pricing& pricing_;
    std::shared_ptr<AgentBackend> lead_, merge_, arbiter_;
    PipelineResult result_;
};

}  // namespace

PipelineResult run_pipeline(const TaskDag& dag, const PipelineAgents& agents, const PipelineOptions& options,
                            const Pricing& pricing) {
    return Pipeline(dag, agents, options, pricing).run();
}

nlohmann::json trace_document(const PipelineResult& result, const std::string& task_id) {
    nlohmann::json rounds = nlohmann::json::array();
    for (auto& r : result.rounds) {
        auto decision = to_json(r.decision);
        decision.erase("elapsed_us");
        rounds.push_back({{"routing", decision}, {"execution", to_json(r.trace, r.plan)}});
    }
    nlohmann::json doc = {{"task_id", task_id}, {"rounds", rounds}};
    doc["synthesis"] = result.synthesis ? to_json(*result.synthesis) : nlohmann::json(nullptr);
    return doc;
}

}  // namespace orchard
