#include "orchard/engine.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <set>
#include <sstream>
#include <thread>

#include "orchard/error.hpp"
#include "orchard/metrics.hpp"

namespace orchard {

std::vector<std::string> layer_then_id_order(const TaskDag& dag) {
    const auto layers = layer_of(dag);
    std::vector<std::size_t> order(dag.size());
    for (std::size_t v = 0; v < order.size(); ++v) order[v] = v;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (layers[a] != layers[b]) return layers[a] < layers[b];
        return dag.subtask(a).id < dag.subtask(b).id;
    });
    std::vector<std::string> ids;
    ids.reserve(order.size());
    for (auto v : order) ids.push_back(dag.subtask(v).id);
    return ids;
}

std::map<std::string, std::size_t> assign_agents(const TaskDag& dag, std::size_t pool_size) {
    if (pool_size == 0) throw ConfigError("agent pool is empty");
    std::map<std::string, std::size_t> out;
    std::size_t i = 0;
    for (auto& id : layer_then_id_order(dag)) out[id] = i++ % pool_size;
    return out;
}

ExecutionPlan make_plan(const TaskDag& dag, const Topology& topology, std::size_t pool_size,
                        std::size_t context_budget) {
    ExecutionPlan plan;
    plan.topology = topology;
    plan.assignments = assign_agents(dag, pool_size);
    plan.context_budget = context_budget;
    switch (topology.kind) {
        case TopologyKind::Parallel:
            plan.groups.push_back(layer_then_id_order(dag));
            break;
        case TopologyKind::Sequential:
            for (auto& id : layer_then_id_order(dag)) plan.groups.push_back({id});
            break;
        case TopologyKind::Hierarchical:
            plan.groups = topological_layer_ids(dag);
            break;
        case TopologyKind::Hybrid:
            plan.groups = topology.stages.empty() ? topological_layer_ids(dag) : topology.stages;
            break;
    }
    validate_plan(dag, plan, pool_size);
    return plan;
}

void validate_plan(const TaskDag& dag, const ExecutionPlan& plan, std::size_t pool_size) {
    std::vector<std::optional<std::size_t>> group_of(dag.size());
    for (std::size_t g = 0; g < plan.groups.size(); ++g) {
        for (auto& id : plan.groups[g]) {
            auto v = dag.index_of(id);
            if (!v) throw ConfigError("plan schedules unknown subtask '" + id + "'");
            if (group_of[*v]) throw ConfigError("plan schedules '" + id + "' twice");
            group_of[*v] = g;
        }
    }
    for (std::size_t v = 0; v < dag.size(); ++v) {
        const auto& id = dag.subtask(v).id;
        if (!group_of[v]) throw ConfigError("plan never schedules '" + id + "'");
        auto a = plan.assignments.find(id);
        if (a == plan.assignments.end()) throw ConfigError("no agent assigned to '" + id + "'");
        if (a->second >= pool_size) throw ConfigError("agent index out of range for '" + id + "'");
    }
    if (plan.topology.kind == TopologyKind::Parallel) return;
    for (const auto& e : dag.edges()) {
        if (*group_of[e.from] >= *group_of[e.to])
            throw ConfigError("plan runs '" + dag.subtask(e.to).id + "' before its dependency '" +
                              dag.subtask(e.from).id + "' finishes");
    }
}

MergedContext merge_context(const std::vector<const AgentOutput*>& outputs, const Subtask& target,
                            std::size_t budget, const RelevanceFn& relevance) {
    struct Ranked {
        const AgentOutput* output;
        double score;
    };
    std::vector<Ranked> ranked;
    ranked.reserve(outputs.size());
    for (auto* o : outputs) ranked.push_back({o, relevance(o->text, target.description)});
    std::stable_sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.output->subtask_id < b.output->subtask_id;
    });

    MergedContext merged;
    for (const auto& r : ranked) {
        std::uint64_t size = r.output->completion_tokens;
        if (size == 0) {
            size = approximate_tokens(r.output->text);
            if (size > 0) merged.approximate = true;
        }
        if (merged.tokens + size > budget) break;
        merged.tokens += size;
        if (!merged.text.empty()) merged.text += "\n\n";
        merged.text += "### " + r.output->subtask_id + "\n" + r.output->text;
        merged.included.push_back(r.output->subtask_id);
    }
    return merged;
}

std::vector<AgentOutput> ExecutionTrace::ordered_outputs(const ExecutionPlan& plan) const {
    std::vector<AgentOutput> out;
    for (auto& group : plan.groups)
        for (auto& id : group)
            if (auto it = outputs.find(id); it != outputs.end()) out.push_back(it->second);
    return out;
}

std::vector<AgentOutput> ExecutionTrace::all_calls(const ExecutionPlan& plan) const {
    auto out = ordered_outputs(plan);
    if (lead_assign) out.push_back(*lead_assign);
    if (lead) out.push_back(*lead);
    return out;
}

namespace {

double to_ms(Clock::duration d) { return std::chrono::duration<double, std::milli>(d).count(); }

}  // namespace

nlohmann::json to_json(const ExecutionTrace& trace, const ExecutionPlan& plan) {
    nlohmann::json j;
    j["topology"] = to_string(trace.topology);
    j["wall_clock_ms"] = to_ms(trace.wall_clock);
    j["groups"] = plan.groups;
    auto& timings = j["group_timings_ms"] = nlohmann::json::array();
    for (auto t : trace.group_timings) timings.push_back(to_ms(t));
    auto& inv = j["invocations"] = nlohmann::json::array();
    for (auto& group : plan.groups) {
        for (auto& id : group) {
            auto it = trace.invocations.find(id);
            if (it == trace.invocations.end()) continue;
            const auto& rec = it->second;
            nlohmann::json row = {{"subtask", id},
                                  {"agent", plan.assignments.at(id)},
                                  {"group", rec.group},
                                  {"start_ms", to_ms(rec.start)},
                                  {"end_ms", to_ms(rec.end)},
                                  {"attempts", rec.attempts}};
            if (auto o = trace.outputs.find(id); o != trace.outputs.end()) row["output"] = to_json(o->second);
            if (rec.error) row["error"] = *rec.error;
            inv.push_back(std::move(row));
        }
    }
    if (trace.lead_assign) j["lead_assign"] = to_json(*trace.lead_assign);
    if (trace.lead) j["lead"] = to_json(*trace.lead);
    j["failed"] = trace.failed;
    auto& viol = j["edge_violations"] = nlohmann::json::array();
    for (auto& [from, to] : trace.edge_violations) viol.push_back({{"from", from}, {"to", to}});
    return j;
}

ExecutionFailed::ExecutionFailed(ExecutionTrace partial, std::string message)
    : Error(std::move(message)), partial_(std::move(partial)) {}

std::string global_context(const std::string& task_text, const ExecutionPlan& plan, std::size_t vertex_count) {
    std::ostringstream out;
    if (!task_text.empty()) out << "Task: " << task_text << "\n";
    out << "Plan: " << to_string(plan.topology.kind) << " execution of " << vertex_count << " subtasks in "
        << plan.groups.size() << (plan.groups.size() == 1 ? " group." : " groups.");
    return out.str();
}

AgentOutput invoke_with_retry(AgentBackend& backend, const AgentRequest& request, Clock& clock, int max_retries,
                              std::chrono::milliseconds backoff, int* attempts) {
    for (int attempt = 0;; ++attempt) {
        if (attempts) *attempts = attempt + 1;
        try {
            return backend.invoke(request, clock);
        } catch (const BackendFailure& f) {
            if (!f.retryable() || attempt >= max_retries) throw;
            clock.sleep_for(backoff * (1 << attempt));
        }
    }
}

namespace {

/// Runs jobs on at most `limit` threads pulling from a shared cursor.
void run_bounded(const std::vector<std::function<void()>>& jobs, std::size_t limit, Clock& clock) {
    const std::size_t workers = std::min(std::max<std::size_t>(limit, 1), jobs.size());
    if (workers == 0) return;
    std::atomic<std::size_t> next{0};
    clock.enlist(workers);
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        threads.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= jobs.size()) break;
                jobs[i]();
            }
            clock.retire();
        });
    }
}

class Run {
public:
    Run(const TaskDag& dag, const ExecutionPlan& plan, const BackendPool& pool, const EngineOptions& options)
        : dag_(dag), plan_(plan), pool_(pool), options_(options), clock_(*options.clock),
          relevance_(embedding_relevance(*options.embedder)) {
        if (pool.empty()) throw ConfigError("agent pool is empty");
        for (auto& b : pool)
            if (!b) throw ConfigError("agent pool holds a null backend");
        validate_plan(dag, plan, pool.size());
        trace_.topology = plan.topology.kind;
        global_ = global_context(options.task_text, plan, dag.size());
        start_ = clock_.now();
    }

    enum class Scope { None, DirectPredecessors, EarlierGroups };

    /// Runs one group; returns false when some member failed after retries.
    bool run_group(std::size_t g, Scope scope) {
        const auto& group = plan_.groups[g];
        const auto group_start = clock_.now();
        std::vector<std::string> contexts(group.size());
        for (std::size_t i = 0; i < group.size(); ++i) contexts[i] = context_for(group[i], g, scope);

        std::vector<std::optional<AgentOutput>> results(group.size());
        std::vector<InvocationRecord> records(group.size());
        std::vector<std::function<void()>> jobs;
        for (std::size_t i = 0; i < group.size(); ++i) {
            jobs.emplace_back([&, i] {
                const auto& st = dag_.subtask(dag_.require_index(group[i]));
                AgentRequest req{st.id, st.description, contexts[i], options_.timeout};
                auto& backend = *pool_[plan_.assignments.at(st.id)];
                records[i].group = g;
                records[i].context = contexts[i];
                results[i] = invoke(backend, req, records[i]);
            });
        }
        run_bounded(jobs, options_.max_workers, clock_);

        bool ok = true;
        for (std::size_t i = 0; i < group.size(); ++i) {
            if (results[i]) {
                trace_.outputs[group[i]] = std::move(*results[i]);
            } else {
                trace_.failed.push_back(group[i]);
                ok = false;
            }
            trace_.invocations[group[i]] = std::move(records[i]);
        }
        trace_.group_timings.push_back(clock_.now() - group_start);
        return ok;
    }

    /// Single call outside the worker pool (lead agent). Throws on failure.
    AgentOutput call_direct(AgentBackend& backend, const AgentRequest& req) {
        InvocationRecord rec;
        rec.context = req.context;
        clock_.enlist(1);
        auto out = invoke(backend, req, rec);
        clock_.retire();
        if (!out) {
            trace_.failed.push_back(req.subtask_id);
            throw ExecutionFailed(finish(), "lead agent call " + req.subtask_id + " failed: " + *rec.error);
        }
        return *out;
    }

    ExecutionTrace finish() {
        trace_.wall_clock = clock_.now() - start_;
        audit();
        return trace_;
    }

    [[noreturn]] void fail() {
        std::string ids;
        for (auto& id : trace_.failed) ids += (ids.empty() ? "" : ", ") + id;
        throw ExecutionFailed(finish(), "subtasks failed after retries: " + ids);
    }

    ExecutionTrace& trace() { return trace_; }
    const std::string& global() const { return global_; }

private:
    std::optional<AgentOutput> invoke(AgentBackend& backend, const AgentRequest& req, InvocationRecord& rec) {
        rec.start = clock_.now();
        try {
            auto out = invoke_with_retry(backend, req, clock_, options_.max_retries, options_.backoff, &rec.attempts);
            rec.end = clock_.now();
            return out;
        } catch (const BackendFailure& f) {
            rec.error = std::string(to_string(f.kind())) + ": " + f.what();
        } catch (const std::exception& e) {
            rec.error = std::string("error: ") + e.what();
        }
        rec.end = clock_.now();
        return std::nullopt;
    }

    std::string context_for(const std::string& id, std::size_t g, Scope scope) {
        const auto v = dag_.require_index(id);
        std::vector<const AgentOutput*> inputs;
        if (scope == Scope::DirectPredecessors) {
            for (auto p : dag_.predecessors(v))
                if (auto it = trace_.outputs.find(dag_.subtask(p).id); it != trace_.outputs.end())
                    inputs.push_back(&it->second);
        } else if (scope == Scope::EarlierGroups) {
            for (std::size_t h = 0; h < g; ++h)
                for (auto& other : plan_.groups[h])
                    if (auto it = trace_.outputs.find(other); it != trace_.outputs.end())
                        inputs.push_back(&it->second);
        }
        if (inputs.empty()) return global_;
        const auto& backend = *pool_[plan_.assignments.at(id)];
        const auto budget = std::min(plan_.context_budget, backend.max_context_tokens());
        auto merged = merge_context(inputs, dag_.subtask(v), budget, relevance_);
        if (merged.text.empty()) return global_;
        return global_ + "\n\n" + merged.text;
    }

    void audit() {
        trace_.edge_violations.clear();
        for (const auto& e : dag_.edges()) {
            const auto& from = dag_.subtask(e.from).id;
            const auto& to = dag_.subtask(e.to).id;
            auto a = trace_.invocations.find(from);
            auto b = trace_.invocations.find(to);
            if (a == trace_.invocations.end() || b == trace_.invocations.end()) continue;
            if (a->second.end > b->second.start) trace_.edge_violations.emplace_back(from, to);
        }
    }

    const TaskDag& dag_;
    const ExecutionPlan& plan_;
    const BackendPool& pool_;
    const EngineOptions& options_;
    Clock& clock_;
    RelevanceFn relevance_;
    ExecutionTrace trace_;
    std::string global_;
    Clock::duration start_{0};
};

void require_kind(const ExecutionPlan& plan, TopologyKind kind) {
    if (plan.topology.kind != kind)
        throw ConfigError("plan is for " + std::string(to_string(plan.topology.kind)) + ", not " +
                          std::string(to_string(kind)));
}

}  // namespace

ExecutionTrace exec_parallel(const TaskDag& dag, const ExecutionPlan& plan, const BackendPool& pool,
                             const EngineOptions& options) {
    require_kind(plan, TopologyKind::Parallel);
    Run run(dag, plan, pool, options);
    bool ok = true;
    for (std::size_t g = 0; g < plan.groups.size(); ++g) ok = run.run_group(g, Run::Scope::None) && ok;
    if (!ok) run.fail();
    return run.finish();
}

ExecutionTrace exec_sequential(const TaskDag& dag, const ExecutionPlan& plan, const BackendPool& pool,
                               const EngineOptions& options) {
    require_kind(plan, TopologyKind::Sequential);
    Run run(dag, plan, pool, options);
    for (std::size_t g = 0; g < plan.groups.size(); ++g)
        if (!run.run_group(g, Run::Scope::DirectPredecessors)) run.fail();
    return run.finish();
}

ExecutionTrace exec_hybrid(const TaskDag& dag, const ExecutionPlan& plan, const BackendPool& pool,
                           const EngineOptions& options) {
    require_kind(plan, TopologyKind::Hybrid);
    Run run(dag, plan, pool, options);
    for (std::size_t g = 0; g < plan.groups.size(); ++g)
        if (!run.run_group(g, Run::Scope::EarlierGroups)) run.fail();
    return run.finish();
}

ExecutionTrace exec_hierarchical(const TaskDag& dag, const ExecutionPlan& plan, const BackendPool& pool,
                                 AgentBackend& lead, const EngineOptions& options) {
    require_kind(plan, TopologyKind::Hierarchical);
    Run run(dag, plan, pool, options);

    std::string listing;
    for (auto& id : layer_then_id_order(dag))
        listing += "- " + id + ": " + dag.subtask(dag.require_index(id)).description + "\n";
    AgentRequest assign{"@lead.assign",
                        render_template(options.templates.lead_assign, {{"count", std::to_string(dag.size())},
                                                                        {"task", options.task_text},
                                                                        {"subtasks", listing}}),
                        run.global(), options.timeout};
    run.trace().lead_assign = run.call_direct(lead, assign);

    for (std::size_t g = 0; g < plan.groups.size(); ++g) run.run_group(g, Run::Scope::DirectPredecessors);

    std::string reports;
    for (auto& group : plan.groups) {
        for (auto& id : group) {
            reports += "### " + id + "\n";
            if (auto it = run.trace().outputs.find(id); it != run.trace().outputs.end()) {
                reports += it->second.text;
            } else {
                const auto& rec = run.trace().invocations.at(id);
                reports += "[FAILED: " + rec.error.value_or("unknown error") + "]";
            }
            reports += "\n\n";
        }
    }
    AgentRequest reconcile{"@lead.reconcile",
                           render_template(options.templates.lead_reconcile,
                                           {{"task", options.task_text}, {"reports", reports}}),
                           run.global(), options.timeout};
    run.trace().lead = run.call_direct(lead, reconcile);
    return run.finish();
}

ExecutionTrace execute(const TaskDag& dag, const ExecutionPlan& plan, const BackendPool& pool,
                       const EngineOptions& options, AgentBackend* lead) {
    switch (plan.topology.kind) {
        case TopologyKind::Parallel: return exec_parallel(dag, plan, pool, options);
        case TopologyKind::Sequential: return exec_sequential(dag, plan, pool, options);
        case TopologyKind::Hybrid: return exec_hybrid(dag, plan, pool, options);
        case TopologyKind::Hierarchical:
            if (!lead) {
                if (pool.empty() || !pool.front()) throw ConfigError("agent pool is empty");
                lead = pool.front().get();
            }
            return exec_hierarchical(dag, plan, pool, *lead, options);
    }
    throw Error("unknown topology");
}

}  // namespace orchard
