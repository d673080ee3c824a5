#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <sstream>

#include "orchard/accounting.hpp"
#include "orchard/calibration.hpp"
#include "orchard/convergence.hpp"
#include "orchard/corpus.hpp"
#include "orchard/decomposition.hpp"
#include "orchard/manifest.hpp"
#include "orchard/oracle.hpp"
#include "orchard/pipeline.hpp"
#include "orchard/router.hpp"
#include "orchard/runlog.hpp"
#include "orchard/simulator.hpp"

namespace orchard::cli {

namespace fs = std::filesystem;

namespace {

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

RouterConfig router_config_or_default(const std::string& path) {
    if (!path.empty()) return load_router_config(path);
    const auto fallback = default_data_dir() / "config" / "router.json";
    if (fs::exists(fallback)) return load_router_config(fallback);
    return {};
}

fs::path pricing_path_or_default(const std::string& path) {
    return path.empty() ? default_data_dir() / "config" / "pricing.json" : fs::path(path);
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

// ---------------------------------------------------------------- route

struct RouteArgs {
    std::string dag;
    std::string config;
    std::string width_mode;
    std::string log;
    std::string task_id;
    bool json = false;
};

int run_route(const RouteArgs& a) {
    auto parsed = load_dag_file(a.dag);
    print_warnings(parsed.warnings);
    auto config = router_config_or_default(a.config);
    if (!a.width_mode.empty()) config.width_mode = parse_width_mode(a.width_mode);
    const auto decision = route(parsed.dag, config);
    const std::string task_id = a.task_id.empty() ? fs::path(a.dag).stem().string() : a.task_id;

    if (a.json) {
        std::cout << to_json(decision).dump(2) << "\n";
    } else {
        const auto& m = decision.metrics;
        const auto exact = m.width_is_exact ? m.width_exact : compute_metrics(parsed.dag, WidthMode::Exact).width_exact;
        std::cout << to_string(decision.topology.kind);
        if (decision.topology.kind == TopologyKind::Hybrid)
            std::cout << ", stages " << decision.topology.stages.size();
        std::cout << "\n";
        std::cout << "rule: " << to_string(decision.fired_rule) << "\n";
        std::cout << "width: exact " << exact << ", approx " << m.width_approx << " (routing used "
                  << to_string(config.width_mode) << ")\n";
        std::cout << "depth: " << fixed(m.depth, 3) << "\n";
        std::cout << "coupling: " << fixed(m.coupling_density, 3) << "\n";
        std::cout << "parallelism ratio: " << fixed(m.parallelism_ratio, 3) << "\n";
        std::cout << "vertices: " << m.vertex_count << ", edges: " << m.edge_count << "\n";
        if (decision.topology.kind == TopologyKind::Hybrid) {
            for (std::size_t i = 0; i < decision.topology.stages.size(); ++i) {
                std::cout << "  stage " << i + 1 << ":";
                for (auto& id : decision.topology.stages[i]) std::cout << " " << id;
                std::cout << "\n";
            }
        }
        std::cout << "elapsed: "
                  << fixed(std::chrono::duration<double, std::micro>(decision.elapsed).count(), 1) << " us\n";
    }
    if (!a.log.empty()) {
        RunLog log(a.log);
        log.append(routing_record(task_id, decision));
        log.flush();
    }
    return kOk;
}

// ----------------------------------------------------------------- exec

struct ExecArgs {
    std::string manifest;
    std::string dag;
    std::string backend = "mock";
    std::string config;
    std::string pricing;
    std::string templates;
    std::string out;
    std::string task_id;
    std::string task_text;
    std::string domain;
    std::string clock;
    std::size_t concurrency = kDefaultMaxWorkers;
    std::size_t pool_size = 1;
    std::size_t context_budget = kDefaultContextBudget;
    std::uint64_t seed = 42;
    long long latency_ms = 100;
    long long timeout_ms = 0;
    double theta_cs = kDefaultThetaCs;
    std::vector<std::string> fail;
};

RunManifest manifest_from_flags(const ExecArgs& a) {
    if (a.dag.empty()) throw UsageError("exec needs a manifest or --dag");
    RunManifest m;
    m.dag = a.dag;
    m.task_id = a.task_id.empty() ? fs::path(a.dag).stem().string() : a.task_id;
    m.task_text = a.task_text;
    m.domain = a.domain;
    if (!a.config.empty()) m.router_config = fs::path(a.config);
    m.pricing = pricing_path_or_default(a.pricing);
    if (!a.templates.empty()) m.templates = fs::path(a.templates);
    m.backend = parse_backend_spec(a.backend);
    m.backend.pool_size = a.pool_size;
    m.backend.mock.latency = std::chrono::milliseconds(a.latency_ms);
    m.backend.mock.fail_permanently.insert(a.fail.begin(), a.fail.end());
    m.concurrency = a.concurrency;
    m.seed = a.seed;
    const std::string clock = a.clock.empty() ? (m.backend.mode == BackendMode::Provider ? "steady" : "virtual") : a.clock;
    if (clock != "virtual" && clock != "steady") throw UsageError("--clock must be virtual or steady");
    m.virtual_clock = clock == "virtual";
    if (a.timeout_ms > 0) m.timeout = std::chrono::milliseconds(a.timeout_ms);
    m.context_budget = a.context_budget;
    m.theta_cs = a.theta_cs;
    m.output_dir = a.out.empty() ? fs::path("out") : fs::path(a.out);
    m.validate();
    return m;
}

void write_artifacts(const PipelineResult& result, const RunManifest& m, const Pricing& pricing) {
    write_json_atomic(m.output_dir / "trace.json", trace_document(result, m.task_id));
    write_json_atomic(m.output_dir / "ledger.json", to_json(result.ledger, pricing));
    write_json_atomic(m.output_dir / "report.json", to_json(result.report));
    // One run per output directory: the log is replaced, not appended to.
    std::string lines;
    for (auto& r : result.log_records) lines += r.dump() + "\n";
    write_file_atomic(m.output_dir / "run.jsonl", lines);
}

PipelineOptions pipeline_options(const RunManifest& m, const RouterConfig& router) {
    PipelineOptions opts;
    opts.task_id = m.task_id;
    opts.domain = m.domain;
    opts.router = router;
    opts.context_budget = m.context_budget;
    opts.theta_cs = m.theta_cs;
    opts.engine.max_workers = m.concurrency;
    opts.engine.timeout = m.timeout;
    opts.engine.task_text = m.task_text;
    if (m.virtual_clock) opts.engine.clock = std::make_shared<VirtualClock>();
    if (m.templates) opts.engine.templates = PromptTemplates::load(*m.templates);
    return opts;
}

int run_exec(const ExecArgs& a) {
    RunManifest m = a.manifest.empty() ? manifest_from_flags(a) : load_manifest(a.manifest);
    if (!a.manifest.empty() && !a.out.empty()) m.output_dir = a.out;
    auto parsed = load_dag_file(m.dag);
    print_warnings(parsed.warnings);
    const RouterConfig router = m.router_config ? load_router_config(*m.router_config) : router_config_or_default("");
    const Pricing pricing = load_pricing(m.pricing);
    const auto agents = build_agents(m.backend, m.seed);
    const auto opts = pipeline_options(m, router);

    PipelineResult result;
    try {
        result = run_pipeline(parsed.dag, agents, opts, pricing);
    } catch (const PipelineFailed& e) {
        write_artifacts(e.partial(), m, pricing);
        std::cerr << "partial artifacts written to " << m.output_dir.string() << "\n";
        throw;
    }
    write_artifacts(result, m, pricing);

    const auto& r = result.report;
    std::cout << "task: " << r.task_id << "\n";
    std::cout << "topology: " << to_string(r.topology) << "\n";
    std::cout << "sub-outputs: " << result.rounds.back().trace.outputs.size() << "\n";
    if (result.synthesis) {
        std::cout << "synthesis: " << result.synthesis->iterations << " iteration(s), consistency "
                  << fixed(result.synthesis->consistency, 3) << (result.synthesis->escalated ? ", escalated" : "")
                  << (result.synthesis->converged ? "" : ", not converged") << "\n";
    }
    std::cout << "tokens: " << r.prompt_tokens << " prompt + " << r.completion_tokens << " completion = "
              << r.total_tokens << "\n";
    std::cout << "cost: " << format_usd(r.total_cost) << " (pricing as of " << pricing.as_of << ")\n";
    std::cout << "wall clock: " << fixed(std::chrono::duration<double, std::milli>(r.wall_clock).count(), 1)
              << " ms\n";
    std::cout << "artifacts: " << m.output_dir.string() << "\n";
    return kOk;
}

// ---------------------------------------------------------------- batch

struct BatchArgs {
    std::string corpus;
    std::string out = "logs";
    std::string config;
    std::string pricing;
    std::size_t pool_size = 3;
    std::size_t concurrency = kDefaultMaxWorkers;
    std::uint64_t seed = 42;
    long long latency_ms = 100;
    double theta_cs = kDefaultThetaCs;
    std::size_t limit = 0;
};

int run_batch(const BatchArgs& a) {
    auto tasks = load_corpus(a.corpus);
    if (a.limit > 0 && tasks.size() > a.limit) tasks.erase(tasks.begin() + static_cast<std::ptrdiff_t>(a.limit), tasks.end());
    if (tasks.empty()) throw UsageError("no tasks in " + a.corpus);
    const RouterConfig router = router_config_or_default(a.config);
    const Pricing pricing = load_pricing(pricing_path_or_default(a.pricing));

    BackendSelection selection;
    selection.pool_size = a.pool_size;
    selection.mock.latency = std::chrono::milliseconds(a.latency_ms);

    RunLog log(fs::path(a.out) / "run.jsonl");
    std::vector<RunReport> reports;
    std::size_t failed = 0;
    for (auto& task : tasks) {
        PipelineOptions opts;
        opts.task_id = task.task_id;
        opts.domain = task.domain;
        opts.router = router;
        opts.theta_cs = a.theta_cs;
        opts.engine.max_workers = a.concurrency;
        opts.engine.clock = std::make_shared<VirtualClock>();
        const auto agents = build_agents(selection, a.seed);
        PipelineResult result;
        try {
            result = run_pipeline(task.dag, agents, opts, pricing);
        } catch (const PipelineFailed& e) {
            ++failed;
            std::cerr << task.task_id << ": " << e.what() << "\n";
            result = e.partial();
        }
        for (auto& r : result.log_records) log.append(r);
        OracleResult oracle;
        oracle.scores = task.scores;
        oracle.best = TopologyKind::Parallel;
        for (auto kind : kAllTopologies)
            if (task.scores[topology_index(kind)] > task.scores[topology_index(oracle.best)]) oracle.best = kind;
        log.append(oracle_record(task.task_id, result.report.topology, oracle));
        reports.push_back(result.report);
    }
    log.flush();
    write_file_atomic(fs::path(a.out) / "reports.csv", reports_csv(reports));
    std::cout << topology_distribution(reports).table();
    std::cout << "runs: " << reports.size() << ", failed: " << failed << "\n";
    std::cout << "log: " << (fs::path(a.out) / "run.jsonl").string() << "\n";
    return failed ? kBackend : kOk;
}

// ---------------------------------------------------------------- ratio

struct RatioArgs {
    double omega = 1.0;
    double gamma = 0.0;
    std::size_t k = 1;
    double eps = 0.05;
    double c_tau = 0.5;
};

int run_ratio(const RatioArgs& a) {
    ConvergenceParams p;
    p.omega = a.omega;
    p.gamma = a.gamma;
    p.k = a.k;
    p.epsilon = a.eps;
    p.c_tau = a.c_tau;
    const auto bound = variance_ratio_bound(p);
    std::cout << (bound.diverges ? std::string("diverges") : fixed(bound.value, 3)) << "\n";
    return kOk;
}

// ------------------------------------------------------------- simulate

struct SimulateArgs {
    std::string archetype = "diamond";
    std::size_t size = 6;
    std::size_t pool_size = 5;
    double eps = 0.05;
    std::size_t trials = 1000;
    std::uint64_t seed = 42;
    std::string width_mode = "exact";
    double c_tau = 0.5;
    bool nonuniform = false;
    std::string out = "sim";
};

int run_simulate(const SimulateArgs& a) {
    SimConfig cfg;
    cfg.archetype = parse_archetype(a.archetype);
    cfg.archetype_size = a.size;
    cfg.pool_size = a.pool_size;
    cfg.epsilon = a.eps;
    cfg.trials = a.trials;
    cfg.seed = a.seed;
    cfg.width_mode = parse_width_mode(a.width_mode);
    cfg.quality.c_tau = a.c_tau;
    cfg.uniform_weights = !a.nonuniform;
    const auto summary = simulate_variance(cfg);

    write_file_atomic(fs::path(a.out) / "simulation.csv", simulation_csv(summary));
    write_json_atomic(fs::path(a.out) / "summary.json", simulation_summary_json(summary));

    std::cout << "archetype: " << to_string(cfg.archetype) << " (" << cfg.archetype_size << " vertices), "
              << cfg.trials << " trials, seed " << cfg.seed << "\n";
    std::cout << "Var_M: " << summary.mean_var_m << " (bound eps^2 = " << model_variance_bound(cfg.epsilon)
              << ")\n";
    std::cout << "Var_tau: " << summary.mean_var_tau << "\n";
    std::cout << "ratio: " << fixed(summary.ratio_of_means, 3) << " vs bound " << fixed(summary.mean_bound, 3)
              << ": " << (summary.ratio_of_means >= summary.mean_bound ? "holds" : "violated") << " ("
              << summary.trials_holding << "/" << summary.trials.size() << " trials hold)\n";
    if (!cfg.uniform_weights) std::cout << "note: non-uniform weights are outside the bound's hypothesis\n";
    std::cout << "output: " << a.out << "\n";
    return kOk;
}

// ------------------------------------------------------------ calibrate

struct CalibrateArgs {
    std::string tasks;
    std::vector<double> grid;
    double dev_fraction = 0.15;
    std::uint64_t seed = 42;
    std::string config;
    std::string out = "calibration";
};

int run_calibrate(const CalibrateArgs& a) {
    if (!fs::is_directory(a.tasks)) throw UsageError("task directory not found: " + a.tasks);
    const auto tasks = load_corpus(a.tasks);
    if (tasks.empty()) throw UsageError("task directory is empty: " + a.tasks);
    if (!(a.dev_fraction > 0.0 && a.dev_fraction <= 1.0)) throw UsageError("--dev-fraction must lie in (0, 1]");

    std::vector<std::string> ids;
    std::map<std::string, const CorpusTask*> by_id;
    for (auto& t : tasks) {
        ids.push_back(t.task_id);
        by_id[t.task_id] = &t;
    }
    const auto split = split_dev_test(ids, a.dev_fraction, a.seed);
    std::vector<DevTask> dev;
    for (auto& id : split.dev) dev.push_back({by_id.at(id)->dag, by_id.at(id)->scores});

    const RouterConfig base = router_config_or_default(a.config);
    const auto grid = a.grid.empty() ? default_gamma_grid() : a.grid;
    const auto result = calibrate_gamma(dev, grid, base);

    std::string csv = "theta_gamma,mean_quality,parallel,sequential,hierarchical,hybrid\n";
    std::cout << "dev " << split.dev.size() << " / test " << split.test.size() << "\n";
    std::cout << "theta_gamma  mean_quality      P      S      H      X\n";
    for (auto& row : result.table) {
        char line[160];
        std::snprintf(line, sizeof line, "%11.2f  %12.6f %6zu %6zu %6zu %6zu\n", row.theta_gamma, row.mean_quality,
                      row.routed[0], row.routed[1], row.routed[2], row.routed[3]);
        std::cout << line;
        std::snprintf(line, sizeof line, "%.4f,%.9f,%zu,%zu,%zu,%zu\n", row.theta_gamma, row.mean_quality,
                      row.routed[0], row.routed[1], row.routed[2], row.routed[3]);
        csv += line;
    }
    std::cout << "theta_gamma = " << fixed(result.chosen_theta_gamma, 2) << "\n";

    RouterConfig frozen = base;
    frozen.theta_gamma = result.chosen_theta_gamma;
    write_file_atomic(fs::path(a.out) / "calibration.csv", csv);
    write_json_atomic(fs::path(a.out) / "router.frozen.json", to_json(frozen));
    write_json_atomic(fs::path(a.out) / "split.json",
                      {{"seed", a.seed}, {"dev_fraction", a.dev_fraction}, {"dev", split.dev}, {"test", split.test}});
    std::cout << "output: " << a.out << "\n";
    return kOk;
}

// --------------------------------------------------------------- report

struct ReportArgs {
    std::string logs;
    std::string out = "report";
};

int run_report(const ReportArgs& a) {
    if (!fs::is_directory(a.logs)) throw UsageError("log directory not found: " + a.logs);
    const auto scan = read_log_dir(a.logs);
    if (scan.records.empty()) throw UsageError("no run log records under " + a.logs);
    if (scan.skipped) std::cerr << "warning: skipped " << scan.skipped << " unreadable log line(s)\n";

    std::vector<RunReport> reports;
    ConfusionMatrix confusion;
    std::map<int, std::size_t> histogram;
    for (auto& rec : scan.records) {
        const auto kind = rec["kind"].get<std::string>();
        try {
            if (kind == "run") {
                auto r = report_from_json(rec.at("report"));
                if (r.iterations >= 1) ++histogram[r.iterations];
                reports.push_back(std::move(r));
            } else if (kind == "oracle") {
                confusion.add(parse_topology(rec.at("router").get<std::string>()),
                              parse_topology(rec.at("oracle").get<std::string>()));
            }
        } catch (const std::exception& e) {
            std::cerr << "warning: skipped malformed " << kind << " record: " << e.what() << "\n";
        }
    }
    if (reports.empty()) throw UsageError("no run records under " + a.logs);

    const fs::path out(a.out);
    const auto dist = topology_distribution(reports);
    write_file_atomic(out / "topology_distribution.csv", dist.csv());
    std::cout << dist.table() << "\n";

    if (confusion.total() > 0) {
        write_file_atomic(out / "confusion_matrix.csv", confusion.csv());
        std::cout << confusion.table() << "\n";
    }

    std::string csv = "iterations,runs,percent,cumulative_percent\n";
    const int max_it = histogram.empty() ? 1 : histogram.rbegin()->first;
    std::size_t cumulative = 0, total = 0;
    for (auto& [it, n] : histogram) total += n;
    std::cout << "synthesis iterations:\n";
    for (int it = 1; it <= max_it; ++it) {
        const std::size_t n = histogram.count(it) ? histogram[it] : 0;
        cumulative += n;
        const double pct = total ? 100.0 * static_cast<double>(n) / static_cast<double>(total) : 0.0;
        const double cum = total ? 100.0 * static_cast<double>(cumulative) / static_cast<double>(total) : 0.0;
        csv += std::to_string(it) + "," + std::to_string(n) + "," + fixed(pct, 2) + "," + fixed(cum, 2) + "\n";
        std::cout << "  " << it << ": " << n << " (" << fixed(cum, 1) << "% cumulative)\n";
    }
    write_file_atomic(out / "iteration_histogram.csv", csv);
    std::cout << "output: " << a.out << "\n";
    return kOk;
}

// ----------------------------------------------------------- gen-corpus

struct GenCorpusArgs {
    CorpusConfig config;
    std::string out = "corpus";
};

int run_gen_corpus(const GenCorpusArgs& a) {
    const auto tasks = generate_corpus(a.config);
    write_corpus(tasks, a.out);
    std::cout << "wrote " << tasks.size() << " tasks to " << a.out << "\n";
    return kOk;
}

template <class Args>
std::shared_ptr<Args> make_args() {
    return std::make_shared<Args>();
}

}  // namespace

void register_route(CLI::App& app, int& status) {
    auto args = make_args<RouteArgs>();
    auto* cmd = app.add_subcommand("route", "Compute DAG metrics and pick a topology");
    cmd->add_option("dag", args->dag, "DAG file (decomposer records or canonical form)")->required();
    cmd->add_option("--config", args->config, "Router thresholds (JSON)");
    cmd->add_option("--width-mode", args->width_mode, "approximate | exact");
    cmd->add_option("--log", args->log, "Append a routing record to this JSONL file");
    cmd->add_option("--task-id", args->task_id, "Task id for the log record");
    cmd->add_flag("--json", args->json, "Print the decision as JSON");
    cmd->callback([args, &status] { status = run_route(*args); });
}

void register_exec(CLI::App& app, int& status) {
    auto args = make_args<ExecArgs>();
    auto* cmd = app.add_subcommand("exec", "Route, execute and synthesize one task");
    cmd->add_option("manifest", args->manifest, "Run manifest (JSON); flags below are used without one");
    cmd->add_option("--dag", args->dag, "DAG file");
    cmd->add_option("--backend", args->backend, "mock | scripted:<fixture> | openai | anthropic | google");
    cmd->add_option("--config", args->config, "Router thresholds (JSON)");
    cmd->add_option("--pricing", args->pricing, "Pricing table (JSON)");
    cmd->add_option("--templates", args->templates, "Directory overriding the prompt templates");
    cmd->add_option("--out", args->out, "Output directory");
    cmd->add_option("--task-id", args->task_id, "Task id");
    cmd->add_option("--task-text", args->task_text, "Task statement given to every agent");
    cmd->add_option("--domain", args->domain, "Domain label for reports");
    cmd->add_option("--clock", args->clock, "virtual | steady");
    cmd->add_option("--concurrency", args->concurrency, "Maximum concurrent invocations")->check(CLI::PositiveNumber);
    cmd->add_option("--pool-size", args->pool_size, "Agent instances")->check(CLI::PositiveNumber);
    cmd->add_option("--context-budget", args->context_budget, "Token budget for merged context")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--seed", args->seed, "Seed for mock backends");
    cmd->add_option("--latency-ms", args->latency_ms, "Mock backend latency")->check(CLI::NonNegativeNumber);
    cmd->add_option("--timeout-ms", args->timeout_ms, "Per-invocation timeout (0 = none)")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--theta-cs", args->theta_cs, "Consistency threshold")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--fail", args->fail, "Mock: subtask ids that fail permanently");
    cmd->callback([args, &status] { status = run_exec(*args); });
}

void register_batch(CLI::App& app, int& status) {
    auto args = make_args<BatchArgs>();
    auto* cmd = app.add_subcommand("batch", "Run every corpus task on mock agents and log the runs");
    cmd->add_option("corpus", args->corpus, "Corpus directory (see gen-corpus)")->required();
    cmd->add_option("--out", args->out, "Log directory");
    cmd->add_option("--config", args->config, "Router thresholds (JSON)");
    cmd->add_option("--pricing", args->pricing, "Pricing table (JSON)");
    cmd->add_option("--pool-size", args->pool_size, "Mock agent instances")->check(CLI::PositiveNumber);
    cmd->add_option("--concurrency", args->concurrency, "Maximum concurrent invocations")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", args->seed, "Seed for mock backends");
    cmd->add_option("--latency-ms", args->latency_ms, "Mock backend latency")->check(CLI::NonNegativeNumber);
    cmd->add_option("--theta-cs", args->theta_cs, "Consistency threshold")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--limit", args->limit, "Run at most this many tasks");
    cmd->callback([args, &status] { status = run_batch(*args); });
}

void register_ratio(CLI::App& app, int& status) {
    auto args = make_args<RatioArgs>();
    auto* cmd = app.add_subcommand("ratio", "Lower bound on topology-to-model variance ratio");
    cmd->add_option("--omega", args->omega, "Parallelism width (>= 1)")->check(CLI::Range(1.0, 1e12));
    cmd->add_option("--gamma", args->gamma, "Coupling density in [0, 1]")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--k", args->k, "Subtask count (>= 1)")->check(CLI::PositiveNumber);
    cmd->add_option("--eps", args->eps, "Convergence gap epsilon in [0, 1]")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--c-tau", args->c_tau, "Topology quality coefficient")->check(CLI::PositiveNumber);
    cmd->callback([args, &status] { status = run_ratio(*args); });
}

void register_simulate(CLI::App& app, int& status) {
    auto args = make_args<SimulateArgs>();
    auto* cmd = app.add_subcommand("simulate", "Monte-Carlo model vs topology variance");
    cmd->add_option("--archetype", args->archetype, "chain | wide-shallow | deep-narrow | diamond");
    cmd->add_option("--size", args->size, "Vertices per DAG")->check(CLI::PositiveNumber);
    cmd->add_option("--pool-size", args->pool_size, "Models in the pool")->check(CLI::Range(2, 1 << 20));
    cmd->add_option("--eps", args->eps, "Convergence gap epsilon in (0, 1]")->check(CLI::Range(1e-12, 1.0));
    cmd->add_option("--trials", args->trials, "Trials")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", args->seed, "Seed");
    cmd->add_option("--width-mode", args->width_mode, "approximate | exact");
    cmd->add_option("--c-tau", args->c_tau, "Topology quality coefficient")->check(CLI::PositiveNumber);
    cmd->add_flag("--nonuniform-weights", args->nonuniform, "Draw vertex weights instead of fixing them");
    cmd->add_option("--out", args->out, "Output directory");
    cmd->callback([args, &status] { status = run_simulate(*args); });
}

void register_calibrate(CLI::App& app, int& status) {
    auto args = make_args<CalibrateArgs>();
    auto* cmd = app.add_subcommand("calibrate", "Grid-search theta_gamma on a dev split");
    cmd->add_option("tasks", args->tasks, "Corpus directory with per-topology scores")->required();
    cmd->add_option("--grid", args->grid, "Candidate theta_gamma values")->delimiter(',');
    cmd->add_option("--dev-fraction", args->dev_fraction, "Share of tasks used for calibration");
    cmd->add_option("--seed", args->seed, "Split seed");
    cmd->add_option("--config", args->config, "Base router thresholds (JSON)");
    cmd->add_option("--out", args->out, "Output directory");
    cmd->callback([args, &status] { status = run_calibrate(*args); });
}

void register_report(CLI::App& app, int& status) {
    auto args = make_args<ReportArgs>();
    auto* cmd = app.add_subcommand("report", "Topology distribution, confusion matrix and iteration histogram");
    cmd->add_option("logs", args->logs, "Directory of run logs (*.jsonl)")->required();
    cmd->add_option("--out", args->out, "Output directory");
    cmd->callback([args, &status] { status = run_report(*args); });
}

void register_gen_corpus(CLI::App& app, int& status) {
    auto args = make_args<GenCorpusArgs>();
    auto* cmd = app.add_subcommand("gen-corpus", "Write a seeded corpus of archetype tasks with topology scores");
    cmd->add_option("--count", args->config.count, "Tasks")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", args->config.seed, "Seed");
    cmd->add_option("--min-size", args->config.min_size, "Smallest DAG")->check(CLI::Range(3, 1 << 20));
    cmd->add_option("--max-size", args->config.max_size, "Largest DAG")->check(CLI::Range(3, 1 << 20));
    cmd->add_option("--noise", args->config.noise, "Score noise half-width")->check(CLI::NonNegativeNumber);
    cmd->add_option("--out", args->out, "Output directory");
    cmd->callback([args, &status] { status = run_gen_corpus(*args); });
}

}  // namespace orchard::cli
