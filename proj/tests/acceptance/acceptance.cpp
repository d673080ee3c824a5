// Acceptance checks. One line per criterion:
//   [PASS] 3 router truth table: ...
// Exit status is non-zero when any selected criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "orchard/accounting.hpp"
#include "orchard/archetype.hpp"
#include "orchard/convergence.hpp"
#include "orchard/engine.hpp"
#include "orchard/metrics.hpp"
#include "orchard/oracle.hpp"
#include "orchard/router.hpp"
#include "orchard/simulator.hpp"
#include "orchard/synthesis.hpp"
#include "../support/oracles.hpp"

using namespace orchard;
namespace fs = std::filesystem;

namespace {

const fs::path kData = ORCHARD_TEST_DATA_DIR;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

/// Runs the CLI, returning its exit status and stdout.
std::pair<int, std::string> run_cli(const std::string& args, const fs::path& scratch) {
    const auto out = scratch / ".stdout";
    const std::string cmd = std::string("'") + ORCHARD_CLI_PATH + "' " + args + " >'" + out.string() + "' 2>&1";
    const int raw = std::system(cmd.c_str());
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(out)};
}

fs::path scratch_dir(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("orchard_acceptance_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// 1 -------------------------------------------------------------------------

Outcome scaling_law() {
    ConvergenceParams a;
    a.omega = 3.4;
    a.gamma = 0.35;
    a.k = 5;
    a.epsilon = 0.05;
    ConvergenceParams b;
    b.omega = 3;
    b.gamma = 0.4;
    b.k = 6;
    b.epsilon = 0.05;
    const double va = variance_ratio_bound(a).value;
    const double vb = variance_ratio_bound(b).value;

    auto dir = scratch_dir("ratio");
    auto [ca, outa] = run_cli("ratio --omega 3.4 --gamma 0.35 --k 5 --eps 0.05", dir);
    auto [cb, outb] = run_cli("ratio --omega 3 --gamma 0.4 --k 6 --eps 0.05", dir);
    fs::remove_all(dir);

    const bool ok = std::abs(va - 48.672) <= 0.001 && std::abs(vb - 24.0) <= 0.001 && vb >= 20.0 && ca == 0 &&
                    cb == 0 && outa == "48.672\n" && outb == "24.000\n";
    return {ok, fmt("ratio(3.4,0.35,5,0.05)=%.6f [cli %s], ratio(3,0.4,6,0.05)=%.6f [cli %s]", va,
                    outa.substr(0, outa.find('\n')).c_str(), vb, outb.substr(0, outb.find('\n')).c_str())};
}

// 2 -------------------------------------------------------------------------

Outcome width_oracle() {
    std::mt19937_64 rng(42);
    std::uniform_int_distribution<std::size_t> size(1, 8);
    std::uniform_real_distribution<double> density(0.0, 1.0);
    std::size_t exact_ok = 0, approx_ok = 0;
    const std::size_t total = 5000;
    for (std::size_t i = 0; i < total; ++i) {
        auto g = oracle::random_dag(size(rng), density(rng), rng);
        auto m = compute_metrics(oracle::to_dag(g), WidthMode::Exact);
        exact_ok += m.width_exact == oracle::max_antichain(g);
        approx_ok += m.width_approx <= m.width_exact;
    }
    return {exact_ok == total && approx_ok == total,
            fmt("exact == brute force %zu/%zu, approx <= exact %zu/%zu", exact_ok, total, approx_ok, total)};
}

// 3 -------------------------------------------------------------------------

Outcome router_truth_table() {
    static constexpr int kLevels[] = {0, 3, 7, 10};
    const oracle::IntThresholds thresholds;
    std::mt19937_64 rng(42);
    std::size_t cases = 0, agree = 0, forced = 0, forced_ok = 0;
    for (std::size_t n = 1; n <= 6; ++n) {
        std::vector<std::pair<std::size_t, std::size_t>> pairs;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
        for (std::uint32_t mask = 0; mask < (1u << pairs.size()); ++mask) {
            oracle::SmallGraph g;
            g.n = n;
            g.weights.assign(n, 1);
            for (std::size_t e = 0; e < pairs.size(); ++e)
                if (mask >> e & 1u) g.edges.push_back(pairs[e]);
            const std::size_t exact = oracle::max_antichain(g);
            const std::size_t approx = oracle::largest_layer(g);

            // every uniform level, plus two seeded mixes of levels
            std::vector<std::vector<int>> assignments;
            for (int level : kLevels) assignments.emplace_back(g.edges.size(), level);
            for (int mix = 0; mix < 2; ++mix) {
                std::vector<int> a;
                for (std::size_t e = 0; e < g.edges.size(); ++e) a.push_back(kLevels[rng() % 4]);
                assignments.push_back(a);
            }
            for (auto& a : assignments) {
                g.coupling_tenths = a;
                long sum = 0;
                for (int c : a) sum += c;
                const TaskDag dag = oracle::to_dag(g);
                for (auto mode : {WidthMode::Exact, WidthMode::Approximate}) {
                    RouterConfig config;
                    config.width_mode = mode;
                    const auto got = route(dag, config).topology.kind;
                    const std::size_t width = mode == WidthMode::Exact ? exact : approx;
                    ++cases;
                    agree += got == oracle::route_rule(n, g.edges.size(), sum, width, thresholds);
                    if (g.edges.empty()) {
                        ++forced;
                        forced_ok += got == TopologyKind::Parallel;
                    } else if (width == 1) {
                        ++forced;
                        forced_ok += got == TopologyKind::Sequential;
                    }
                }
            }
        }
    }
    return {agree == cases && forced_ok == forced,
            fmt("agreement %zu/%zu, forced branches %zu/%zu", agree, cases, forced_ok, forced)};
}

// 4 -------------------------------------------------------------------------

/// Orthogonal one-hot embedding per distinct text: any two different texts score 0.
class OneHotEmbedder final : public Embedder {
public:
    std::size_t dimension() const noexcept override { return 8; }
    std::vector<double> embed(std::string_view text) const override {
        std::vector<double> v(8, 0.0);
        v[std::hash<std::string_view>{}(text) % 8] = 1.0;
        return v;
    }
};

Outcome termination_bound() {
    // texts chosen so their one-hot slots differ
    OneHotEmbedder probe;
    std::vector<std::string> texts;
    std::vector<int> used;
    for (int i = 0; texts.size() < 3 && i < 1000; ++i) {
        std::string t = "text-" + std::to_string(i);
        auto v = probe.embed(t);
        int slot = int(std::find(v.begin(), v.end(), 1.0) - v.begin());
        if (std::find(used.begin(), used.end(), slot) == used.end()) {
            used.push_back(slot);
            texts.push_back(t);
        }
    }
    const std::vector<std::string> originals{texts[0], texts[1]};
    nlohmann::json fixture = {{"name", "scripted"},
                              {"model", "fixture"},
                              {"latency_ms", 0},
                              {"responses", {{"@arbiter", {{"text", texts[2]}}}}}};

    std::string detail;
    bool ok = true;
    for (int tenth = 0; tenth <= 10; ++tenth) {
        const double g0 = tenth / 10.0;
        const int bound = (10 - tenth + 1) / 2;  // ceil((1 - g0) / 0.2) in exact arithmetic
        std::shared_ptr<ScriptedBackend> arbiter = ScriptedBackend::from_json(fixture);
        SynthesisConfig config;
        config.gamma0 = g0;
        config.theta_cs = 0.8;
        config.embedder = std::make_shared<OneHotEmbedder>();
        config.clock = std::make_shared<VirtualClock>();
        const auto result = synthesize({{TopologyKind::Parallel, {}}, originals, {}}, config, *arbiter, *arbiter,
                                       [&](double) -> ExecutedRound { return {{TopologyKind::Parallel, {}}, originals, {}}; });
        const bool point_ok = result.iterations <= bound && result.iterations <= 5;
        ok = ok && point_ok;
        detail += fmt("%s%.1f:%d/%d%s", detail.empty() ? "" : " ", g0, result.iterations, bound, point_ok ? "" : "!");
    }
    return {ok, "gamma0:iterations/bound " + detail};
}

// 5 -------------------------------------------------------------------------

Outcome simulator_consistency() {
    bool ok = true;
    std::string detail;
    for (auto kind : {ArchetypeKind::Diamond, ArchetypeKind::WideShallow}) {
        std::vector<double> eps{0.01, 0.02, 0.05}, ratios;
        for (double e : eps) {
            SimConfig c;
            c.archetype = kind;
            c.epsilon = e;
            c.trials = 1000;
            c.seed = 42;
            c.quality.c_tau = 0.5;
            const auto s = simulate_variance(c);
            const bool var_ok = s.mean_var_m <= 1.1 * e * e;
            const bool ratio_ok = s.all_trials_hold() && s.ratio_of_means >= s.mean_bound;
            ok = ok && var_ok && ratio_ok;
            ratios.push_back(s.ratio_of_means);
            detail += fmt("%s%s eps=%.2f VarM/eps^2=%.3f ratio=%.1f bound=%.1f holds=%zu/%zu;",
                          detail.empty() ? "" : " ", std::string(to_string(kind)).c_str(), e, s.mean_var_m / (e * e),
                          s.ratio_of_means, s.mean_bound, s.trials_holding, s.trials.size());
        }
        const double slope = log_log_slope(eps, ratios);
        ok = ok && std::abs(slope + 2.0) <= 0.15;
        detail += fmt(" slope=%.3f;", slope);
    }
    return {ok, detail};
}

// 6 -------------------------------------------------------------------------

Outcome parallel_speedup() {
    const TaskDag dag = generate_archetype({ArchetypeKind::WideShallow, 9, 42, 1000.0});
    const auto m = compute_metrics(dag, WidthMode::Exact);
    auto wall = [&](Topology t) {
        MockBackendOptions o;
        o.latency = std::chrono::milliseconds(100);
        BackendPool pool{std::make_shared<MockBackend>(o)};
        EngineOptions opts;
        opts.max_workers = 8;
        opts.clock = std::make_shared<VirtualClock>();
        const auto plan = make_plan(dag, t, pool.size());
        return double(execute(dag, plan, pool, opts).wall_clock.count());
    };
    const double seq = wall({TopologyKind::Sequential, {}});
    const double par = wall({TopologyKind::Parallel, {}});
    const double hyb = wall({TopologyKind::Hybrid, topological_layer_ids(dag)});
    const double target = 0.9 * m.total_weight / m.depth;
    return {seq / par >= target, fmt("leaves=%zu seq/par=%.3f (seq/hybrid=%.3f) >= 0.9*sum(w)/depth=%.3f",
                                     dag.size() - 1, seq / par, seq / hyb, target)};
}

// 7 -------------------------------------------------------------------------

Outcome routing_overhead() {
    std::mt19937_64 rng(42);
    DagDraft d;
    const std::size_t n = 1000;
    for (std::size_t i = 0; i < n; ++i) d.subtasks.push_back({"v" + std::to_string(i), "", 1.0, CouplingLevel::None});
    std::uniform_real_distribution<double> coupling(0.0, 1.0);
    for (std::size_t j = 1; j < n; ++j) {
        std::set<std::size_t> preds;
        const std::size_t want = std::min<std::size_t>(j, 1 + rng() % 4);
        while (preds.size() < want) preds.insert(rng() % j);
        for (auto i : preds) d.edges.push_back({d.subtasks[i].id, d.subtasks[j].id, coupling(rng)});
    }
    std::shuffle(d.subtasks.begin(), d.subtasks.end(), rng);
    const TaskDag dag = TaskDag::build(d);
    RouterConfig config;
    config.width_mode = WidthMode::Approximate;
    std::vector<double> ms;
    for (int i = 0; i < 100; ++i) {
        const auto start = std::chrono::steady_clock::now();
        volatile auto kind = route(dag, config).topology.kind;
        (void)kind;
        ms.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count());
    }
    std::sort(ms.begin(), ms.end());
    const double median = (ms[49] + ms[50]) / 2;
    return {median < 50.0, fmt("|V|=%zu |E|=%zu median=%.3f ms max=%.3f ms (limit 50 ms)", dag.size(),
                               dag.edge_count(), median, ms.back())};
}

// 8 -------------------------------------------------------------------------

Outcome cost_fixture() {
    const Pricing pricing = load_pricing(kData / "config" / "pricing.json");
    CostLedger in, out;
    in.append({{"openai", "gpt-4o-mini"}, "t", 1'000'000, 0, Phase::Execute});
    out.append({{"anthropic", "claude-3.5-haiku"}, "t", 0, 1'000'000, Phase::Execute});
    const PicoUsd a = cost_of(in, pricing), b = cost_of(out, pricing);
    const bool ok = to_micro_usd(a) == 150'000 && a % kPicoPerMicro == 0 && to_micro_usd(b) == 4'000'000 &&
                    b % kPicoPerMicro == 0 && format_usd(a) == "$0.150000" && format_usd(b) == "$4.000000";
    return {ok, "1M input gpt-4o-mini = " + format_usd(a) + ", 1M output claude-3.5-haiku = " + format_usd(b)};
}

// 9 -------------------------------------------------------------------------

Outcome end_to_end_determinism() {
    auto dir = scratch_dir("e2e");
    const std::string manifest = (kData / "fixtures" / "diamond_manifest.json").string();
    auto [c1, o1] = run_cli("exec " + manifest + " --out '" + (dir / "one").string() + "'", dir);
    auto [c2, o2] = run_cli("exec " + manifest + " --out '" + (dir / "two").string() + "'", dir);
    bool ok = c1 == 0 && c2 == 0;
    std::string detail = fmt("exit %d/%d;", c1, c2);
    for (auto f : {"trace.json", "ledger.json", "report.json"}) {
        const auto a = slurp(dir / "one" / f), b = slurp(dir / "two" / f);
        const bool same = !a.empty() && a == b;
        ok = ok && same;
        detail += fmt(" %s %s (%zu bytes)", f, same ? "identical" : "DIFFERENT", a.size());
    }
    fs::remove_all(dir);
    return {ok, detail};
}

// 10 ------------------------------------------------------------------------

Outcome confusion_forced() {
    std::vector<TaskDag> tasks;
    std::mt19937_64 rng(42);
    for (std::size_t n = 1; n <= 12; ++n) {
        DagDraft d;
        for (std::size_t i = 0; i < n; ++i) d.subtasks.push_back({"v" + std::to_string(i), "", 1.0 + double(rng() % 9), CouplingLevel::None});
        tasks.push_back(TaskDag::build(d));
    }
    for (std::uint64_t s = 0; s < 12; ++s) tasks.push_back(generate_archetype({ArchetypeKind::Chain, 2 + s % 9, s, std::nullopt}));
    const auto m = confusion_matrix(tasks, {}, quality_model_evaluator());
    const std::string table = m.table();

    std::vector<std::string> lines;
    std::istringstream in(table);
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    bool layout = lines.size() == 6 && lines[0].rfind("Router\\Oracle", 0) == 0 &&
                  lines[5].rfind("Overall router accuracy:", 0) == 0;
    const char* labels[] = {"P", "S", "H", "X"};
    for (int r = 0; layout && r < 4; ++r) {
        std::istringstream row(lines[1 + r]);
        std::string label;
        row >> label;
        int cells = 0;
        for (std::size_t v; row >> v;) ++cells;
        layout = label == labels[r] && cells == 4;
    }
    const bool ok = m.accuracy() == 1.0 && m.counts[0][0] == 12 && m.counts[1][1] == 12 && layout;
    return {ok, fmt("diagonal %zu/%zu (P,P)=%zu (S,S)=%zu, 4x4 layout %s", m.agreements(), m.total(), m.counts[0][0],
                    m.counts[1][1], layout ? "ok" : "BROKEN")};
}

struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> check;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance checks"};
    std::vector<int> only;
    app.add_option("--criterion", only, "Run only these criteria (1-10)")->check(CLI::Range(1, 10));
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> criteria{
        {1, "scaling-law fixture", scaling_law},
        {2, "width oracle equivalence", width_oracle},
        {3, "router truth table", router_truth_table},
        {4, "synthesis termination bound", termination_bound},
        {5, "simulator self-consistency", simulator_consistency},
        {6, "parallel speedup", parallel_speedup},
        {7, "routing overhead", routing_overhead},
        {8, "cost fixture", cost_fixture},
        {9, "end-to-end determinism", end_to_end_determinism},
        {10, "confusion-matrix forced classes", confusion_forced},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << c.id << " " << c.name << ": " << o.detail
                  << fmt(" (%.2fs)", secs) << std::endl;
        failures += !o.pass;
    }
    return failures == 0 ? 0 : 1;
}
