#include <gtest/gtest.h>

#include <random>
#include <set>

#include "orchard/archetype.hpp"
#include "orchard/decomposition.hpp"
#include "orchard/metrics.hpp"
#include "support/oracles.hpp"

using namespace orchard;
using nlohmann::json;

namespace {

DagDraft draft(std::vector<std::string> ids, std::vector<EdgeSpec> edges, std::vector<double> weights = {}) {
    DagDraft d;
    for (std::size_t i = 0; i < ids.size(); ++i)
        d.subtasks.push_back({ids[i], "", weights.empty() ? 1.0 : weights[i], CouplingLevel::None});
    d.edges = std::move(edges);
    return d;
}

TaskDag diamond(double c = 0.3) {
    return TaskDag::build(draft({"a", "b", "c", "d"}, {{"a", "b", c}, {"a", "c", c}, {"b", "d", c}, {"c", "d", c}}));
}

}  // namespace

TEST(Validate, WellFormedChain) {
    auto r = validate_dag(draft({"a", "b", "c"}, {{"a", "b", 0.7}, {"b", "c", 0.7}}));
    EXPECT_TRUE(r.ok()) << r.summary();
}

TEST(Validate, TwoCycleWitness) {
    auto r = validate_dag(draft({"a", "b"}, {{"a", "b", 0.3}, {"b", "a", 0.3}}));
    ASSERT_TRUE(r.has(ViolationKind::Cycle));
    for (auto& v : r.violations)
        if (v.kind == ViolationKind::Cycle) EXPECT_EQ(v.witness, (std::vector<std::string>{"a", "b", "a"}));
}

TEST(Validate, CouplingOutOfRange) {
    auto r = validate_dag(draft({"a", "b"}, {{"a", "b", 1.3}}));
    EXPECT_TRUE(r.has(ViolationKind::CouplingOutOfRange));
}

TEST(Validate, ReportsEveryStructuralProblem) {
    auto d = draft({"a", "a", ""}, {{"a", "zz", 0.1}, {"a", "a", 0.1}}, {1.0, 0.0, 1.0});
    auto r = validate_dag(d);
    EXPECT_TRUE(r.has(ViolationKind::DuplicateId));
    EXPECT_TRUE(r.has(ViolationKind::EmptyId));
    EXPECT_TRUE(r.has(ViolationKind::NonPositiveWeight));
    EXPECT_TRUE(r.has(ViolationKind::DanglingEdge));
    EXPECT_TRUE(r.has(ViolationKind::SelfEdge));
    EXPECT_TRUE(validate_dag(DagDraft{}).has(ViolationKind::EmptyGraph));
    EXPECT_TRUE(validate_dag(draft({"a", "b"}, {{"a", "b", 0.1}, {"a", "b", 0.2}})).has(ViolationKind::DuplicateEdge));
}

TEST(Validate, BuildThrowsWithReport) {
    try {
        TaskDag::build(draft({"a", "b"}, {{"a", "b", 0.3}, {"b", "a", 0.3}}));
        FAIL() << "expected ValidationError";
    } catch (const ValidationError& e) {
        EXPECT_TRUE(e.report().has(ViolationKind::Cycle));
    }
}

TEST(Validate, InjectedBackEdgeIsAlwaysRejected) {
    std::mt19937_64 rng(7);
    int checked = 0;
    for (int trial = 0; trial < 500; ++trial) {
        auto g = oracle::random_dag(2 + trial % 9, 0.4, rng);
        const auto reach = oracle::reachability(g);
        std::vector<std::pair<std::size_t, std::size_t>> candidates;
        for (std::size_t u = 0; u < g.n; ++u)
            for (std::size_t v = 0; v < g.n; ++v)
                if (reach[u][v]) candidates.emplace_back(u, v);
        if (candidates.empty()) continue;
        auto [u, v] = candidates[rng() % candidates.size()];
        auto d = oracle::to_dag(g).to_draft();
        d.edges.push_back({oracle::vertex_name(v), oracle::vertex_name(u), 0.0});
        auto report = validate_dag(d);
        EXPECT_TRUE(report.has(ViolationKind::Cycle)) << "trial " << trial;
        ++checked;
    }
    EXPECT_GT(checked, 300);
}

TEST(Coupling, LabelValues) {
    EXPECT_DOUBLE_EQ(coupling_from_label(CouplingLevel::None), 0.0);
    EXPECT_DOUBLE_EQ(coupling_from_label(CouplingLevel::Weak), 0.3);
    EXPECT_DOUBLE_EQ(coupling_from_label(CouplingLevel::Strong), 0.7);
    EXPECT_DOUBLE_EQ(coupling_from_label(CouplingLevel::Critical), 1.0);
    EXPECT_EQ(parse_coupling_label("STRONG"), CouplingLevel::Strong);
    EXPECT_FALSE(parse_coupling_label("medium"));
}

TEST(Decomposition, EdgeTakesDependentsLabel) {
    json records = json::parse(R"([
        {"id": "v0", "description": "x", "depends_on": [], "coupling": "weak", "estimated_tokens": 500},
        {"id": "v1", "description": "y", "depends_on": ["v0"], "coupling": "strong", "estimated_tokens": 800}
    ])");
    auto parsed = parse_decomposition(records);
    ASSERT_EQ(parsed.dag.edge_count(), 1u);
    EXPECT_EQ(parsed.dag.coupling(0, 1), 0.7);
    EXPECT_DOUBLE_EQ(parsed.dag.subtask(1).weight, 800.0);
    EXPECT_TRUE(parsed.warnings.empty());
}

TEST(Decomposition, SingleRecord) {
    auto parsed = parse_decomposition(json::parse(R"([{"id": "only", "description": "d", "depends_on": [], "coupling": "none"}])"));
    EXPECT_EQ(parsed.dag.size(), 1u);
    EXPECT_EQ(parsed.dag.edge_count(), 0u);
    ASSERT_EQ(parsed.warnings.size(), 1u);
    EXPECT_DOUBLE_EQ(parsed.dag.subtask(0).weight, kDefaultEstimatedTokens);
}

TEST(Decomposition, UnknownDependencyNamed) {
    try {
        parse_decomposition(json::parse(R"([{"id": "a", "description": "d", "depends_on": ["vX"], "coupling": "weak"}])"));
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("vX"), std::string::npos);
    }
}

TEST(Decomposition, CycleIsValidationError) {
    EXPECT_THROW(parse_decomposition(json::parse(
                     R"([{"id": "a", "description": "d", "depends_on": ["b"], "coupling": "weak"},
                         {"id": "b", "description": "d", "depends_on": ["a"], "coupling": "weak"}])")),
                 ValidationError);
}

TEST(Decomposition, RoundTripOnArchetypes) {
    for (auto kind : {ArchetypeKind::Chain, ArchetypeKind::WideShallow, ArchetypeKind::DeepNarrow, ArchetypeKind::Diamond})
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            auto dag = generate_archetype({kind, 3 + seed % 8, seed, std::nullopt});
            auto records = to_decomposition_records(dag);
            ASSERT_TRUE(records.has_value());
            EXPECT_EQ(parse_decomposition(*records).dag, dag);
            EXPECT_EQ(parse_canonical(serialize_canonical(dag)), dag);
        }
}

TEST(Decomposition, CanonicalRoundTripOnRandomDags) {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 200; ++i) {
        auto dag = oracle::to_dag(oracle::random_dag(1 + i % 8, 0.5, rng));
        EXPECT_EQ(parse_canonical(serialize_canonical(dag)), dag);
        EXPECT_EQ(load_dag_document(serialize_canonical(dag)).dag, dag);
    }
}

TEST(Metrics, Diamond) {
    auto m = compute_metrics(diamond(), WidthMode::Exact);
    EXPECT_EQ(m.width_exact, 2u);
    EXPECT_DOUBLE_EQ(m.depth, 3.0);
    EXPECT_NEAR(m.coupling_density, 0.3, 1e-12);
    EXPECT_DOUBLE_EQ(m.parallelism_ratio, 0.5);
}

TEST(Metrics, WeightedChain) {
    auto dag = TaskDag::build(draft({"a", "b", "c"}, {{"a", "b", 0.3}, {"b", "c", 0.7}}, {2, 3, 5}));
    auto m = compute_metrics(dag, WidthMode::Exact);
    EXPECT_EQ(m.width_exact, 1u);
    EXPECT_DOUBLE_EQ(m.depth, 10.0);
    EXPECT_NEAR(m.coupling_density, 0.5, 1e-12);
}

TEST(Metrics, IsolatedVertices) {
    auto m = compute_metrics(TaskDag::build(draft({"a", "b", "c", "d"}, {})), WidthMode::Approximate);
    EXPECT_EQ(m.width(), 4u);
    EXPECT_DOUBLE_EQ(m.depth, 1.0);
    EXPECT_DOUBLE_EQ(m.coupling_density, 0.0);
    EXPECT_DOUBLE_EQ(m.parallelism_ratio, 1.0);
}

TEST(Metrics, MatchesBruteForceOnRandomDags) {
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 1500; ++i) {
        auto g = oracle::random_dag(1 + i % 8, 0.1 + 0.1 * (i % 7), rng);
        auto dag = oracle::to_dag(g);
        auto m = compute_metrics(dag, WidthMode::Exact);
        ASSERT_EQ(m.width_exact, oracle::max_antichain(g)) << "graph " << i;
        ASSERT_EQ(m.width_approx, oracle::largest_layer(g)) << "graph " << i;
        ASSERT_DOUBLE_EQ(m.depth, double(oracle::heaviest_path(g))) << "graph " << i;
        EXPECT_LE(1u, m.width_approx);
        EXPECT_LE(m.width_approx, m.width_exact);
        EXPECT_LE(m.width_exact, m.vertex_count);
        EXPECT_GE(m.coupling_density, 0.0);
        EXPECT_LE(m.coupling_density, 1.0);
        double heaviest = 0;
        for (auto& s : dag.subtasks()) heaviest = std::max(heaviest, s.weight);
        EXPECT_GE(m.depth, heaviest);
        EXPECT_LE(m.depth, dag.total_weight());
    }
}

TEST(Metrics, ApproximateModeSkipsExactWidth) {
    auto m = compute_metrics(diamond(), WidthMode::Approximate);
    EXPECT_FALSE(m.width_is_exact);
    EXPECT_EQ(m.width(), m.width_approx);
}

TEST(Layers, Examples) {
    using L = std::vector<std::vector<std::string>>;
    EXPECT_EQ(topological_layer_ids(diamond()), (L{{"a"}, {"b", "c"}, {"d"}}));
    EXPECT_EQ(topological_layer_ids(TaskDag::build(draft({"a", "b", "c"}, {}))), (L{{"a", "b", "c"}}));
    EXPECT_EQ(topological_layer_ids(TaskDag::build(draft({"a", "b", "c"}, {{"a", "b", 0}, {"b", "c", 0}}))),
              (L{{"a"}, {"b"}, {"c"}}));
}

TEST(Layers, PartitionWithForwardEdges) {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 500; ++i) {
        auto dag = oracle::to_dag(oracle::random_dag(1 + i % 12, 0.3, rng));
        auto layers = topological_layers(dag);
        auto layer = layer_of(dag);
        std::set<std::size_t> seen;
        for (std::size_t l = 0; l < layers.size(); ++l)
            for (std::size_t v : layers[l]) {
                EXPECT_TRUE(seen.insert(v).second);
                EXPECT_EQ(layer[v], l);
            }
        EXPECT_EQ(seen.size(), dag.size());
        for (auto& e : dag.edges()) EXPECT_LT(layer[e.from], layer[e.to]);
    }
}

TEST(Matching, SmallBipartite) {
    EXPECT_EQ(maximum_bipartite_matching({{0, 1}, {0}, {1, 2}}, 3), 3u);
    EXPECT_EQ(maximum_bipartite_matching({{0}, {0}, {0}}, 1), 1u);
    EXPECT_EQ(maximum_bipartite_matching({{}, {}}, 0), 0u);
}

TEST(Archetype, DiamondShape) {
    auto dag = generate_archetype({ArchetypeKind::Diamond, 4, 99, std::nullopt});
    ASSERT_EQ(dag.size(), 4u);
    std::set<std::pair<std::size_t, std::size_t>> edges;
    for (auto& e : dag.edges()) edges.emplace(e.from, e.to);
    EXPECT_EQ(edges, (std::set<std::pair<std::size_t, std::size_t>>{{0, 1}, {0, 2}, {1, 3}, {2, 3}}));
}

TEST(Archetype, SingleVertexChain) {
    auto dag = generate_archetype({ArchetypeKind::Chain, 1, 3, std::nullopt});
    EXPECT_EQ(dag.size(), 1u);
    EXPECT_EQ(dag.edge_count(), 0u);
}

TEST(Archetype, SeededDeterminism) {
    for (auto kind : {ArchetypeKind::Chain, ArchetypeKind::WideShallow, ArchetypeKind::DeepNarrow, ArchetypeKind::Diamond}) {
        DagArchetype spec{kind, 9, 1234, std::nullopt};
        EXPECT_EQ(generate_archetype(spec), generate_archetype(spec));
    }
}

TEST(Archetype, ShapeMetrics) {
    auto wide = compute_metrics(generate_archetype({ArchetypeKind::WideShallow, 9, 1, 1000.0}), WidthMode::Exact);
    EXPECT_EQ(wide.width_exact, 8u);
    EXPECT_DOUBLE_EQ(wide.depth, 2000.0);
    auto chain = compute_metrics(generate_archetype({ArchetypeKind::Chain, 6, 1, 1.0}), WidthMode::Exact);
    EXPECT_EQ(chain.width_exact, 1u);
    auto deep = generate_archetype({ArchetypeKind::DeepNarrow, 7, 1, 1.0});
    EXPECT_EQ(deep.size(), 7u);
    EXPECT_EQ(compute_metrics(deep, WidthMode::Exact).depth, 4.0);
    EXPECT_THROW(generate_archetype({ArchetypeKind::Diamond, 2, 1, std::nullopt}), ParameterError);
}
