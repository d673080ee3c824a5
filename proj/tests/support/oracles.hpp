#pragma once

// Brute-force reference implementations. Deliberately naive: exponential
// subset and path enumeration, exact integer comparisons. Nothing here
// calls into the library's graph algorithms.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "orchard/dag.hpp"
#include "orchard/router.hpp"

namespace oracle {

/// Plain edge-list graph on vertices 0..n-1.
struct SmallGraph {
    std::size_t n = 0;
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    std::vector<int> coupling_tenths;  // per edge, 0..10
    std::vector<int> weights;          // per vertex, positive
};

inline std::vector<std::vector<bool>> reachability(const SmallGraph& g) {
    std::vector<std::vector<bool>> r(g.n, std::vector<bool>(g.n, false));
    for (auto [u, v] : g.edges) r[u][v] = true;
    for (std::size_t k = 0; k < g.n; ++k)
        for (std::size_t i = 0; i < g.n; ++i)
            for (std::size_t j = 0; j < g.n; ++j)
                if (r[i][k] && r[k][j]) r[i][j] = true;
    return r;
}

/// Largest vertex subset with no two comparable vertices.
inline std::size_t max_antichain(const SmallGraph& g) {
    const auto r = reachability(g);
    std::size_t best = 0;
    for (std::uint32_t mask = 1; mask < (1u << g.n); ++mask) {
        bool ok = true;
        for (std::size_t i = 0; i < g.n && ok; ++i) {
            if (!(mask >> i & 1u)) continue;
            for (std::size_t j = 0; j < g.n && ok; ++j)
                if (i != j && (mask >> j & 1u) && r[i][j]) ok = false;
        }
        if (ok) best = std::max<std::size_t>(best, static_cast<std::size_t>(__builtin_popcount(mask)));
    }
    return best;
}

/// Heaviest directed path by summed vertex weight, found by walking every path.
inline long heaviest_path(const SmallGraph& g) {
    std::vector<std::vector<std::size_t>> out(g.n);
    for (auto [u, v] : g.edges) out[u].push_back(v);
    long best = 0;
    auto walk = [&](auto&& self, std::size_t v, long acc) -> void {
        acc += g.weights[v];
        best = std::max(best, acc);
        for (std::size_t w : out[v]) self(self, w, acc);
    };
    for (std::size_t v = 0; v < g.n; ++v) walk(walk, v, 0);
    return best;
}

/// Longest path, in edges, ending at each vertex; again by walking every path.
inline std::vector<std::size_t> longest_path_depths(const SmallGraph& g) {
    std::vector<std::vector<std::size_t>> out(g.n);
    for (auto [u, v] : g.edges) out[u].push_back(v);
    std::vector<std::size_t> depth(g.n, 0);
    auto walk = [&](auto&& self, std::size_t v, std::size_t len) -> void {
        depth[v] = std::max(depth[v], len);
        for (std::size_t w : out[v]) self(self, w, len + 1);
    };
    for (std::size_t v = 0; v < g.n; ++v) walk(walk, v, 0);
    return depth;
}

/// Size of the biggest group of vertices sharing a longest-path depth.
inline std::size_t largest_layer(const SmallGraph& g) {
    const auto depth = longest_path_depths(g);
    std::vector<std::size_t> count(g.n + 1, 0);
    for (std::size_t d : depth) ++count[d];
    return *std::max_element(count.begin(), count.end());
}

/// Thresholds in exact units: theta_omega and theta_gamma in tenths.
struct IntThresholds {
    int omega_tenths = 5;
    int gamma_tenths = 6;
    std::size_t delta = 5;
};

/// The routing rule, line by line, on integer quantities:
///   no edges                                  -> Parallel
///   width 1                                   -> Sequential
///   gamma > theta_gamma and |V| > theta_delta -> Hierarchical
///   r > theta_omega and gamma <= theta_gamma  -> Parallel
///   otherwise                                 -> Hybrid
/// gamma = sum(c) / |E| > t / 10 becomes sum(c_tenths) > t * |E|;
/// r = width / |V| > t / 10 becomes 10 * width > t * |V|.
inline orchard::TopologyKind route_rule(std::size_t n, std::size_t edge_count, long coupling_tenths_sum,
                                        std::size_t width, const IntThresholds& t) {
    using orchard::TopologyKind;
    if (edge_count == 0) return TopologyKind::Parallel;
    if (width == 1) return TopologyKind::Sequential;
    const bool high = coupling_tenths_sum > static_cast<long>(t.gamma_tenths) * static_cast<long>(edge_count);
    if (high && n > t.delta) return TopologyKind::Hierarchical;
    const bool wide = static_cast<long>(width) * 10 > static_cast<long>(t.omega_tenths) * static_cast<long>(n);
    if (wide && !high) return TopologyKind::Parallel;
    return TopologyKind::Hybrid;
}

inline std::string vertex_name(std::size_t i) { return "v" + std::to_string(i); }

inline orchard::TaskDag to_dag(const SmallGraph& g) {
    orchard::DagDraft d;
    for (std::size_t i = 0; i < g.n; ++i)
        d.subtasks.push_back({vertex_name(i), "", g.weights.empty() ? 1.0 : double(g.weights[i]),
                              orchard::CouplingLevel::None});
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        const double c = g.coupling_tenths.empty() ? 0.0 : g.coupling_tenths[e] / 10.0;
        d.edges.push_back({vertex_name(g.edges[e].first), vertex_name(g.edges[e].second), c});
    }
    return orchard::TaskDag::build(std::move(d));
}

/// Inverse of to_dag for DAGs with integer weights and couplings in tenths.
inline SmallGraph from_dag(const orchard::TaskDag& dag) {
    SmallGraph g;
    g.n = dag.size();
    for (const auto& s : dag.subtasks()) g.weights.push_back(static_cast<int>(std::lround(s.weight)));
    for (const auto& e : dag.edges()) {
        g.edges.emplace_back(e.from, e.to);
        g.coupling_tenths.push_back(static_cast<int>(std::lround(e.coupling * 10)));
    }
    return g;
}

/// Random DAG on n vertices: pairs i < j of a shuffled labelling become edges
/// with probability p, so insertion order is not a topological order.
inline SmallGraph random_dag(std::size_t n, double p, std::mt19937_64& rng) {
    SmallGraph g;
    g.n = n;
    std::vector<std::size_t> label(n);
    for (std::size_t i = 0; i < n; ++i) label[i] = i;
    std::shuffle(label.begin(), label.end(), rng);
    std::bernoulli_distribution coin(p);
    std::uniform_int_distribution<int> weight(1, 9);
    static constexpr int kLevels[] = {0, 3, 7, 10};
    std::uniform_int_distribution<int> level(0, 3);
    for (std::size_t i = 0; i < n; ++i) g.weights.push_back(weight(rng));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (coin(rng)) {
                g.edges.emplace_back(label[i], label[j]);
                g.coupling_tenths.push_back(kLevels[level(rng)]);
            }
    return g;
}

}  // namespace oracle
