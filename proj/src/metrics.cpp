#include "orchard/metrics.hpp"

#include <algorithm>
#include <limits>
#include <queue>

namespace orchard {

std::string_view to_string(WidthMode mode) noexcept {
    return mode == WidthMode::Exact ? "exact" : "approximate";
}

WidthMode parse_width_mode(std::string_view text) {
    if (text == "exact") return WidthMode::Exact;
    if (text == "approximate" || text == "approx") return WidthMode::Approximate;
    throw ParseError("unknown width mode '" + std::string(text) + "' (expected exact|approximate)");
}

std::vector<std::size_t> layer_of(const TaskDag& dag) {
    std::vector<std::size_t> layer(dag.size(), 0);
    for (std::size_t u : dag.topological_order())
        for (std::size_t v : dag.successors(u)) layer[v] = std::max(layer[v], layer[u] + 1);
    return layer;
}

std::vector<std::vector<std::size_t>> topological_layers(const TaskDag& dag) {
    const auto layer = layer_of(dag);
    std::vector<std::vector<std::size_t>> layers;
    for (std::size_t v = 0; v < dag.size(); ++v) {
        if (layer[v] >= layers.size()) layers.resize(layer[v] + 1);
        layers[layer[v]].push_back(v);
    }
    return layers;
}

std::vector<std::vector<std::string>> topological_layer_ids(const TaskDag& dag) {
    std::vector<std::vector<std::string>> out;
    for (const auto& layer : topological_layers(dag)) {
        auto& ids = out.emplace_back();
        for (std::size_t v : layer) ids.push_back(dag.subtask(v).id);
    }
    return out;
}

double critical_path_depth(const TaskDag& dag) {
    std::vector<double> finish(dag.size(), 0.0);
    double depth = 0.0;
    for (std::size_t u : dag.topological_order()) {
        double start = 0.0;
        for (std::size_t p : dag.predecessors(u)) start = std::max(start, finish[p]);
        finish[u] = start + dag.subtask(u).weight;
        depth = std::max(depth, finish[u]);
    }
    return depth;
}

double coupling_density(const TaskDag& dag) {
    if (dag.edge_count() == 0) return 0.0;
    double sum = 0.0;
    for (const Edge& e : dag.edges()) sum += e.coupling;
    return sum / static_cast<double>(dag.edge_count());
}

TransitiveClosure::TransitiveClosure(const TaskDag& dag)
    : n_(dag.size()), words_((dag.size() + 63) / 64), rows_(n_ * words_, 0) {
    // Reverse topological sweep: a row is the union of successor rows plus the successors.
    const auto& order = dag.topological_order();
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const std::size_t u = *it;
        std::uint64_t* row = &rows_[u * words_];
        for (std::size_t v : dag.successors(u)) {
            row[v / 64] |= std::uint64_t{1} << (v % 64);
            const std::uint64_t* child = &rows_[v * words_];
            for (std::size_t w = 0; w < words_; ++w) row[w] |= child[w];
        }
    }
}

std::size_t maximum_bipartite_matching(const std::vector<std::vector<std::size_t>>& adjacency,
                                       std::size_t right_count) {
    constexpr std::size_t kFree = std::numeric_limits<std::size_t>::max();
    constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max();
    const std::size_t left_count = adjacency.size();
    std::vector<std::size_t> match_left(left_count, kFree), match_right(right_count, kFree);
    std::vector<std::size_t> dist(left_count);

    auto bfs = [&]() {
        std::queue<std::size_t> queue;
        bool found = false;
        for (std::size_t l = 0; l < left_count; ++l) {
            if (match_left[l] == kFree) {
                dist[l] = 0;
                queue.push(l);
            } else {
                dist[l] = kInf;
            }
        }
        while (!queue.empty()) {
            std::size_t l = queue.front();
            queue.pop();
            for (std::size_t r : adjacency[l]) {
                std::size_t next = match_right[r];
                if (next == kFree) {
                    found = true;
                } else if (dist[next] == kInf) {
                    dist[next] = dist[l] + 1;
                    queue.push(next);
                }
            }
        }
        return found;
    };

    auto dfs = [&](auto& self, std::size_t l) -> bool {
        for (std::size_t r : adjacency[l]) {
            std::size_t next = match_right[r];
            if (next == kFree || (dist[next] == dist[l] + 1 && self(self, next))) {
                match_left[l] = r;
                match_right[r] = l;
                return true;
            }
        }
        dist[l] = kInf;
        return false;
    };

    std::size_t matching = 0;
    while (bfs()) {
        for (std::size_t l = 0; l < left_count; ++l)
            if (match_left[l] == kFree && dfs(dfs, l)) ++matching;
    }
    return matching;
}

std::size_t exact_width(const TaskDag& dag) {
    if (dag.size() == 0) return 0;
    TransitiveClosure closure(dag);
    std::vector<std::vector<std::size_t>> adjacency(dag.size());
    for (std::size_t u = 0; u < dag.size(); ++u)
        for (std::size_t v = 0; v < dag.size(); ++v)
            if (closure.reaches(u, v)) adjacency[u].push_back(v);
    return dag.size() - maximum_bipartite_matching(adjacency, dag.size());
}

DagMetrics compute_metrics(const TaskDag& dag, WidthMode mode) {
    DagMetrics m;
    m.vertex_count = dag.size();
    m.edge_count = dag.edge_count();
    m.total_weight = dag.total_weight();
    m.depth = critical_path_depth(dag);
    m.coupling_density = coupling_density(dag);

    std::size_t widest = 0;
    for (const auto& layer : topological_layers(dag)) widest = std::max(widest, layer.size());
    m.width_approx = widest;
    if (mode == WidthMode::Exact) {
        m.width_exact = exact_width(dag);
        m.width_is_exact = true;
    } else {
        m.width_exact = widest;
        m.width_is_exact = false;
    }
    m.parallelism_ratio = m.vertex_count == 0
                              ? 0.0
                              : static_cast<double>(m.width()) / static_cast<double>(m.vertex_count);
    return m;
}

}  // namespace orchard
