#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "orchard/dag.hpp"

namespace orchard {

enum class WidthMode { Approximate, Exact };

std::string_view to_string(WidthMode mode) noexcept;
WidthMode parse_width_mode(std::string_view text);

struct DagMetrics {
    std::size_t width_exact = 1;   // equals width_approx when !width_is_exact
    std::size_t width_approx = 1;  // largest topological layer
    bool width_is_exact = false;
    double depth = 0.0;             // heaviest path, summed vertex weights
    double coupling_density = 0.0;  // mean edge coupling, 0 without edges
    double parallelism_ratio = 1.0;
    std::size_t vertex_count = 0;
    std::size_t edge_count = 0;
    double total_weight = 0.0;

    /// Width the router should use: exact when computed, else the layer bound.
    std::size_t width() const noexcept { return width_is_exact ? width_exact : width_approx; }
};

DagMetrics compute_metrics(const TaskDag& dag, WidthMode mode);

/// Longest-path (Mirsky) layering: sources in layer 0, each other vertex one
/// past its deepest predecessor. Vertex indices inside a layer ascend.
std::vector<std::vector<std::size_t>> topological_layers(const TaskDag& dag);

/// Same layering expressed as subtask ids.
std::vector<std::vector<std::string>> topological_layer_ids(const TaskDag& dag);

/// Layer index of every vertex under topological_layers.
std::vector<std::size_t> layer_of(const TaskDag& dag);

double critical_path_depth(const TaskDag& dag);
double coupling_density(const TaskDag& dag);

/// Reachability rows; bit v of row u is set when a non-empty path u -> v exists.
class TransitiveClosure {
public:
    explicit TransitiveClosure(const TaskDag& dag);

    bool reaches(std::size_t from, std::size_t to) const noexcept {
        return (rows_[from * words_ + to / 64] >> (to % 64)) & 1u;
    }
    std::size_t size() const noexcept { return n_; }

private:
    std::size_t n_ = 0;
    std::size_t words_ = 0;
    std::vector<std::uint64_t> rows_;
};

/// Maximum bipartite matching (Hopcroft-Karp). `adjacency[l]` lists the right
/// vertices adjacent to left vertex l. Returns the matching size.
std::size_t maximum_bipartite_matching(const std::vector<std::vector<std::size_t>>& adjacency,
                                       std::size_t right_count);

/// Maximum antichain size via Dilworth/König: |V| minus a maximum matching on
/// the split graph of the transitive closure.
std::size_t exact_width(const TaskDag& dag);

}  // namespace orchard
