#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "orchard/dag.hpp"

namespace orchard {

enum class ArchetypeKind { Chain, WideShallow, DeepNarrow, Diamond };

std::string_view to_string(ArchetypeKind kind) noexcept;
ArchetypeKind parse_archetype(std::string_view text);

struct DagArchetype {
    ArchetypeKind kind = ArchetypeKind::Chain;
    std::size_t size = 1;
    std::uint64_t seed = 0;
    /// When set every vertex gets this weight instead of a draw from [100, 2000].
    std::optional<double> uniform_weight;
};

/// Seeded synthetic DAG of the requested shape.
///
///   Chain        v0 -> v1 -> ... -> v(n-1)
///   WideShallow  v0 -> {v1 .. v(n-1)}
///   DeepNarrow   spine of ceil(n/2) vertices, the first floor(n/2) spine
///                vertices each carry one leaf side branch
///   Diamond      v0 -> {v1 .. v(n-2)} -> v(n-1), needs n >= 3
///
/// Each vertex draws a coupling label from {none, weak, strong, critical};
/// all of its incoming edges carry that label's value.
TaskDag generate_archetype(const DagArchetype& spec);

}  // namespace orchard
