#include "orchard/archetype.hpp"

#include <array>
#include <random>
#include <string>

namespace orchard {

std::string_view to_string(ArchetypeKind kind) noexcept {
    switch (kind) {
    case ArchetypeKind::Chain: return "chain";
    case ArchetypeKind::WideShallow: return "wide-shallow";
    case ArchetypeKind::DeepNarrow: return "deep-narrow";
    case ArchetypeKind::Diamond: return "diamond";
    }
    return "chain";
}

ArchetypeKind parse_archetype(std::string_view text) {
    if (text == "chain") return ArchetypeKind::Chain;
    if (text == "wide-shallow" || text == "wide_shallow" || text == "wide") return ArchetypeKind::WideShallow;
    if (text == "deep-narrow" || text == "deep_narrow" || text == "deep") return ArchetypeKind::DeepNarrow;
    if (text == "diamond") return ArchetypeKind::Diamond;
    throw ParseError("unknown archetype '" + std::string(text) +
                     "' (expected chain|wide-shallow|deep-narrow|diamond)");
}

TaskDag generate_archetype(const DagArchetype& spec) {
    if (spec.size < 1) throw ParameterError("archetype size must be at least 1");
    if (spec.kind == ArchetypeKind::Diamond && spec.size < 3)
        throw ParameterError("diamond archetype needs at least 3 vertices, got " + std::to_string(spec.size));
    if (spec.uniform_weight && !(*spec.uniform_weight > 0.0))
        throw ParameterError("uniform archetype weight must be positive");

    constexpr std::array kLevels{CouplingLevel::None, CouplingLevel::Weak, CouplingLevel::Strong,
                                 CouplingLevel::Critical};
    std::mt19937_64 rng(spec.seed);
    std::uniform_int_distribution<int> weight_dist(100, 2000);
    std::uniform_int_distribution<std::size_t> level_dist(0, kLevels.size() - 1);

    const std::size_t n = spec.size;
    DagDraft draft;
    draft.subtasks.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Subtask s;
        s.id = "v" + std::to_string(i);
        s.description = std::string(to_string(spec.kind)) + " subtask " + std::to_string(i);
        const int drawn = weight_dist(rng);
        s.weight = spec.uniform_weight ? *spec.uniform_weight : static_cast<double>(drawn);
        s.declared_coupling = kLevels[level_dist(rng)];
        draft.subtasks.push_back(std::move(s));
    }

    auto link = [&](std::size_t from, std::size_t to) {
        draft.edges.push_back({draft.subtasks[from].id, draft.subtasks[to].id,
                               coupling_from_label(draft.subtasks[to].declared_coupling)});
    };

    switch (spec.kind) {
    case ArchetypeKind::Chain:
        for (std::size_t i = 1; i < n; ++i) link(i - 1, i);
        break;
    case ArchetypeKind::WideShallow:
        for (std::size_t i = 1; i < n; ++i) link(0, i);
        break;
    case ArchetypeKind::DeepNarrow: {
        const std::size_t spine = (n + 1) / 2;
        for (std::size_t i = 1; i < spine; ++i) link(i - 1, i);
        for (std::size_t j = 0; spine + j < n; ++j) link(j, spine + j);
        break;
    }
    case ArchetypeKind::Diamond:
        for (std::size_t i = 1; i + 1 < n; ++i) {
            link(0, i);
            link(i, n - 1);
        }
        break;
    }

    return TaskDag::build(std::move(draft));
}

}  // namespace orchard
