#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "orchard/error.hpp"

namespace orchard {

/// Declared context coupling between a subtask and its dependencies.
enum class CouplingLevel { None, Weak, Strong, Critical };

/// Numeric coupling strength for a declared level: 0.0, 0.3, 0.7, 1.0.
double coupling_from_label(CouplingLevel level) noexcept;

std::string_view to_string(CouplingLevel level) noexcept;

/// Accepts "none", "weak", "strong", "critical" (case-insensitive).
std::optional<CouplingLevel> parse_coupling_label(std::string_view label) noexcept;

struct Subtask {
    std::string id;
    std::string description;
    double weight = 1.0;  // estimated token cost
    CouplingLevel declared_coupling = CouplingLevel::None;

    bool operator==(const Subtask&) const = default;
};

struct EdgeSpec {
    std::string from;
    std::string to;
    double coupling = 0.0;

    bool operator==(const EdgeSpec&) const = default;
};

/// Unvalidated graph description. Anything goes here; validate_dag says what is wrong.
struct DagDraft {
    std::vector<Subtask> subtasks;
    std::vector<EdgeSpec> edges;
};

enum class ViolationKind {
    EmptyGraph,
    EmptyId,
    DuplicateId,
    NonPositiveWeight,
    DanglingEdge,
    SelfEdge,
    DuplicateEdge,
    CouplingOutOfRange,
    Cycle,
};

std::string_view to_string(ViolationKind kind) noexcept;

struct Violation {
    ViolationKind kind;
    std::string message;
    std::vector<std::string> witness;  // cycle path, first id repeated at the end
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const noexcept { return violations.empty(); }
    bool has(ViolationKind kind) const noexcept;
    std::string summary() const;
};

ValidationReport validate_dag(const DagDraft& draft);

class ValidationError : public Error {
public:
    explicit ValidationError(ValidationReport report);
    const ValidationReport& report() const noexcept { return report_; }

private:
    ValidationReport report_;
};

/// Dependency edge by vertex index. `from` must finish before `to` starts.
struct Edge {
    std::size_t from;
    std::size_t to;
    double coupling;

    bool operator==(const Edge&) const = default;
};

/// Validated, immutable task dependency DAG.
///
/// Vertices keep their insertion order; indices into `subtasks()` are the
/// vertex handles used by every graph algorithm in the library.
class TaskDag {
public:
    /// Throws ValidationError carrying the full report when the draft is invalid.
    static TaskDag build(DagDraft draft);

    std::size_t size() const noexcept { return subtasks_.size(); }
    std::size_t edge_count() const noexcept { return edges_.size(); }

    std::span<const Subtask> subtasks() const noexcept { return subtasks_; }
    std::span<const Edge> edges() const noexcept { return edges_; }
    const Subtask& subtask(std::size_t v) const { return subtasks_.at(v); }

    std::span<const std::size_t> successors(std::size_t v) const { return succ_.at(v); }
    std::span<const std::size_t> predecessors(std::size_t v) const { return pred_.at(v); }

    std::optional<std::size_t> index_of(std::string_view id) const;
    std::size_t require_index(std::string_view id) const;

    /// Coupling of edge (from, to); nullopt when the edge does not exist.
    std::optional<double> coupling(std::size_t from, std::size_t to) const;

    double total_weight() const noexcept;

    /// Kahn order with ties broken by insertion index.
    const std::vector<std::size_t>& topological_order() const noexcept { return topo_; }

    DagDraft to_draft() const;

    bool operator==(const TaskDag& other) const;

private:
    TaskDag() = default;

    std::vector<Subtask> subtasks_;
    std::vector<Edge> edges_;
    std::vector<std::vector<std::size_t>> succ_;
    std::vector<std::vector<std::size_t>> pred_;
    std::vector<std::size_t> topo_;
    std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace orchard
