#include "orchard/dag.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <queue>
#include <set>
#include <sstream>
#include <tuple>
#include <utility>

namespace orchard {

double coupling_from_label(CouplingLevel level) noexcept {
    switch (level) {
    case CouplingLevel::None: return 0.0;
    case CouplingLevel::Weak: return 0.3;
    case CouplingLevel::Strong: return 0.7;
    case CouplingLevel::Critical: return 1.0;
    }
    return 0.0;
}

std::string_view to_string(CouplingLevel level) noexcept {
    switch (level) {
    case CouplingLevel::None: return "none";
    case CouplingLevel::Weak: return "weak";
    case CouplingLevel::Strong: return "strong";
    case CouplingLevel::Critical: return "critical";
    }
    return "none";
}

std::optional<CouplingLevel> parse_coupling_label(std::string_view label) noexcept {
    std::string lower(label);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "none") return CouplingLevel::None;
    if (lower == "weak") return CouplingLevel::Weak;
    if (lower == "strong") return CouplingLevel::Strong;
    if (lower == "critical") return CouplingLevel::Critical;
    return std::nullopt;
}

std::string_view to_string(ViolationKind kind) noexcept {
    switch (kind) {
    case ViolationKind::EmptyGraph: return "empty-graph";
    case ViolationKind::EmptyId: return "empty-id";
    case ViolationKind::DuplicateId: return "duplicate-id";
    case ViolationKind::NonPositiveWeight: return "non-positive-weight";
    case ViolationKind::DanglingEdge: return "dangling-edge";
    case ViolationKind::SelfEdge: return "self-edge";
    case ViolationKind::DuplicateEdge: return "duplicate-edge";
    case ViolationKind::CouplingOutOfRange: return "coupling-out-of-range";
    case ViolationKind::Cycle: return "cycle";
    }
    return "unknown";
}

bool ValidationReport::has(ViolationKind kind) const noexcept {
    return std::any_of(violations.begin(), violations.end(),
                       [kind](const Violation& v) { return v.kind == kind; });
}

std::string ValidationReport::summary() const {
    if (ok()) return "ok";
    std::ostringstream out;
    for (std::size_t i = 0; i < violations.size(); ++i) {
        if (i) out << '\n';
        out << to_string(violations[i].kind) << ": " << violations[i].message;
    }
    return out.str();
}

ValidationError::ValidationError(ValidationReport report)
    : Error("invalid task DAG:\n" + report.summary()), report_(std::move(report)) {}

namespace {

std::string join_path(const std::vector<std::string>& ids) {
    std::string out;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i) out += " -> ";
        out += ids[i];
    }
    return out;
}

// Reports one witness cycle per back edge found by a DFS over the usable edges.
void find_cycles(const std::vector<Subtask>& subtasks,
                 const std::vector<std::vector<std::size_t>>& succ,
                 std::vector<Violation>& out) {
    enum class Mark { White, Grey, Black };
    const std::size_t n = subtasks.size();
    std::vector<Mark> mark(n, Mark::White);
    std::vector<std::size_t> stack;

    std::function<void(std::size_t)> visit = [&](std::size_t u) {
        mark[u] = Mark::Grey;
        stack.push_back(u);
        for (std::size_t v : succ[u]) {
            if (mark[v] == Mark::Grey) {
                auto start = std::find(stack.begin(), stack.end(), v);
                Violation viol{ViolationKind::Cycle, {}, {}};
                for (auto it = start; it != stack.end(); ++it)
                    viol.witness.push_back(subtasks[*it].id);
                viol.witness.push_back(subtasks[v].id);
                viol.message = "cycle " + join_path(viol.witness);
                out.push_back(std::move(viol));
            } else if (mark[v] == Mark::White) {
                visit(v);
            }
        }
        stack.pop_back();
        mark[u] = Mark::Black;
    };
    for (std::size_t u = 0; u < n; ++u)
        if (mark[u] == Mark::White) visit(u);
}

}  // namespace

ValidationReport validate_dag(const DagDraft& draft) {
    ValidationReport report;
    auto& out = report.violations;

    if (draft.subtasks.empty())
        out.push_back({ViolationKind::EmptyGraph, "graph has no subtasks", {}});

    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < draft.subtasks.size(); ++i) {
        const Subtask& s = draft.subtasks[i];
        if (s.id.empty()) {
            out.push_back({ViolationKind::EmptyId, "subtask #" + std::to_string(i) + " has an empty id", {}});
        } else if (!index.emplace(s.id, i).second) {
            out.push_back({ViolationKind::DuplicateId, "duplicate subtask id '" + s.id + "'", {}});
        }
        if (!(s.weight > 0.0) || !std::isfinite(s.weight)) {
            out.push_back({ViolationKind::NonPositiveWeight,
                           "subtask '" + s.id + "' has weight " + std::to_string(s.weight), {}});
        }
    }

    std::vector<std::vector<std::size_t>> succ(draft.subtasks.size());
    std::set<std::pair<std::string, std::string>> seen;
    for (const EdgeSpec& e : draft.edges) {
        const std::string name = e.from + " -> " + e.to;
        if (!(e.coupling >= 0.0 && e.coupling <= 1.0)) {
            std::ostringstream msg;
            msg << "edge " << name << " has coupling " << e.coupling << " outside [0,1]";
            out.push_back({ViolationKind::CouplingOutOfRange, msg.str(), {}});
        }
        auto from = index.find(e.from);
        auto to = index.find(e.to);
        if (from == index.end() || to == index.end()) {
            const std::string& missing = from == index.end() ? e.from : e.to;
            out.push_back({ViolationKind::DanglingEdge,
                           "edge " + name + " references unknown subtask '" + missing + "'", {}});
            continue;
        }
        if (e.from == e.to) {
            out.push_back({ViolationKind::SelfEdge, "self edge on '" + e.from + "'", {}});
            continue;
        }
        if (!seen.emplace(e.from, e.to).second) {
            out.push_back({ViolationKind::DuplicateEdge, "duplicate edge " + name, {}});
            continue;
        }
        succ[from->second].push_back(to->second);
    }

    find_cycles(draft.subtasks, succ, out);
    return report;
}

TaskDag TaskDag::build(DagDraft draft) {
    ValidationReport report = validate_dag(draft);
    if (!report.ok()) throw ValidationError(std::move(report));

    TaskDag dag;
    dag.subtasks_ = std::move(draft.subtasks);
    const std::size_t n = dag.subtasks_.size();
    for (std::size_t i = 0; i < n; ++i) dag.index_.emplace(dag.subtasks_[i].id, i);

    dag.succ_.resize(n);
    dag.pred_.resize(n);
    dag.edges_.reserve(draft.edges.size());
    for (const EdgeSpec& e : draft.edges) {
        Edge edge{dag.index_.at(e.from), dag.index_.at(e.to), e.coupling};
        dag.succ_[edge.from].push_back(edge.to);
        dag.pred_[edge.to].push_back(edge.from);
        dag.edges_.push_back(edge);
    }

    std::vector<std::size_t> indegree(n);
    for (std::size_t v = 0; v < n; ++v) indegree[v] = dag.pred_[v].size();
    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
    for (std::size_t v = 0; v < n; ++v)
        if (indegree[v] == 0) ready.push(v);
    while (!ready.empty()) {
        std::size_t u = ready.top();
        ready.pop();
        dag.topo_.push_back(u);
        for (std::size_t v : dag.succ_[u])
            if (--indegree[v] == 0) ready.push(v);
    }
    return dag;
}

std::optional<std::size_t> TaskDag::index_of(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::size_t TaskDag::require_index(std::string_view id) const {
    auto idx = index_of(id);
    if (!idx) throw ParameterError("unknown subtask id '" + std::string(id) + "'");
    return *idx;
}

std::optional<double> TaskDag::coupling(std::size_t from, std::size_t to) const {
    for (const Edge& e : edges_)
        if (e.from == from && e.to == to) return e.coupling;
    return std::nullopt;
}

double TaskDag::total_weight() const noexcept {
    double sum = 0.0;
    for (const Subtask& s : subtasks_) sum += s.weight;
    return sum;
}

DagDraft TaskDag::to_draft() const {
    DagDraft draft;
    draft.subtasks = subtasks_;
    draft.edges.reserve(edges_.size());
    for (const Edge& e : edges_)
        draft.edges.push_back({subtasks_[e.from].id, subtasks_[e.to].id, e.coupling});
    return draft;
}

// Same vertices in the same order and the same edge set; edge order is ignored.
bool TaskDag::operator==(const TaskDag& other) const {
    if (subtasks_ != other.subtasks_ || edges_.size() != other.edges_.size()) return false;
    auto sorted = [](std::vector<Edge> edges) {
        std::sort(edges.begin(), edges.end(),
                  [](const Edge& a, const Edge& b) { return std::tie(a.from, a.to) < std::tie(b.from, b.to); });
        return edges;
    };
    return sorted(edges_) == sorted(other.edges_);
}

}  // namespace orchard
