#include "orchard/decomposition.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace orchard {

using nlohmann::json;

namespace {

std::string record_name(const json& record, std::size_t position) {
    if (record.is_object() && record.contains("id") && record["id"].is_string())
        return "record '" + record["id"].get<std::string>() + "'";
    return "record #" + std::to_string(position);
}

const json& require_field(const json& record, const char* field, const std::string& name) {
    if (!record.contains(field)) throw ParseError(name + ": missing field '" + field + "'");
    return record[field];
}

std::string require_string(const json& record, const char* field, const std::string& name) {
    const json& value = require_field(record, field, name);
    if (!value.is_string()) throw ParseError(name + ": field '" + field + "' must be a string");
    return value.get<std::string>();
}

CouplingLevel require_label(const json& value, const std::string& name) {
    if (!value.is_string()) throw ParseError(name + ": field 'coupling' must be a string label");
    auto level = parse_coupling_label(value.get<std::string>());
    if (!level)
        throw ParseError(name + ": unknown coupling label '" + value.get<std::string>() +
                         "' (expected none|weak|strong|critical)");
    return *level;
}

}  // namespace

ParsedDag parse_decomposition(const json& records) {
    if (!records.is_array()) throw ParseError("decomposition must be a JSON array of records");

    std::vector<std::string> warnings;
    DagDraft draft;
    std::vector<std::vector<std::string>> deps;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const json& record = records[i];
        const std::string name = record_name(record, i);
        if (!record.is_object()) throw ParseError(name + ": expected an object");

        Subtask s;
        s.id = require_string(record, "id", name);
        s.description = require_string(record, "description", name);
        s.declared_coupling = require_label(require_field(record, "coupling", name), name);

        const json& depends = require_field(record, "depends_on", name);
        if (!depends.is_array()) throw ParseError(name + ": field 'depends_on' must be an array");
        auto& record_deps = deps.emplace_back();
        for (const json& d : depends) {
            if (!d.is_string()) throw ParseError(name + ": depends_on entries must be strings");
            record_deps.push_back(d.get<std::string>());
        }

        if (record.contains("estimated_tokens") && !record["estimated_tokens"].is_null()) {
            const json& tokens = record["estimated_tokens"];
            if (!tokens.is_number()) throw ParseError(name + ": field 'estimated_tokens' must be a number");
            s.weight = tokens.get<double>();
        } else {
            s.weight = kDefaultEstimatedTokens;
            warnings.push_back(name + ": estimated_tokens missing, defaulted to 500");
        }
        draft.subtasks.push_back(std::move(s));
    }

    std::unordered_set<std::string> ids;
    for (const Subtask& s : draft.subtasks) ids.insert(s.id);
    for (std::size_t i = 0; i < draft.subtasks.size(); ++i) {
        const Subtask& s = draft.subtasks[i];
        for (const std::string& dep : deps[i]) {
            if (!ids.count(dep))
                throw ParseError("record '" + s.id + "': depends_on references unknown id '" + dep + "'");
            draft.edges.push_back({dep, s.id, coupling_from_label(s.declared_coupling)});
        }
    }
    return {TaskDag::build(std::move(draft)), std::move(warnings)};
}

TaskDag parse_canonical(const json& doc) {
    if (!doc.is_object()) throw ParseError("canonical DAG must be a JSON object");
    if (doc.value("format", std::string{}) != kCanonicalDagFormat)
        throw ParseError(std::string("canonical DAG must declare \"format\": \"") + kCanonicalDagFormat + "\"");
    if (!doc.contains("subtasks") || !doc["subtasks"].is_array())
        throw ParseError("canonical DAG: 'subtasks' must be an array");

    DagDraft draft;
    const json& subtasks = doc["subtasks"];
    for (std::size_t i = 0; i < subtasks.size(); ++i) {
        const json& item = subtasks[i];
        const std::string name = "subtask " + record_name(item, i).substr(7);
        if (!item.is_object()) throw ParseError(name + ": expected an object");
        Subtask s;
        s.id = require_string(item, "id", name);
        s.description = item.value("description", std::string{});
        const json& weight = require_field(item, "weight", name);
        if (!weight.is_number()) throw ParseError(name + ": field 'weight' must be a number");
        s.weight = weight.get<double>();
        s.declared_coupling =
            item.contains("coupling") ? require_label(item["coupling"], name) : CouplingLevel::None;
        draft.subtasks.push_back(std::move(s));
    }

    if (doc.contains("edges")) {
        const json& edges = doc["edges"];
        if (!edges.is_array()) throw ParseError("canonical DAG: 'edges' must be an array");
        for (std::size_t i = 0; i < edges.size(); ++i) {
            const json& item = edges[i];
            const std::string name = "edge #" + std::to_string(i);
            if (!item.is_object()) throw ParseError(name + ": expected an object");
            const json& coupling = require_field(item, "coupling", name);
            if (!coupling.is_number()) throw ParseError(name + ": field 'coupling' must be a number");
            draft.edges.push_back(
                {require_string(item, "from", name), require_string(item, "to", name), coupling.get<double>()});
        }
    }
    return TaskDag::build(std::move(draft));
}

json serialize_canonical(const TaskDag& dag) {
    json subtasks = json::array();
    for (const Subtask& s : dag.subtasks()) {
        subtasks.push_back({{"id", s.id},
                            {"description", s.description},
                            {"weight", s.weight},
                            {"coupling", std::string(to_string(s.declared_coupling))}});
    }
    json edges = json::array();
    for (const Edge& e : dag.edges()) {
        edges.push_back({{"from", dag.subtask(e.from).id}, {"to", dag.subtask(e.to).id}, {"coupling", e.coupling}});
    }
    return {{"format", kCanonicalDagFormat}, {"version", 1}, {"subtasks", subtasks}, {"edges", edges}};
}

std::optional<json> to_decomposition_records(const TaskDag& dag) {
    json records = json::array();
    for (std::size_t v = 0; v < dag.size(); ++v) {
        const Subtask& s = dag.subtask(v);
        const double label_value = coupling_from_label(s.declared_coupling);
        json depends = json::array();
        for (std::size_t p : dag.predecessors(v)) {
            if (*dag.coupling(p, v) != label_value) return std::nullopt;
            depends.push_back(dag.subtask(p).id);
        }
        records.push_back({{"id", s.id},
                           {"description", s.description},
                           {"depends_on", depends},
                           {"coupling", std::string(to_string(s.declared_coupling))},
                           {"estimated_tokens", s.weight}});
    }
    return records;
}

ParsedDag load_dag_document(const json& doc) {
    if (doc.is_array()) return parse_decomposition(doc);
    if (doc.is_object()) return {parse_canonical(doc), {}};
    throw ParseError("DAG document must be an array of decomposer records or a canonical object");
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

ParsedDag load_dag_file(const std::filesystem::path& path) {
    return load_dag_document(read_json_file(path));
}

}  // namespace orchard
