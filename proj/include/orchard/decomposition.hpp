#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "orchard/dag.hpp"

namespace orchard {

inline constexpr double kDefaultEstimatedTokens = 500.0;
inline constexpr const char* kCanonicalDagFormat = "orchard-dag";

struct ParsedDag {
    TaskDag dag;
    std::vector<std::string> warnings;  // e.g. defaulted estimated_tokens
};

/// Ingests decomposer output: a JSON array of records
/// {"id", "description", "depends_on", "coupling", "estimated_tokens"}.
///
/// One vertex per record and one edge per (dependency, id) pair. Every edge
/// into a record carries that record's coupling label. A missing
/// estimated_tokens defaults to 500 and is reported in `warnings`.
///
/// Throws ParseError for malformed records or unknown dependencies and
/// ValidationError when the resulting graph is not a DAG.
ParsedDag parse_decomposition(const nlohmann::json& records);

/// Canonical form: explicit per-edge couplings, raw reals in [0,1] allowed.
TaskDag parse_canonical(const nlohmann::json& doc);
nlohmann::json serialize_canonical(const TaskDag& dag);

/// Decomposer-record form of a DAG. Only possible when every edge into a
/// vertex carries that vertex's declared label value; nullopt otherwise.
std::optional<nlohmann::json> to_decomposition_records(const TaskDag& dag);

/// Accepts either form: arrays are decomposer records, objects are canonical.
ParsedDag load_dag_document(const nlohmann::json& doc);
ParsedDag load_dag_file(const std::filesystem::path& path);

/// Reads and parses a JSON file, throwing ParseError with the path on failure.
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace orchard
