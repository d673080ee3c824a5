#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "orchard/accounting.hpp"
#include "orchard/oracle.hpp"
#include "orchard/router.hpp"
#include "orchard/synthesis.hpp"

namespace orchard {

/// Run log records are JSON objects, one per line, each carrying
/// "schema_version" and "kind" (routing | synthesis | run | oracle) plus a
/// "task_id". See docs/runlog.md for the fields of each kind.
inline constexpr int kRunLogSchemaVersion = 1;

/// Writes `content` to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Pretty-printed JSON with a trailing newline, written atomically.
void write_json_atomic(const std::filesystem::path& path, const nlohmann::json& doc);

nlohmann::json routing_record(const std::string& task_id, const RoutingDecision& decision);
nlohmann::json synthesis_record(const std::string& task_id, const SynthesisResult& result);
nlohmann::json run_record(const RunReport& report);
nlohmann::json oracle_record(const std::string& task_id, TopologyKind router, const OracleResult& oracle);

/// Collects records in memory; flush() rewrites the whole file atomically,
/// keeping any lines already on disk in front.
class RunLog {
public:
    explicit RunLog(std::filesystem::path path);
    void append(nlohmann::json record);
    void flush();
    const std::vector<nlohmann::json>& pending() const noexcept { return pending_; }
    const std::filesystem::path& path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
    std::vector<nlohmann::json> pending_;
};

struct LogScan {
    std::vector<nlohmann::json> records;  // file name order, then line order
    std::size_t files = 0;
    std::size_t skipped = 0;  // unparsable lines, non-objects, unknown schema
};

/// Reads every *.jsonl file under `dir` (recursively).
LogScan read_log_dir(const std::filesystem::path& dir);
/// Reads one JSONL file into `scan`.
void read_log_file(const std::filesystem::path& file, LogScan& scan);

}  // namespace orchard
