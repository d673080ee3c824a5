#include "orchard/runlog.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "orchard/error.hpp"

namespace orchard {

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    static std::atomic<unsigned> counter{0};
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw Error("short write to " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error("cannot replace " + path.string());
    }
}

void write_json_atomic(const std::filesystem::path& path, const nlohmann::json& doc) {
    write_file_atomic(path, doc.dump(2) + "\n");
}

namespace {

nlohmann::json header(std::string_view kind, const std::string& task_id) {
    return {{"schema_version", kRunLogSchemaVersion}, {"kind", kind}, {"task_id", task_id}};
}

}  // namespace

nlohmann::json routing_record(const std::string& task_id, const RoutingDecision& decision) {
    auto r = header("routing", task_id);
    r["decision"] = to_json(decision);
    return r;
}

nlohmann::json synthesis_record(const std::string& task_id, const SynthesisResult& result) {
    auto r = header("synthesis", task_id);
    r["iterations"] = result.iterations;
    r["consistency"] = result.consistency;
    r["escalated"] = result.escalated;
    r["converged"] = result.converged;
    auto& trail = r["route_trail"] = nlohmann::json::array();
    for (auto& s : result.route_trail) trail.push_back({{"gamma", s.gamma}, {"topology", to_string(s.topology)}});
    return r;
}

nlohmann::json run_record(const RunReport& report) {
    auto r = header("run", report.task_id);
    r["report"] = to_json(report);
    return r;
}

nlohmann::json oracle_record(const std::string& task_id, TopologyKind router, const OracleResult& oracle) {
    auto r = header("oracle", task_id);
    r["router"] = to_string(router);
    r["oracle"] = to_string(oracle.best);
    nlohmann::json scores = nlohmann::json::object();
    for (auto kind : kAllTopologies) scores[std::string(to_string(kind))] = oracle.scores[topology_index(kind)];
    r["scores"] = scores;
    return r;
}

RunLog::RunLog(std::filesystem::path path) : path_(std::move(path)) {}

void RunLog::append(nlohmann::json record) { pending_.push_back(std::move(record)); }

void RunLog::flush() {
    std::string content;
    if (std::ifstream in(path_, std::ios::binary); in) {
        std::ostringstream existing;
        existing << in.rdbuf();
        content = existing.str();
        if (!content.empty() && content.back() != '\n') content += '\n';
    }
    for (auto& r : pending_) content += r.dump() + "\n";
    write_file_atomic(path_, content);
    pending_.clear();
}

void read_log_file(const std::filesystem::path& file, LogScan& scan) {
    std::ifstream in(file);
    if (!in) throw Error("cannot read " + file.string());
    ++scan.files;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto doc = nlohmann::json::parse(line, nullptr, false);
        if (doc.is_discarded() || !doc.is_object() || doc.value("schema_version", 0) != kRunLogSchemaVersion ||
            !doc.contains("kind") || !doc["kind"].is_string()) {
            ++scan.skipped;
            continue;
        }
        scan.records.push_back(std::move(doc));
    }
}

LogScan read_log_dir(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw ConfigError("log directory not found: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (auto& entry : std::filesystem::recursive_directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".jsonl") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    LogScan scan;
    for (auto& f : files) read_log_file(f, scan);
    return scan;
}

}  // namespace orchard
