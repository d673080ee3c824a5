#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "orchard/calibration.hpp"
#include "orchard/convergence.hpp"

namespace orchard {

/// One task of a synthetic benchmark: a DAG plus a measured quality for each
/// topology.
struct CorpusTask {
    std::string task_id;
    std::string domain;
    TaskDag dag;
    TopologyScores scores{};
};

struct CorpusConfig {
    std::size_t count = 500;
    std::uint64_t seed = 42;
    std::size_t min_size = 3;
    std::size_t max_size = 10;
    double noise = 0.02;  // half-width of uniform noise added to each score
    QualityModel quality;
};

/// Archetypes cycle chain, wide-shallow, deep-narrow, diamond; each task
/// draws its size and archetype seed from one generator seeded with `seed`.
/// Scores are the quality model at base 0.9 plus uniform noise.
std::vector<CorpusTask> generate_corpus(const CorpusConfig& config);

/// File layout: { "task_id", "domain", "dag": <canonical dag>,
///                "scores": { "Parallel": q, "Sequential": q, ... } }
nlohmann::json to_json(const CorpusTask& task);
CorpusTask corpus_task_from_json(const nlohmann::json& doc);

/// Writes <dir>/<task_id>.json for every task.
void write_corpus(const std::vector<CorpusTask>& tasks, const std::filesystem::path& dir);
/// Reads every *.json in `dir`, in file name order.
std::vector<CorpusTask> load_corpus(const std::filesystem::path& dir);

}  // namespace orchard
