#include "orchard/corpus.hpp"

#include <algorithm>
#include <cstdio>
#include <random>

#include "orchard/archetype.hpp"
#include "orchard/decomposition.hpp"
#include "orchard/error.hpp"
#include "orchard/runlog.hpp"

namespace orchard {

std::vector<CorpusTask> generate_corpus(const CorpusConfig& config) {
    if (config.min_size < 3 || config.max_size < config.min_size)
        throw ParameterError("corpus sizes need 3 <= min_size <= max_size");
    static constexpr ArchetypeKind kinds[] = {ArchetypeKind::Chain, ArchetypeKind::WideShallow,
                                              ArchetypeKind::DeepNarrow, ArchetypeKind::Diamond};
    std::mt19937_64 rng(config.seed);
    std::uniform_int_distribution<std::size_t> size(config.min_size, config.max_size);
    std::uniform_real_distribution<double> noise(-config.noise, config.noise);

    std::vector<CorpusTask> tasks;
    tasks.reserve(config.count);
    for (std::size_t i = 0; i < config.count; ++i) {
        const ArchetypeKind kind = kinds[i % 4];
        DagArchetype spec{kind, size(rng), rng(), std::nullopt};
        char id[32];
        std::snprintf(id, sizeof id, "task-%04zu", i);
        auto dag = generate_archetype(spec);
        auto scores = config.quality.qualities(compute_metrics(dag, WidthMode::Exact), 0.9);
        for (auto& s : scores) s += noise(rng);
        tasks.push_back({id, std::string(to_string(kind)), std::move(dag), scores});
    }
    return tasks;
}

nlohmann::json to_json(const CorpusTask& task) {
    nlohmann::json scores = nlohmann::json::object();
    for (auto kind : kAllTopologies) scores[std::string(to_string(kind))] = task.scores[topology_index(kind)];
    return {{"task_id", task.task_id}, {"domain", task.domain}, {"dag", serialize_canonical(task.dag)},
            {"scores", scores}};
}

CorpusTask corpus_task_from_json(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("dag") || !doc.contains("scores"))
        throw ParseError("corpus task needs 'dag' and 'scores'");
    CorpusTask t{doc.value("task_id", std::string{}), doc.value("domain", std::string{}),
                 load_dag_document(doc["dag"]).dag, {}};
    const auto& scores = doc["scores"];
    for (auto kind : kAllTopologies) {
        const std::string key(to_string(kind));
        if (!scores.contains(key) || !scores[key].is_number())
            throw ParseError("corpus task '" + t.task_id + "' lacks a score for " + key);
        t.scores[topology_index(kind)] = scores[key].get<double>();
    }
    return t;
}

void write_corpus(const std::vector<CorpusTask>& tasks, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    for (auto& t : tasks) write_json_atomic(dir / (t.task_id + ".json"), to_json(t));
}

std::vector<CorpusTask> load_corpus(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw ConfigError("task directory not found: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (auto& e : std::filesystem::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::vector<CorpusTask> tasks;
    tasks.reserve(files.size());
    for (auto& f : files) {
        auto t = corpus_task_from_json(read_json_file(f));
        if (t.task_id.empty()) t.task_id = f.stem().string();
        tasks.push_back(std::move(t));
    }
    return tasks;
}

}  // namespace orchard
