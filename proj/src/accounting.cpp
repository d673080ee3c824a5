#include "orchard/accounting.hpp"

#include <cmath>
#include <cstdio>

#include "orchard/decomposition.hpp"
#include "orchard/error.hpp"

namespace orchard {

std::string format_usd(PicoUsd amount) {
    const bool negative = amount < 0;
    const std::int64_t micro = to_micro_usd(negative ? -amount : amount);
    char buf[48];
    std::snprintf(buf, sizeof buf, "%s$%lld.%06lld", negative ? "-" : "", static_cast<long long>(micro / 1'000'000),
                  static_cast<long long>(micro % 1'000'000));
    return buf;
}

std::int64_t to_micro_usd(PicoUsd amount) noexcept { return amount / kPicoPerMicro; }

std::string_view to_string(Phase phase) noexcept {
    switch (phase) {
        case Phase::Decompose: return "decompose";
        case Phase::Route: return "route";
        case Phase::Execute: return "execute";
        case Phase::Synthesize: return "synthesize";
    }
    return "execute";
}

Phase parse_phase(std::string_view text) {
    for (auto p : {Phase::Decompose, Phase::Route, Phase::Execute, Phase::Synthesize})
        if (to_string(p) == text) return p;
    throw ParseError("unknown phase '" + std::string(text) + "'");
}

CostLedger& CostLedger::record(const AgentOutput& output, Phase phase) {
    return append({output.backend, output.subtask_id, output.prompt_tokens, output.completion_tokens, phase});
}

CostLedger& CostLedger::append(LedgerEntry entry) {
    entries_.push_back(std::move(entry));
    return *this;
}

CostLedger& CostLedger::merge(const CostLedger& other) {
    entries_.insert(entries_.end(), other.entries_.begin(), other.entries_.end());
    return *this;
}

std::uint64_t CostLedger::prompt_tokens() const noexcept {
    std::uint64_t n = 0;
    for (auto& e : entries_) n += e.prompt_tokens;
    return n;
}

std::uint64_t CostLedger::completion_tokens() const noexcept {
    std::uint64_t n = 0;
    for (auto& e : entries_) n += e.completion_tokens;
    return n;
}

const PriceRow* Pricing::find(std::string_view model) const noexcept {
    if (auto it = rows.find(std::string(model)); it != rows.end()) return &it->second;
    for (auto& [name, row] : rows)
        for (auto& alias : row.aliases)
            if (alias == model) return &row;
    return nullptr;
}

const PriceRow& Pricing::lookup(const BackendIdentity& backend) const {
    if (auto* row = find(backend.model)) return *row;
    throw ConfigError("no pricing row for backend " + backend.label());
}

namespace {

std::int64_t micro_rate(const nlohmann::json& v, const std::string& where) {
    if (!v.is_number()) throw ConfigError("pricing rate " + where + " must be a number");
    const double dollars = v.get<double>();
    if (!(dollars >= 0.0) || !std::isfinite(dollars)) throw ConfigError("pricing rate " + where + " must be >= 0");
    return std::llround(dollars * 1e6);
}

}  // namespace

Pricing pricing_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ConfigError("pricing document must be an object");
    if (doc.value("schema_version", 1) != 1) throw ConfigError("unsupported pricing schema_version");
    Pricing p;
    if (!doc.contains("as_of") || !doc["as_of"].is_string()) throw ConfigError("pricing needs an as_of date");
    p.as_of = doc["as_of"].get<std::string>();
    p.currency = doc.value("currency", std::string("USD"));
    if (!doc.contains("models") || !doc["models"].is_object()) throw ConfigError("pricing needs a models object");
    for (auto& [name, row] : doc["models"].items()) {
        if (!row.is_object() || !row.contains("input_per_million") || !row.contains("output_per_million"))
            throw ConfigError("pricing row '" + name + "' needs input_per_million and output_per_million");
        PriceRow r;
        r.model = name;
        r.input_micro_per_million = micro_rate(row["input_per_million"], name + ".input_per_million");
        r.output_micro_per_million = micro_rate(row["output_per_million"], name + ".output_per_million");
        if (row.contains("aliases")) r.aliases = row["aliases"].get<std::vector<std::string>>();
        p.rows.emplace(name, std::move(r));
    }
    return p;
}

Pricing load_pricing(const std::filesystem::path& path) {
    try {
        return pricing_from_json(read_json_file(path));
    } catch (const ParseError& e) {
        throw ConfigError(e.what());
    }
}

nlohmann::json to_json(const Pricing& pricing) {
    nlohmann::json models = nlohmann::json::object();
    for (auto& [name, row] : pricing.rows) {
        models[name] = {{"input_per_million", static_cast<double>(row.input_micro_per_million) / 1e6},
                        {"output_per_million", static_cast<double>(row.output_micro_per_million) / 1e6},
                        {"aliases", row.aliases}};
    }
    return {{"schema_version", 1}, {"as_of", pricing.as_of}, {"currency", pricing.currency}, {"models", models}};
}

PicoUsd cost_of(const LedgerEntry& entry, const Pricing& pricing) {
    const auto& row = pricing.lookup(entry.backend);
    return static_cast<PicoUsd>(entry.prompt_tokens) * row.input_micro_per_million +
           static_cast<PicoUsd>(entry.completion_tokens) * row.output_micro_per_million;
}

PicoUsd cost_of(const CostLedger& ledger, const Pricing& pricing) {
    PicoUsd total = 0;
    for (auto& e : ledger.entries()) total += cost_of(e, pricing);
    return total;
}

nlohmann::json to_json(const CostLedger& ledger, const Pricing& pricing) {
    nlohmann::json entries = nlohmann::json::array();
    for (auto& e : ledger.entries()) {
        const PicoUsd cost = cost_of(e, pricing);
        entries.push_back({{"backend", e.backend.name},
                           {"model", e.backend.model},
                           {"subtask", e.subtask_id},
                           {"phase", to_string(e.phase)},
                           {"prompt_tokens", e.prompt_tokens},
                           {"completion_tokens", e.completion_tokens},
                           {"cost_pico_usd", cost},
                           {"cost_usd", format_usd(cost)}});
    }
    const PicoUsd total = cost_of(ledger, pricing);
    return {{"pricing_as_of", pricing.as_of},
            {"currency", pricing.currency},
            {"entries", entries},
            {"prompt_tokens", ledger.prompt_tokens()},
            {"completion_tokens", ledger.completion_tokens()},
            {"total_tokens", ledger.total_tokens()},
            {"total_cost_pico_usd", total},
            {"total_cost_usd", format_usd(total)}};
}

CostLedger ledger_from_json(const nlohmann::json& doc) {
    CostLedger ledger;
    try {
        for (auto& e : doc.at("entries")) {
            ledger.append({{e.at("backend").get<std::string>(), e.at("model").get<std::string>()},
                           e.value("subtask", std::string{}),
                           e.at("prompt_tokens").get<std::uint64_t>(),
                           e.at("completion_tokens").get<std::uint64_t>(),
                           parse_phase(e.at("phase").get<std::string>())});
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed ledger: ") + e.what());
    }
    return ledger;
}

RunReport make_report(const CostLedger& ledger, const Pricing& pricing, TopologyKind topology, int iterations,
                      std::chrono::nanoseconds wall_clock) {
    RunReport r;
    r.topology = topology;
    r.iterations = iterations;
    r.prompt_tokens = ledger.prompt_tokens();
    r.completion_tokens = ledger.completion_tokens();
    r.total_tokens = ledger.total_tokens();
    r.total_cost = cost_of(ledger, pricing);
    r.wall_clock = wall_clock;
    r.agent_calls = ledger.entries().size();
    for (auto& e : ledger.entries())
        r.tokens_by_phase[static_cast<std::size_t>(e.phase)] += e.prompt_tokens + e.completion_tokens;
    return r;
}

nlohmann::json to_json(const RunReport& r) {
    nlohmann::json phases = nlohmann::json::object();
    for (auto p : {Phase::Decompose, Phase::Route, Phase::Execute, Phase::Synthesize})
        phases[std::string(to_string(p))] = r.tokens_by_phase[static_cast<std::size_t>(p)];
    return {{"task_id", r.task_id},
            {"domain", r.domain},
            {"topology", to_string(r.topology)},
            {"iterations", r.iterations},
            {"converged", r.converged},
            {"escalated", r.escalated},
            {"prompt_tokens", r.prompt_tokens},
            {"completion_tokens", r.completion_tokens},
            {"total_tokens", r.total_tokens},
            {"total_cost_pico_usd", r.total_cost},
            {"total_cost_usd", format_usd(r.total_cost)},
            {"wall_clock_ms", std::chrono::duration<double, std::milli>(r.wall_clock).count()},
            {"agent_calls", r.agent_calls},
            {"tokens_by_phase", phases}};
}

RunReport report_from_json(const nlohmann::json& doc) {
    try {
        RunReport r;
        r.task_id = doc.value("task_id", std::string{});
        r.domain = doc.value("domain", std::string{});
        r.topology = parse_topology(doc.at("topology").get<std::string>());
        r.iterations = doc.value("iterations", 1);
        r.converged = doc.value("converged", true);
        r.escalated = doc.value("escalated", false);
        r.prompt_tokens = doc.value("prompt_tokens", std::uint64_t{0});
        r.completion_tokens = doc.value("completion_tokens", std::uint64_t{0});
        r.total_tokens = doc.value("total_tokens", r.prompt_tokens + r.completion_tokens);
        r.total_cost = doc.value("total_cost_pico_usd", PicoUsd{0});
        r.wall_clock = std::chrono::nanoseconds(
            static_cast<std::int64_t>(std::llround(doc.value("wall_clock_ms", 0.0) * 1e6)));
        r.agent_calls = doc.value("agent_calls", std::size_t{0});
        if (doc.contains("tokens_by_phase")) {
            for (auto p : {Phase::Decompose, Phase::Route, Phase::Execute, Phase::Synthesize})
                r.tokens_by_phase[static_cast<std::size_t>(p)] =
                    doc["tokens_by_phase"].value(std::string(to_string(p)), std::uint64_t{0});
        }
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed run report: ") + e.what());
    }
}

std::string reports_csv(std::span<const RunReport> reports) {
    std::string out =
        "task_id,domain,topology,iterations,converged,escalated,prompt_tokens,completion_tokens,total_tokens,"
        "total_cost_usd,wall_clock_ms,agent_calls\n";
    char buf[64];
    for (auto& r : reports) {
        std::snprintf(buf, sizeof buf, "%.3f", std::chrono::duration<double, std::milli>(r.wall_clock).count());
        out += r.task_id + "," + r.domain + "," + std::string(to_string(r.topology)) + "," +
               std::to_string(r.iterations) + "," + (r.converged ? "1" : "0") + "," + (r.escalated ? "1" : "0") +
               "," + std::to_string(r.prompt_tokens) + "," + std::to_string(r.completion_tokens) + "," +
               std::to_string(r.total_tokens) + "," + format_usd(r.total_cost).substr(1) + "," + buf + "," +
               std::to_string(r.agent_calls) + "\n";
    }
    return out;
}

DistributionTable topology_distribution(std::span<const RunReport> reports, std::span<const std::string> groups) {
    if (reports.empty()) throw ParameterError("topology distribution needs at least one report");
    if (groups.size() != reports.size()) throw ParameterError("one group label per report required");

    std::vector<std::string> order;
    std::map<std::string, std::array<std::size_t, 4>> counts;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        auto [it, inserted] = counts.try_emplace(groups[i]);
        if (inserted) order.push_back(groups[i]);
        ++it->second[topology_index(reports[i].topology)];
    }

    DistributionTable t;
    t.average.group = "Average";
    for (auto& g : order) {
        DistributionRow row;
        row.group = g;
        for (auto c : counts[g]) row.runs += c;
        for (std::size_t j = 0; j < 4; ++j)
            row.percent[j] = 100.0 * static_cast<double>(counts[g][j]) / static_cast<double>(row.runs);
        t.average.runs += row.runs;
        t.rows.push_back(row);
    }
    for (std::size_t j = 0; j < 4; ++j) {
        double sum = 0.0;
        for (auto& row : t.rows) sum += row.percent[j];
        t.average.percent[j] = sum / static_cast<double>(t.rows.size());
    }
    return t;
}

DistributionTable topology_distribution(std::span<const RunReport> reports) {
    std::vector<std::string> groups;
    groups.reserve(reports.size());
    for (auto& r : reports) groups.push_back(r.domain.empty() ? "all" : r.domain);
    return topology_distribution(reports, groups);
}

std::string DistributionTable::table() const {
    std::string out;
    char buf[128];
    std::snprintf(buf, sizeof buf, "%-16s%10s%12s%14s%10s\n", "Domain", "Parallel", "Sequential", "Hierarchical",
                  "Hybrid");
    out += buf;
    auto line = [&](const DistributionRow& r) {
        std::snprintf(buf, sizeof buf, "%-16s%10.1f%12.1f%14.1f%10.1f\n", r.group.c_str(), r.percent[0],
                      r.percent[1], r.percent[2], r.percent[3]);
        out += buf;
    };
    for (auto& r : rows) line(r);
    line(average);
    return out;
}

std::string DistributionTable::csv() const {
    std::string out = "group,runs,parallel,sequential,hierarchical,hybrid\n";
    char buf[160];
    auto line = [&](const DistributionRow& r) {
        std::snprintf(buf, sizeof buf, "%s,%zu,%.4f,%.4f,%.4f,%.4f\n", r.group.c_str(), r.runs, r.percent[0],
                      r.percent[1], r.percent[2], r.percent[3]);
        out += buf;
    };
    for (auto& r : rows) line(r);
    line(average);
    return out;
}

}  // namespace orchard
