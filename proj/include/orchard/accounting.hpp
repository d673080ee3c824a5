#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "orchard/backend.hpp"
#include "orchard/router.hpp"

namespace orchard {

/// Money in pico-dollars. A rate of R dollars per million tokens is R * 1e6
/// pico-dollars per token, so per-entry cost is an exact integer product.
using PicoUsd = std::int64_t;

inline constexpr PicoUsd kPicoPerMicro = 1'000'000;

/// "$0.150000": dollars with six decimals, truncated toward zero below a micro-dollar.
std::string format_usd(PicoUsd amount);
/// Whole micro-dollars, truncated.
std::int64_t to_micro_usd(PicoUsd amount) noexcept;

enum class Phase { Decompose, Route, Execute, Synthesize };

std::string_view to_string(Phase phase) noexcept;
Phase parse_phase(std::string_view text);

struct LedgerEntry {
    BackendIdentity backend;
    std::string subtask_id;
    std::uint64_t prompt_tokens = 0;
    std::uint64_t completion_tokens = 0;
    Phase phase = Phase::Execute;

    bool operator==(const LedgerEntry&) const = default;
};

/// Append-only record of every agent call in one run.
class CostLedger {
public:
    /// Appends the output's reported counts unchanged.
    CostLedger& record(const AgentOutput& output, Phase phase);
    CostLedger& append(LedgerEntry entry);
    /// Appends every entry of `other` after this ledger's own.
    CostLedger& merge(const CostLedger& other);

    const std::vector<LedgerEntry>& entries() const noexcept { return entries_; }
    std::uint64_t prompt_tokens() const noexcept;
    std::uint64_t completion_tokens() const noexcept;
    std::uint64_t total_tokens() const noexcept { return prompt_tokens() + completion_tokens(); }

private:
    std::vector<LedgerEntry> entries_;
};

/// Rates in micro-dollars per million tokens, which equals pico-dollars per token.
struct PriceRow {
    std::string model;
    std::int64_t input_micro_per_million = 0;
    std::int64_t output_micro_per_million = 0;
    std::vector<std::string> aliases;
};

struct Pricing {
    std::string as_of;
    std::string currency = "USD";
    std::map<std::string, PriceRow> rows;  // by canonical model name

    /// Exact model name first, then aliases. Throws ConfigError naming the
    /// backend when nothing matches.
    const PriceRow& lookup(const BackendIdentity& backend) const;
    const PriceRow* find(std::string_view model) const noexcept;
};

/// Pricing file:
///   { "schema_version": 1, "as_of": "YYYY-MM-DD", "currency": "USD",
///     "models": { "<name>": { "input_per_million": 0.15,
///                             "output_per_million": 0.60,
///                             "aliases": ["..."] } } }
Pricing pricing_from_json(const nlohmann::json& doc);
Pricing load_pricing(const std::filesystem::path& path);
nlohmann::json to_json(const Pricing& pricing);

PicoUsd cost_of(const LedgerEntry& entry, const Pricing& pricing);
/// Sum over entries of prompt * input rate + completion * output rate.
PicoUsd cost_of(const CostLedger& ledger, const Pricing& pricing);

nlohmann::json to_json(const CostLedger& ledger, const Pricing& pricing);
CostLedger ledger_from_json(const nlohmann::json& doc);

struct RunReport {
    std::string task_id;
    std::string domain;
    TopologyKind topology = TopologyKind::Parallel;
    int iterations = 1;
    bool converged = true;
    bool escalated = false;
    std::uint64_t prompt_tokens = 0;
    std::uint64_t completion_tokens = 0;
    std::uint64_t total_tokens = 0;
    PicoUsd total_cost = 0;
    std::chrono::nanoseconds wall_clock{0};
    std::size_t agent_calls = 0;
    std::array<std::uint64_t, 4> tokens_by_phase{};  // indexed by Phase
};

/// Totals come straight from the ledger.
RunReport make_report(const CostLedger& ledger, const Pricing& pricing, TopologyKind topology, int iterations,
                      std::chrono::nanoseconds wall_clock);

nlohmann::json to_json(const RunReport& report);
RunReport report_from_json(const nlohmann::json& doc);
std::string reports_csv(std::span<const RunReport> reports);

struct DistributionRow {
    std::string group;
    std::size_t runs = 0;
    std::array<double, 4> percent{};  // by topology_index
};

struct DistributionTable {
    std::vector<DistributionRow> rows;  // groups in first-appearance order
    DistributionRow average;           // unweighted mean of the group rows

    std::string table() const;
    std::string csv() const;
};

/// Share of runs per topology within each group. `groups[i]` labels reports[i].
DistributionTable topology_distribution(std::span<const RunReport> reports, std::span<const std::string> groups);
/// Groups by each report's domain.
DistributionTable topology_distribution(std::span<const RunReport> reports);

}  // namespace orchard
