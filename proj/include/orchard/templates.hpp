#pragma once

#include <filesystem>
#include <map>
#include <string>

namespace orchard {

/// Prompt templates for the lead agent and the synthesis agents. Placeholders
/// look like {name}; unknown placeholders are left as written.
struct PromptTemplates {
    std::string lead_assign;     // {count} {task} {subtasks}
    std::string lead_reconcile;  // {task} {reports}
    std::string merge;           // {outputs}
    std::string arbiter;         // {outputs}

    /// The templates shipped in data/templates, compiled in.
    static PromptTemplates defaults();
    /// Overrides from <dir>/<name>.txt; files that are absent keep the default.
    static PromptTemplates load(const std::filesystem::path& dir);
};

std::string render_template(const std::string& text, const std::map<std::string, std::string>& values);

}  // namespace orchard
