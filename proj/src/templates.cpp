#include "orchard/templates.hpp"

#include <fstream>
#include <sstream>

#include "orchard/error.hpp"
#include "orchard/templates_data.hpp"

namespace orchard {

PromptTemplates PromptTemplates::defaults() {
    return {detail::kLeadAssignTemplate, detail::kLeadReconcileTemplate, detail::kMergeTemplate,
            detail::kArbiterTemplate};
}

PromptTemplates PromptTemplates::load(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw ConfigError("template directory not found: " + dir.string());
    PromptTemplates t = defaults();
    auto read = [&](const char* name, std::string& slot) {
        const auto path = dir / (std::string(name) + ".txt");
        std::ifstream in(path);
        if (!in) return;
        std::ostringstream text;
        text << in.rdbuf();
        slot = text.str();
    };
    read("lead_assign", t.lead_assign);
    read("lead_reconcile", t.lead_reconcile);
    read("merge", t.merge);
    read("arbiter", t.arbiter);
    return t;
}

std::string render_template(const std::string& text, const std::map<std::string, std::string>& values) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size();) {
        if (text[i] == '{') {
            const auto close = text.find('}', i + 1);
            if (close != std::string::npos) {
                auto it = values.find(text.substr(i + 1, close - i - 1));
                if (it != values.end()) {
                    out += it->second;
                    i = close + 1;
                    continue;
                }
            }
        }
        out += text[i++];
    }
    return out;
}

}  // namespace orchard
