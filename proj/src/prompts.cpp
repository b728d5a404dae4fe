#include "rulemem/prompts.hpp"

#include <fstream>
#include <sstream>

namespace rulemem {

std::string to_string(TaskKind kind) {
    switch (kind) {
        case TaskKind::kinship: return "kinship";
        case TaskKind::logic: return "logic";
        case TaskKind::constraint: return "constraint";
        case TaskKind::state_tracking: return "state";
    }
    return "unknown";
}

TaskKind task_kind_from_string(const std::string& name) {
    if (name == "kinship") return TaskKind::kinship;
    if (name == "logic") return TaskKind::logic;
    if (name == "constraint") return TaskKind::constraint;
    if (name == "state" || name == "state_tracking") return TaskKind::state_tracking;
    throw UnknownTaskKind("unknown task kind: " + name);
}

std::string to_string(PromptStage stage) {
    switch (stage) {
        case PromptStage::fact_init: return "fact_init";
        case PromptStage::rule_init: return "rule_init";
        case PromptStage::op_fact_init: return "op_init";
        case PromptStage::implement: return "implement";
        case PromptStage::backup: return "backup";
    }
    return "unknown";
}

namespace {

const std::string kSystemMarker = "=== system ===";
const std::string kUserMarker = "=== user ===";

PromptText split_sections(const std::string& raw) {
    auto slice = [&raw](std::size_t from, std::size_t to) {
        std::string s = raw.substr(from, to - from);
        while (!s.empty() && (s.front() == '\n' || s.front() == '\r')) s.erase(s.begin());
        while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
        return s;
    };
    PromptText out;
    const std::size_t sys = raw.find(kSystemMarker);
    const std::size_t usr = raw.find(kUserMarker);
    if (sys == std::string::npos || usr == std::string::npos) {
        out.user = slice(0, raw.size());
        return out;
    }
    out.system = slice(sys + kSystemMarker.size(), usr);
    out.user = slice(usr + kUserMarker.size(), raw.size());
    return out;
}

std::string key_of(TaskKind task, PromptStage stage) {
    std::string stem = to_string(task) + "_";
    switch (stage) {
        case PromptStage::fact_init: stem += "fact_init"; break;
        case PromptStage::rule_init: stem += "rule_init"; break;
        case PromptStage::op_fact_init: stem += "op_init"; break;
        case PromptStage::implement: stem += "implement"; break;
        case PromptStage::backup: stem += "backup"; break;
    }
    return stem;
}

void replace_all(std::string& text, const std::string& token, const std::string& value) {
    std::size_t pos = 0;
    while ((pos = text.find(token, pos)) != std::string::npos) {
        text.replace(pos, token.size(), value);
        pos += value.size();
    }
}

std::string fill(std::string text, const PromptSlots& slots) {
    replace_all(text, "{objects}", slots.objects);
    replace_all(text, "{predicates}", slots.predicates);
    replace_all(text, "{query}", slots.query);
    replace_all(text, "{facts}", slots.facts);
    replace_all(text, "{rule}", slots.rule);
    replace_all(text, "{context}", slots.context);
    replace_all(text, "{option}", slots.option);
    replace_all(text, "{state facts}", slots.state_facts);
    replace_all(text, "{op facts}", slots.op_facts);
    return text;
}

}  // namespace

PromptRegistry PromptRegistry::embedded() {
    PromptRegistry reg;
    for (const auto& [stem, content] : detail::embedded_prompt_files())
        reg.templates_.emplace(stem, split_sections(content));
    return reg;
}

PromptRegistry PromptRegistry::from_directory(const std::filesystem::path& dir) {
    PromptRegistry reg;
    if (!std::filesystem::is_directory(dir))
        throw UnknownTaskKind("prompt directory not found: " + dir.string());
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() != ".txt") continue;
        std::ifstream in(entry.path());
        std::ostringstream buf;
        buf << in.rdbuf();
        reg.templates_.emplace(entry.path().stem().string(), split_sections(buf.str()));
    }
    return reg;
}

bool PromptRegistry::has(TaskKind task, PromptStage stage) const {
    return templates_.count(key_of(task, stage)) > 0;
}

const PromptText& PromptRegistry::text(TaskKind task, PromptStage stage) const {
    auto it = templates_.find(key_of(task, stage));
    if (it == templates_.end())
        throw UnknownTaskKind("no prompt template for " + key_of(task, stage));
    return it->second;
}

PromptText PromptRegistry::instantiate(TaskKind task, PromptStage stage,
                                       const PromptSlots& slots) const {
    const PromptText& tmpl = text(task, stage);
    return PromptText{tmpl.system, fill(tmpl.user, slots)};
}

PromptText build_prompt(TaskKind task, const PromptSlots& slots, const PromptRegistry& registry) {
    return registry.instantiate(task, PromptStage::implement, slots);
}

}  // namespace rulemem
