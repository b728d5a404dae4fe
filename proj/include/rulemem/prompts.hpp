#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>

namespace rulemem {

enum class TaskKind { kinship, logic, constraint, state_tracking };

std::string to_string(TaskKind kind);
TaskKind task_kind_from_string(const std::string& name);

enum class PromptStage { fact_init, rule_init, op_fact_init, implement, backup };

std::string to_string(PromptStage stage);

struct UnknownTaskKind : std::runtime_error {
    explicit UnknownTaskKind(const std::string& what) : std::runtime_error(what) {}
};

struct PromptText {
    std::string system;  // may be empty
    std::string user;
};

// Values for the {placeholder} slots; unset slots simply never get substituted.
struct PromptSlots {
    std::string objects;
    std::string predicates;
    std::string query;
    std::string facts;
    std::string rule;
    std::string context;
    std::string option;
    std::string state_facts;
    std::string op_facts;
};

// Templates are one text file per (task, stage), named "<task>_<stage>.txt".
// A file may open with "=== system ===" / "=== user ===" sections; without the
// markers the whole file is the user message. The built-in set is embedded at
// build time from the same files.
class PromptRegistry {
   public:
    static PromptRegistry embedded();
    static PromptRegistry from_directory(const std::filesystem::path& dir);

    bool has(TaskKind task, PromptStage stage) const;
    const PromptText& text(TaskKind task, PromptStage stage) const;  // throws UnknownTaskKind

    PromptText instantiate(TaskKind task, PromptStage stage, const PromptSlots& slots) const;

   private:
    std::map<std::string, PromptText> templates_;
};

// The rule-implementation prompt for one grounded step; pure in its arguments.
PromptText build_prompt(TaskKind task, const PromptSlots& slots, const PromptRegistry& registry);

namespace detail {
// Generated from prompts/*.txt; keyed by file stem.
const std::map<std::string, std::string>& embedded_prompt_files();
}  // namespace detail

}  // namespace rulemem
