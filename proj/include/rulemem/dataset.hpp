#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rulemem/prompts.hpp"

namespace rulemem {

class FormatError : public std::runtime_error {
   public:
    FormatError(int line, const std::string& reason)
        : std::runtime_error("line " + std::to_string(line) + ": " + reason), line_(line) {}
    int line() const { return line_; }

   private:
    int line_;
};

// Paired natural-language / symbolic source text.
struct SymbolicText {
    std::string text;
    std::string symbolic;
};

struct OptionSpec {
    std::string label;
    std::string text;
    std::vector<SymbolicText> facts;  // pre-parsed option facts; empty on the raw path
};

enum class Polarity { positive, negative };

// One task instance. Context is either pre-parsed (facts/rules/ops) or raw
// sentences (context_*); never both.
struct InstanceSpec {
    std::string id;
    TaskKind mode = TaskKind::kinship;
    std::string query;
    std::vector<std::string> query_args;  // kinship: ordered pair; state: queried box
    std::string query_atom;               // logic
    std::string gold;
    std::optional<int> depth;

    std::vector<SymbolicText> facts;
    std::vector<SymbolicText> rules;
    std::vector<SymbolicText> ops;  // state tracking, chronological order

    std::vector<std::string> context_facts;
    std::vector<std::string> context_rules;
    std::vector<std::string> context_ops;

    std::string context;  // constraint background
    std::vector<OptionSpec> options;
    Polarity polarity = Polarity::positive;

    bool preparsed() const { return !facts.empty() || !rules.empty() || !ops.empty(); }
};

InstanceSpec instance_from_json(const nlohmann::json& j);
nlohmann::json to_json(const InstanceSpec& instance);

// Validates each record; malformed lines are rejected with their line number.
// When expected_mode is given, every instance must carry that mode.
std::vector<InstanceSpec> load_dataset(const std::filesystem::path& path,
                                       std::optional<TaskKind> expected_mode = std::nullopt);

void save_dataset(const std::vector<InstanceSpec>& instances, const std::filesystem::path& path);

}  // namespace rulemem
