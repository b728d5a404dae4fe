#pragma once

#include <map>
#include <string>
#include <vector>

#include "rulemem/engine.hpp"

namespace rulemem {

struct InstanceOutcome {
    std::string id;
    TaskKind mode = TaskKind::kinship;
    std::string answer;
    std::string gold;
    bool correct = false;
    bool solved_directly = false;
    int steps_used = 0;
    std::optional<int> depth;
    std::string error;  // per-instance failure; scored incorrect, not direct
};

struct EvalReport {
    double accuracy = 0.0;        // over all instances, backup answers included
    double execution_rate = 0.0;  // solved without backup / total
    int total = 0;
    std::map<int, std::pair<int, int>> per_depth;  // depth -> (correct, total)
    std::vector<InstanceOutcome> outcomes;

    nlohmann::json to_json() const;
    std::string table() const;
};

// Labels, relations and truth values compare case-insensitively; box contents
// compare as item sets after article stripping.
bool answers_match(TaskKind mode, const std::string& answer, const std::string& gold);

EvalReport evaluate(const std::vector<InstanceSpec>& instances, const EngineConfig& config,
                    const PromptRegistry& registry, Gateway* gateway = nullptr);

}  // namespace rulemem
