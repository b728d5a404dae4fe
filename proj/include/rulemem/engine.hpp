#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rulemem/dataset.hpp"
#include "rulemem/gateway.hpp"
#include "rulemem/grounding.hpp"
#include "rulemem/implement.hpp"
#include "rulemem/memory.hpp"
#include "rulemem/prompts.hpp"

namespace rulemem {

struct InitializationError : std::runtime_error {
    explicit InitializationError(const std::string& what) : std::runtime_error(what) {}
};

struct EngineConfig {
    // Resolved per instance when unset: by declared depth for kinship/logic
    // (<=2 -> 4, 3-4 -> 6, else 8), rule count for constraint, operation count
    // for state tracking.
    std::optional<int> max_steps;
    // Groundings emitted and implemented per step; nullopt lifts the cap.
    std::optional<std::size_t> prune_limit = 16;
    MatchMode match;
    enum class ImplementerKind { symbolic, llm };
    ImplementerKind implementer = ImplementerKind::symbolic;
    bool backup_enabled = true;
};

// Query shapes: kinship asks for any relation linking an ordered entity pair;
// logic asks for a specific atom (or its not_ complement); state tracking asks
// for the active contents fact of one box.
struct QueryPattern {
    std::optional<Atom> atom;
    std::vector<std::string> args;
};

QueryPattern build_query_pattern(const InstanceSpec& instance);

struct GroundingRef {
    int rule_id = 0;
    std::vector<int> fact_ids;
    friend bool operator==(const GroundingRef&, const GroundingRef&) = default;
};

struct StepRecord {
    int step = 0;
    std::string option;  // constraint option label; empty elsewhere
    std::vector<GroundingRef> groundings;
    int implemented = 0;
    std::vector<int> committed;
    std::vector<std::string> judgements;
    std::optional<std::string> stop;
};

struct RunOutcome {
    std::string answer;  // relation word, true/false/unknown, option label,
                         // box contents, or "abstain"
    bool solved_directly = false;
    int steps_used = 0;
    std::vector<StepRecord> trace;
    std::string memory_dump;
};

nlohmann::json to_json(const StepRecord& record);
nlohmann::json to_json(const RunOutcome& outcome);
void write_trace(const RunOutcome& outcome, const std::filesystem::path& path);

class Engine {
   public:
    // gateway may be null for pure symbolic runs; LLM implementation, raw-path
    // initialization and backup answering require it.
    Engine(EngineConfig config, const PromptRegistry& registry, Gateway* gateway = nullptr);

    WorkingMemory initialize_memory(const InstanceSpec& instance);
    RunOutcome run(const InstanceSpec& instance);

    // Most-recent match wins (highest id).
    static std::optional<FactEntry> query_solved(const WorkingMemory& memory,
                                                 const QueryPattern& query, TaskKind task);

    // Positive polarity selects the unique conflict-free option, negative the
    // unique conflicting one; no unique candidate means abstain.
    static std::optional<std::string> predict_constraint_answer(
        const std::vector<std::pair<std::string, bool>>& option_conflicts, Polarity polarity);

    std::string backup_answer(const InstanceSpec& instance);

    const EngineConfig& config() const { return config_; }

   private:
    struct Initialized {
        WorkingMemory memory;
        std::vector<FactEntry> ops;  // chronological operational facts
    };

    Initialized initialize(const InstanceSpec& instance);
    RunOutcome run_iterative(const InstanceSpec& instance);
    RunOutcome run_constraint(const InstanceSpec& instance);
    void finish_unsolved(RunOutcome& outcome, const InstanceSpec& instance);

    std::vector<InferredFact> extract_facts(TaskKind task, PromptStage stage,
                                            const std::string& sentence, const MemorySchema& schema,
                                            const std::string& context_text = {},
                                            const std::string& option_text = {},
                                            const std::string& query_text = {});
    std::vector<Rule> extract_rules(TaskKind task, const std::string& sentence,
                                    const MemorySchema& schema, const std::string& context_text);

    std::unique_ptr<Implementer> make_implementer();
    int resolve_max_steps(const InstanceSpec& instance) const;

    EngineConfig config_;
    const PromptRegistry& registry_;
    Gateway* gateway_;
};

}  // namespace rulemem
