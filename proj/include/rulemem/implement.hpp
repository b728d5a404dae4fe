#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rulemem/gateway.hpp"
#include "rulemem/grounding.hpp"
#include "rulemem/prompts.hpp"

namespace rulemem {

struct UncoveredConclusionVariable : std::runtime_error {
    explicit UncoveredConclusionVariable(const std::string& what) : std::runtime_error(what) {}
};

enum class Judgement { none, solves_query, not_solved, conflict };

std::string to_string(Judgement j);

struct InferredFact {
    Atom atom;  // ground
    std::string text;
};

struct ImplementationResult {
    std::vector<InferredFact> new_facts;
    Judgement judgement = Judgement::none;
    std::string raw;       // transcript, when one exists
    int skipped_lines = 0; // fact lines without a parseable bracketed atom
};

// Everything one rule-application call needs. Implementers never touch the
// memory; the engine commits results afterwards.
struct ImplementRequest {
    TaskKind task = TaskKind::kinship;
    Grounding grounding;
    Rule rule;
    std::string rule_text;
    std::vector<FactEntry> premise_facts;  // aligned with grounding.fact_ids
    std::vector<FactEntry> state_facts;    // state tracking
    std::optional<FactEntry> op_fact;      // state tracking
    std::string query;
    std::string context;  // constraint background
    std::string schema_objects;
    std::string schema_predicates;
};

class Implementer {
   public:
    virtual ~Implementer() = default;
    virtual ImplementationResult implement(const ImplementRequest& request) = 0;
};

// Conclusion under the grounding's substitution; judgement is left to the
// engine's query matcher. Throws when the substitution leaves conclusion
// variables unbound.
ImplementationResult symbolic_implement(const Grounding& grounding, const Rule& rule,
                                        const std::vector<FactEntry>& facts);

// Deterministic implementer. For state tracking it applies the put/remove/move
// box semantics to the grounded state facts; elsewhere it instantiates the
// rule conclusion.
class SymbolicImplementer : public Implementer {
   public:
    ImplementationResult implement(const ImplementRequest& request) override;
};

// Total parser for implementation responses: fact lines take the atom from the
// last bracketed segment; "Judgement:" maps Yes to conflict for constraint
// tasks and solves_query otherwise. Malformed lines are skipped and counted.
ImplementationResult parse_implementation_response(const std::string& text, TaskKind task);

// build_prompt -> gateway -> parse, transcript retained. Gateway errors propagate.
ImplementationResult llm_implement(const ImplementRequest& request, const PromptRegistry& registry,
                                   Gateway& gateway);

class LlmImplementer : public Implementer {
   public:
    LlmImplementer(const PromptRegistry& registry, Gateway& gateway)
        : registry_(registry), gateway_(gateway) {}
    ImplementationResult implement(const ImplementRequest& request) override;

   private:
    const PromptRegistry& registry_;
    Gateway& gateway_;
};

// Prompt slot helpers shared with the engine.
std::string format_fact_list(TaskKind task, const std::vector<FactEntry>& facts);
PromptSlots implement_slots(const ImplementRequest& request);

// Plain-English reading of a ground atom ("sister_of(Lena, Joshua)" ->
// "Lena is the sister of Joshua.").
std::string verbalize_atom(const Atom& atom);

}  // namespace rulemem
