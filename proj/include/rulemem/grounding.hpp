#pragma once

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rulemem/memory.hpp"

namespace rulemem {

enum class MatchKind { exact, approximate, semantic };

// Predicate-name matching policy. Exact-equal names always satisfy the
// approximate mode, so exact groundings are a subset of approximate ones.
struct MatchMode {
    MatchKind kind = MatchKind::exact;
    double threshold = 0.85;  // approximate mode
    // Extension point for model-based matching; unused unless kind == semantic.
    std::function<bool(const std::string&, const std::string&)> semantic_hook;

    static MatchMode exact() { return {}; }
    static MatchMode approximate(double threshold) {
        return {MatchKind::approximate, threshold, nullptr};
    }
};

// 1 - levenshtein(a, b) / max(|a|, |b|); empty-vs-empty is 1.
double levenshtein_similarity(std::string_view a, std::string_view b);

bool predicate_name_match(const std::string& a, const std::string& b, const MatchMode& mode);

// Name match plus equal arity (variadic predicates coexist per arity).
bool predicate_match(const std::string& a, int arity_a, const std::string& b, int arity_b,
                     const MatchMode& mode);

// One applicable (rule, supporting facts, bindings) triple.
struct Grounding {
    int rule_id = 0;
    std::vector<int> fact_ids;  // aligned with premises
    Substitution substitution;
    std::optional<double> score;     // constraint ranking only
    std::vector<int> state_fact_ids;  // chronological grounding only

    friend bool operator==(const Grounding&, const Grounding&) = default;
};

// Fact ids committed in the immediately preceding step; empty disables the filter.
using NoveltySet = std::set<int>;

struct GroundingOptions {
    MatchMode match;
    // Emission cap, preserving deterministic order; nullopt lifts it.
    std::optional<std::size_t> limit = 16;
};

// Exhaustive enumeration for additive tasks: every ordered tuple of distinct
// active facts that predicate-matches premise-wise and unifies without
// conflict. When novelty is non-empty, tuples must include a novel fact.
// Output order: rule id, then fact-id tuples lexicographically.
std::vector<Grounding> ground_enumerate(const Snapshot& snap, const NoveltySet& novelty,
                                        const GroundingOptions& opts = {});

// Constraint-satisfaction ranking: predicate matching skipped; score is the
// fraction of premises whose variables some active fact can instantiate
// (zero-variable premises count as covered). Descending score, ties by rule id.
std::vector<Grounding> ground_rank_constraints(const Snapshot& snap,
                                               const GroundingOptions& opts = {});

// Chronological grounding for state tracking: picks the rule best matching the
// operational fact, plus state facts keyed by the operation's arguments.
// State facts are active facts whose predicate appears in some rule conclusion
// and whose first argument occurs among the operation's arguments or bound values.
std::optional<Grounding> ground_chronological(const Snapshot& snap, const FactEntry& op_fact,
                                              const GroundingOptions& opts = {});

}  // namespace rulemem
