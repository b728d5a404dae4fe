#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "rulemem/term.hpp"

namespace rulemem {

struct NonGroundFact : std::runtime_error {
    explicit NonGroundFact(const std::string& what) : std::runtime_error(what) {}
};

// Canonical vocabulary of predicates and objects for one instance. Insertion
// order is preserved so prompt rendering stays stable across runs.
class MemorySchema {
   public:
    // Normalizes, then returns the canonical symbol, inserting it when new.
    // Predicate lookups case-fold; object lookups are case-sensitive.
    const std::string& resolve_predicate(std::string_view raw, int arity);
    const std::string& resolve_object(std::string_view raw);

    bool has_predicate(std::string_view normalized) const;
    bool has_object(std::string_view normalized) const;
    const std::set<int>* arities(std::string_view predicate) const;

    const std::vector<std::string>& predicates() const { return predicate_order_; }
    const std::vector<std::string>& objects() const { return object_order_; }

    // Comma-joined lists for prompt slots; "null" when empty.
    std::string predicates_text() const;
    std::string objects_text() const;

   private:
    std::vector<std::string> predicate_order_;
    std::map<std::string, std::set<int>> predicate_arities_;
    std::vector<std::string> object_order_;
    std::set<std::string> object_set_;
};

enum class SymbolKind { predicate, object };

// Free-function form; arity matters only for predicates.
std::string schema_resolve(std::string_view name, SymbolKind kind, MemorySchema& schema,
                           int arity = 0);

struct FactOrigin {
    enum class Kind { input, inferred };
    Kind kind = Kind::input;
    int step = 0;  // meaningful for inferred

    static FactOrigin input() { return {Kind::input, 0}; }
    static FactOrigin inferred(int step) { return {Kind::inferred, step}; }
    std::string to_string() const;
};

struct FactEntry {
    int id = 0;
    Atom atom;  // ground
    std::string text;
    FactOrigin origin;
    bool active = true;
};

struct RuleEntry {
    int id = 0;
    Rule rule;
    std::string text;
    // Set when the conclusion uses variables no premise binds; flagged, not rejected.
    bool conclusion_warning = false;
};

struct WriteOutcome {
    enum class Kind { added, updated, duplicate };
    Kind kind = Kind::added;
    int id = 0;             // the entry now holding the atom
    int superseded_id = 0;  // valid for updated
};

enum class UpdateMode { additive, stateful };

// Read view decoupled from subsequent writes.
struct Snapshot {
    std::vector<FactEntry> facts;  // active only, id order
    std::vector<RuleEntry> rules;  // id order
    MemorySchema schema;

    const FactEntry* fact_by_id(int id) const;
    const RuleEntry* rule_by_id(int id) const;
};

class WorkingMemory {
   public:
    explicit WorkingMemory(UpdateMode mode) : mode_(mode) {}

    UpdateMode mode() const { return mode_; }

    // Resolves the atom's symbols through the schema, then stores it.
    // Additive mode only ever adds; stateful mode supersedes the active fact
    // sharing the (predicate, first argument) conflict key.
    WriteOutcome write_fact(const Atom& atom, std::string text, FactOrigin origin);

    // Alpha-equivalent rules are stored once; returns the first id.
    int write_rule(const Rule& rule, std::string text);

    Snapshot snapshot() const;

    MemorySchema& schema() { return schema_; }
    const MemorySchema& schema() const { return schema_; }
    const std::vector<FactEntry>& facts() const { return facts_; }  // includes inactive
    const std::vector<RuleEntry>& rules() const { return rules_; }
    const FactEntry* fact_by_id(int id) const;

    std::size_t active_fact_count() const;

    // Line-oriented dump: F/R entries followed by the schema.
    std::string dump() const;

   private:
    UpdateMode mode_;
    std::vector<FactEntry> facts_;
    std::vector<RuleEntry> rules_;
    MemorySchema schema_;
    std::map<std::string, int> rule_ids_by_canonical_;
};

}  // namespace rulemem
