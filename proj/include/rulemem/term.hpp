#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rulemem {

struct MalformedTerm : std::runtime_error {
    explicit MalformedTerm(const std::string& what) : std::runtime_error(what) {}
};

struct MalformedRule : std::runtime_error {
    explicit MalformedRule(const std::string& what) : std::runtime_error(what) {}
};

// Predicate names fold to lowercase with whitespace runs collapsed to a single
// underscore. Object names keep their casing; internal whitespace runs collapse
// to a single space ("Box  4" -> "Box 4"). Both are idempotent.
std::string normalize_predicate(std::string_view raw);
std::string normalize_object(std::string_view raw);

// Variable tokens are single words, uppercase first letter, at most 3 chars
// (A, B, C, X, X1). Multi-word tokens and longer names are objects.
bool is_variable_token(std::string_view token);

enum class TermKind { variable, object };

struct Term {
    TermKind kind;
    std::string name;

    bool is_variable() const { return kind == TermKind::variable; }
    bool is_object() const { return kind == TermKind::object; }

    friend bool operator==(const Term&, const Term&) = default;
    friend auto operator<=>(const Term&, const Term&) = default;
};

Term make_variable(std::string name);
Term make_object(std::string_view name);

struct Atom {
    std::string predicate;  // normalized
    std::vector<Term> args;

    int arity() const { return static_cast<int>(args.size()); }
    bool ground() const;
    std::vector<std::string> variables() const;  // first-occurrence order

    friend bool operator==(const Atom&, const Atom&) = default;
    friend auto operator<=>(const Atom&, const Atom&) = default;
};

struct Rule {
    Atom conclusion;
    std::vector<Atom> premises;  // never empty

    std::vector<std::string> premise_variables() const;
    // Conclusion variables that no premise binds. The engine flags such rules
    // but still accepts them.
    std::vector<std::string> unbound_conclusion_variables() const;

    friend bool operator==(const Rule&, const Rule&) = default;
};

// Conflict-free map from variable name to object term.
class Substitution {
   public:
    // Returns false when var is already bound to a different object.
    bool bind(const std::string& var, const Term& object);
    const Term* lookup(const std::string& var) const;

    bool empty() const { return bindings_.empty(); }
    std::size_t size() const { return bindings_.size(); }
    const std::map<std::string, Term>& bindings() const { return bindings_; }

    friend bool operator==(const Substitution&, const Substitution&) = default;

   private:
    std::map<std::string, Term> bindings_;
};

// Facts are ground by construction: every argument parses as an object.
// Patterns classify arguments with the variable-token rule.
enum class ParseContext { pattern, fact };

Atom parse_atom(std::string_view input, ParseContext ctx = ParseContext::pattern);
Rule parse_rule(std::string_view input);

// Canonical text: "pred(a, b)" with comma-space separators, ":-" unspaced,
// no trailing period. parse(render(x)) == x for same-context parses.
std::string render(const Atom& atom);
std::string render(const Rule& rule);

// Argument-wise matching with predicates left to the caller (grounding runs
// predicate matching separately, possibly approximate). Fails on arity
// mismatch, object mismatch, or a conflicting variable binding.
std::optional<Substitution> unify_args(const Atom& pattern, const Atom& ground,
                                       const Substitution& seed = {});

// unify_args plus exact predicate equality.
std::optional<Substitution> unify_atom(const Atom& pattern, const Atom& ground,
                                       const Substitution& seed = {});

// Bound variables replaced, unbound ones left intact.
Atom apply_substitution(const Atom& atom, const Substitution& s);

// Variables renamed to V1, V2, ... in occurrence order (conclusion first);
// alpha-equivalent rules render identically.
std::string alpha_canonical(const Rule& rule);

}  // namespace rulemem
