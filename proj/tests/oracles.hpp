// Independent reference implementations the engine is checked against. These
// deliberately use the dumbest workable algorithms (exhaustive enumeration,
// naive closure) and stay off the production code paths they validate.
#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "rulemem/grounding.hpp"
#include "rulemem/memory.hpp"
#include "rulemem/term.hpp"

namespace oracles {

using namespace rulemem;

// --- brute-force unification ------------------------------------------------

struct BruteForceResult {
    bool success = false;
    std::map<std::string, std::string> bindings;  // var -> object name
    int solutions = 0;
};

// Tries every assignment of the pattern's variables to objects occurring in
// the ground atom; success means some assignment maps the pattern onto it.
inline BruteForceResult brute_force_unify(const Atom& pattern, const Atom& ground) {
    BruteForceResult result;
    if (pattern.predicate != ground.predicate) return result;
    if (pattern.args.size() != ground.args.size()) return result;

    std::vector<std::string> vars = pattern.variables();
    std::vector<std::string> candidates;
    for (const Term& t : ground.args)
        if (std::find(candidates.begin(), candidates.end(), t.name) == candidates.end())
            candidates.push_back(t.name);

    std::vector<std::size_t> pick(vars.size(), 0);
    while (true) {
        std::map<std::string, std::string> assignment;
        for (std::size_t i = 0; i < vars.size(); ++i) assignment[vars[i]] = candidates[pick[i]];

        bool matches = true;
        for (std::size_t i = 0; i < pattern.args.size() && matches; ++i) {
            const Term& p = pattern.args[i];
            const std::string& g = ground.args[i].name;
            const std::string value = p.is_variable() ? assignment[p.name] : p.name;
            matches = value == g;
        }
        if (matches) {
            ++result.solutions;
            if (!result.success) {
                result.success = true;
                result.bindings = assignment;
            }
        }

        if (vars.empty() || candidates.empty()) break;
        std::size_t i = 0;
        while (i < pick.size()) {
            if (++pick[i] < candidates.size()) break;
            pick[i] = 0;
            ++i;
        }
        if (i == pick.size()) break;
    }
    return result;
}

// --- nested-loop grounding --------------------------------------------------

struct OracleGrounding {
    int rule_id;
    std::vector<int> fact_ids;
    std::map<std::string, std::string> bindings;

    friend bool operator<(const OracleGrounding& a, const OracleGrounding& b) {
        return std::tie(a.rule_id, a.fact_ids, a.bindings) <
               std::tie(b.rule_id, b.fact_ids, b.bindings);
    }
    friend bool operator==(const OracleGrounding& a, const OracleGrounding& b) = default;
};

inline std::map<std::string, std::string> binding_names(const Substitution& s) {
    std::map<std::string, std::string> out;
    for (const auto& [var, term] : s.bindings()) out[var] = term.name;
    return out;
}

// Explicit nested loops, at most three premises.
inline std::vector<OracleGrounding> nested_loop_groundings(const Snapshot& snap,
                                                           const NoveltySet& novelty,
                                                           const MatchMode& mode) {
    std::vector<OracleGrounding> out;
    auto premise_fits = [&mode](const Atom& premise, const FactEntry& fact, const Substitution& seed)
        -> std::optional<Substitution> {
        if (!predicate_match(premise.predicate, premise.arity(), fact.atom.predicate,
                             fact.atom.arity(), mode))
            return std::nullopt;
        return unify_args(premise, fact.atom, seed);
    };
    auto novel = [&novelty](std::initializer_list<int> ids) {
        if (novelty.empty()) return true;
        return std::any_of(ids.begin(), ids.end(), [&novelty](int id) { return novelty.count(id) > 0; });
    };

    for (const RuleEntry& rule : snap.rules) {
        const auto& premises = rule.rule.premises;
        if (premises.size() == 1) {
            for (const FactEntry& f1 : snap.facts) {
                auto s1 = premise_fits(premises[0], f1, {});
                if (!s1 || !novel({f1.id})) continue;
                out.push_back({rule.id, {f1.id}, binding_names(*s1)});
            }
        } else if (premises.size() == 2) {
            for (const FactEntry& f1 : snap.facts)
                for (const FactEntry& f2 : snap.facts) {
                    if (f1.id == f2.id) continue;
                    auto s1 = premise_fits(premises[0], f1, {});
                    if (!s1) continue;
                    auto s2 = premise_fits(premises[1], f2, *s1);
                    if (!s2 || !novel({f1.id, f2.id})) continue;
                    out.push_back({rule.id, {f1.id, f2.id}, binding_names(*s2)});
                }
        } else if (premises.size() == 3) {
            for (const FactEntry& f1 : snap.facts)
                for (const FactEntry& f2 : snap.facts)
                    for (const FactEntry& f3 : snap.facts) {
                        if (f1.id == f2.id || f1.id == f3.id || f2.id == f3.id) continue;
                        auto s1 = premise_fits(premises[0], f1, {});
                        if (!s1) continue;
                        auto s2 = premise_fits(premises[1], f2, *s1);
                        if (!s2) continue;
                        auto s3 = premise_fits(premises[2], f3, *s2);
                        if (!s3 || !novel({f1.id, f2.id, f3.id})) continue;
                        out.push_back({rule.id, {f1.id, f2.id, f3.id}, binding_names(*s3)});
                    }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

// --- naive forward chaining -------------------------------------------------

// Closure with per-atom derivation depth (seed facts at depth 0). Re-derives
// from scratch each round; no novelty bookkeeping at all. A tuple may not use
// the same stored fact for two premise slots, matching the grounding
// semantics (stored facts are atom-deduplicated, so distinct ids means
// distinct atoms).
inline std::map<Atom, int> naive_closure(const std::vector<Rule>& rules,
                                         const std::vector<Atom>& seeds) {
    std::map<Atom, int> depth;
    for (const Atom& s : seeds) depth.emplace(s, 0);

    bool changed = true;
    int round = 0;
    while (changed) {
        changed = false;
        ++round;
        std::vector<Atom> known;
        for (const auto& [atom, d] : depth) known.push_back(atom);

        for (const Rule& rule : rules) {
            struct Frame {
                std::size_t idx;
                Substitution sub;
                std::vector<Atom> used;
            };
            std::vector<Substitution> complete;
            std::vector<Frame> stack = {{0, Substitution{}, {}}};
            while (!stack.empty()) {
                Frame frame = std::move(stack.back());
                stack.pop_back();
                if (frame.idx == rule.premises.size()) {
                    complete.push_back(frame.sub);
                    continue;
                }
                for (const Atom& fact : known) {
                    if (std::find(frame.used.begin(), frame.used.end(), fact) != frame.used.end())
                        continue;
                    auto next = unify_atom(rule.premises[frame.idx], fact, frame.sub);
                    if (!next) continue;
                    Frame deeper{frame.idx + 1, *next, frame.used};
                    deeper.used.push_back(fact);
                    stack.push_back(std::move(deeper));
                }
            }
            for (const Substitution& sub : complete) {
                Atom derived = apply_substitution(rule.conclusion, sub);
                if (!derived.ground()) continue;
                if (depth.emplace(derived, round).second) changed = true;
            }
        }
    }
    return depth;
}

// --- random generators shared by the property suites ------------------------

struct WorldConfig {
    int max_rules = 8;
    int max_facts = 12;
    int max_premises = 3;
    int predicates = 5;
    int objects = 6;
    int variables = 3;
};

struct RandomWorld {
    std::vector<Rule> rules;
    std::vector<Atom> facts;
};

inline RandomWorld random_world(std::mt19937_64& rng, const WorldConfig& cfg = {}) {
    const std::vector<std::string> preds = {"p", "q", "r", "s", "t", "u", "v", "w"};
    const std::vector<std::string> objs = {"ada", "ben", "cruz", "dot", "eli", "fox", "gia", "hank"};
    const std::vector<std::string> vars = {"X", "Y", "Z"};

    auto pick = [&rng](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
    const int n_preds = std::max(2, cfg.predicates);
    const int n_objs = std::max(2, cfg.objects);
    const int n_vars = std::max(1, cfg.variables);

    // fixed arity per predicate keeps unification failures interesting but sane
    std::map<std::string, int> arity;
    for (int i = 0; i < n_preds; ++i)
        arity[preds[static_cast<std::size_t>(i)]] = 1 + static_cast<int>(pick(3));

    RandomWorld world;
    const std::size_t n_facts = 1 + pick(static_cast<std::size_t>(cfg.max_facts));
    for (std::size_t i = 0; i < n_facts; ++i) {
        Atom fact;
        fact.predicate = preds[pick(static_cast<std::size_t>(n_preds))];
        for (int a = 0; a < arity[fact.predicate]; ++a)
            fact.args.push_back(make_object(objs[pick(static_cast<std::size_t>(n_objs))]));
        world.facts.push_back(std::move(fact));
    }

    const std::size_t n_rules = 1 + pick(static_cast<std::size_t>(cfg.max_rules));
    for (std::size_t i = 0; i < n_rules; ++i) {
        Rule rule;
        const std::size_t n_premises = 1 + pick(static_cast<std::size_t>(cfg.max_premises));
        std::vector<std::string> used_vars;
        for (std::size_t p = 0; p < n_premises; ++p) {
            Atom premise;
            premise.predicate = preds[pick(static_cast<std::size_t>(n_preds))];
            for (int a = 0; a < arity[premise.predicate]; ++a) {
                if (pick(3) == 0) {
                    premise.args.push_back(make_object(objs[pick(static_cast<std::size_t>(n_objs))]));
                } else {
                    const std::string v = vars[pick(static_cast<std::size_t>(n_vars))];
                    premise.args.push_back(make_variable(v));
                    if (std::find(used_vars.begin(), used_vars.end(), v) == used_vars.end())
                        used_vars.push_back(v);
                }
            }
            rule.premises.push_back(std::move(premise));
        }
        // conclusion variables stay premise-bound so the symbolic implementer
        // always has full coverage
        Atom conclusion;
        conclusion.predicate = preds[pick(static_cast<std::size_t>(n_preds))];
        for (int a = 0; a < arity[conclusion.predicate]; ++a) {
            if (!used_vars.empty() && pick(2) == 0)
                conclusion.args.push_back(make_variable(used_vars[pick(used_vars.size())]));
            else
                conclusion.args.push_back(make_object(objs[pick(static_cast<std::size_t>(n_objs))]));
        }
        rule.conclusion = std::move(conclusion);
        world.rules.push_back(std::move(rule));
    }
    return world;
}

inline Snapshot world_snapshot(const RandomWorld& world) {
    WorkingMemory mem(UpdateMode::additive);
    for (const Atom& fact : world.facts) mem.write_fact(fact, render(fact), FactOrigin::input());
    for (const Rule& rule : world.rules) mem.write_rule(rule, render(rule));
    return mem.snapshot();
}

}  // namespace oracles
