#include "rulemem/grounding.hpp"

#include <algorithm>

namespace rulemem {

double levenshtein_similarity(std::string_view a, std::string_view b) {
    const std::size_t n = a.size(), m = b.size();
    if (n == 0 && m == 0) return 1.0;
    std::vector<std::size_t> prev(m + 1), cur(m + 1);
    for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
    for (std::size_t i = 1; i <= n; ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= m; ++j) {
            const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    const double dist = static_cast<double>(prev[m]);
    return 1.0 - dist / static_cast<double>(std::max(n, m));
}

bool predicate_name_match(const std::string& a, const std::string& b, const MatchMode& mode) {
    switch (mode.kind) {
        case MatchKind::exact:
            return a == b;
        case MatchKind::approximate:
            return a == b || levenshtein_similarity(a, b) >= mode.threshold;
        case MatchKind::semantic:
            if (a == b) return true;
            return mode.semantic_hook && mode.semantic_hook(a, b);
    }
    return false;
}

bool predicate_match(const std::string& a, int arity_a, const std::string& b, int arity_b,
                     const MatchMode& mode) {
    return arity_a == arity_b && predicate_name_match(a, b, mode);
}

namespace {

struct Enumerator {
    const Snapshot& snap;
    const NoveltySet& novelty;
    const GroundingOptions& opts;
    std::vector<Grounding> out;

    bool at_limit() const { return opts.limit && out.size() >= *opts.limit; }

    void try_rule(const RuleEntry& rule) {
        std::vector<int> chosen;
        extend(rule, 0, Substitution{}, chosen);
    }

    void extend(const RuleEntry& rule, std::size_t premise_idx, const Substitution& sub,
                std::vector<int>& chosen) {
        if (at_limit()) return;
        if (premise_idx == rule.rule.premises.size()) {
            if (!novelty.empty() &&
                std::none_of(chosen.begin(), chosen.end(),
                             [this](int id) { return novelty.count(id) > 0; }))
                return;
            out.push_back(Grounding{rule.id, chosen, sub, std::nullopt, {}});
            return;
        }
        const Atom& premise = rule.rule.premises[premise_idx];
        for (const FactEntry& fact : snap.facts) {
            if (at_limit()) return;
            if (std::find(chosen.begin(), chosen.end(), fact.id) != chosen.end()) continue;
            if (!predicate_match(premise.predicate, premise.arity(), fact.atom.predicate,
                                 fact.atom.arity(), opts.match))
                continue;
            auto extended = unify_args(premise, fact.atom, sub);
            if (!extended) continue;
            chosen.push_back(fact.id);
            extend(rule, premise_idx + 1, *extended, chosen);
            chosen.pop_back();
        }
    }
};

}  // namespace

std::vector<Grounding> ground_enumerate(const Snapshot& snap, const NoveltySet& novelty,
                                        const GroundingOptions& opts) {
    Enumerator e{snap, novelty, opts, {}};
    for (const RuleEntry& rule : snap.rules) {
        if (e.at_limit()) break;
        e.try_rule(rule);
    }
    return std::move(e.out);
}

std::vector<Grounding> ground_rank_constraints(const Snapshot& snap,
                                               const GroundingOptions& opts) {
    std::vector<Grounding> out;
    for (const RuleEntry& rule : snap.rules) {
        Grounding g;
        g.rule_id = rule.id;
        std::size_t covered = 0;
        for (const Atom& premise : rule.rule.premises) {
            if (premise.variables().empty()) {
                ++covered;  // nothing to instantiate
                continue;
            }
            for (const FactEntry& fact : snap.facts) {
                if (!unify_args(premise, fact.atom)) continue;
                ++covered;
                if (std::find(g.fact_ids.begin(), g.fact_ids.end(), fact.id) == g.fact_ids.end())
                    g.fact_ids.push_back(fact.id);
                break;
            }
        }
        g.score = static_cast<double>(covered) / static_cast<double>(rule.rule.premises.size());
        out.push_back(std::move(g));
    }
    std::stable_sort(out.begin(), out.end(), [](const Grounding& a, const Grounding& b) {
        if (*a.score != *b.score) return *a.score > *b.score;
        return a.rule_id < b.rule_id;
    });
    if (opts.limit && out.size() > *opts.limit) out.resize(*opts.limit);
    return out;
}

namespace {

// Right-aligned positional match, tolerant of arity mismatch: Boxes operations
// are variadic in their item arguments while the box arguments sit rightmost.
struct PremiseMatch {
    double score = -1.0;
    Substitution sub;
};

PremiseMatch match_op_premise(const Atom& premise, const Atom& op, const MatchMode& mode) {
    PremiseMatch m;
    if (!predicate_name_match(premise.predicate, op.predicate, mode)) return m;
    const std::size_t pn = premise.args.size(), on = op.args.size();
    const std::size_t overlap = std::min(pn, on);
    std::size_t matched = 0;
    Substitution sub;
    for (std::size_t j = 1; j <= overlap; ++j) {
        const Term& p = premise.args[pn - j];
        const Term& o = op.args[on - j];
        if (p.is_object()) {
            if (p.name == o.name) ++matched;
        } else if (sub.bind(p.name, o)) {
            ++matched;
        }
    }
    const std::size_t span = std::max<std::size_t>(std::max(pn, on), 1);
    m.score = static_cast<double>(matched) / static_cast<double>(span);
    m.sub = std::move(sub);
    return m;
}

}  // namespace

std::optional<Grounding> ground_chronological(const Snapshot& snap, const FactEntry& op_fact,
                                              const GroundingOptions& opts) {
    const RuleEntry* best_rule = nullptr;
    PremiseMatch best;
    for (const RuleEntry& rule : snap.rules) {
        for (const Atom& premise : rule.rule.premises) {
            PremiseMatch m = match_op_premise(premise, op_fact.atom, opts.match);
            if (m.score < 0.0) continue;
            if (!best_rule || m.score > best.score) {
                best_rule = &rule;
                best = std::move(m);
            }
        }
    }
    if (!best_rule) return std::nullopt;

    std::set<std::string> anchors;
    for (const Term& arg : op_fact.atom.args) anchors.insert(arg.name);
    for (const auto& [var, obj] : best.sub.bindings()) anchors.insert(obj.name);

    std::set<std::string> state_predicates;
    for (const RuleEntry& rule : snap.rules) state_predicates.insert(rule.rule.conclusion.predicate);

    Grounding g;
    g.rule_id = best_rule->id;
    g.fact_ids.push_back(op_fact.id);
    g.substitution = std::move(best.sub);
    for (const FactEntry& fact : snap.facts) {
        if (fact.id == op_fact.id || fact.atom.args.empty()) continue;
        if (!state_predicates.count(fact.atom.predicate)) continue;
        if (anchors.count(fact.atom.args.front().name)) g.state_fact_ids.push_back(fact.id);
    }
    return g;
}

}  // namespace rulemem
