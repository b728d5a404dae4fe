#include "rulemem/memory.hpp"

#include <algorithm>
#include <sstream>

namespace rulemem {

const std::string& MemorySchema::resolve_predicate(std::string_view raw, int arity) {
    std::string name = normalize_predicate(raw);
    auto [it, inserted] = predicate_arities_.emplace(std::move(name), std::set<int>{});
    if (inserted) predicate_order_.push_back(it->first);
    it->second.insert(arity);
    return it->first;
}

const std::string& MemorySchema::resolve_object(std::string_view raw) {
    std::string name = normalize_object(raw);
    auto [it, inserted] = object_set_.insert(std::move(name));
    if (inserted) object_order_.push_back(*it);
    return *it;
}

bool MemorySchema::has_predicate(std::string_view normalized) const {
    return predicate_arities_.count(std::string(normalized)) > 0;
}

bool MemorySchema::has_object(std::string_view normalized) const {
    return object_set_.count(std::string(normalized)) > 0;
}

const std::set<int>* MemorySchema::arities(std::string_view predicate) const {
    auto it = predicate_arities_.find(std::string(predicate));
    return it == predicate_arities_.end() ? nullptr : &it->second;
}

namespace {
std::string join_or_null(const std::vector<std::string>& items) {
    if (items.empty()) return "null";
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ", ";
        out += items[i];
    }
    return out;
}
}  // namespace

std::string MemorySchema::predicates_text() const { return join_or_null(predicate_order_); }
std::string MemorySchema::objects_text() const { return join_or_null(object_order_); }

std::string schema_resolve(std::string_view name, SymbolKind kind, MemorySchema& schema,
                           int arity) {
    return kind == SymbolKind::predicate ? schema.resolve_predicate(name, arity)
                                         : schema.resolve_object(name);
}

std::string FactOrigin::to_string() const {
    return kind == Kind::input ? "input" : "inferred:" + std::to_string(step);
}

const FactEntry* Snapshot::fact_by_id(int id) const {
    for (const auto& f : facts)
        if (f.id == id) return &f;
    return nullptr;
}

const RuleEntry* Snapshot::rule_by_id(int id) const {
    for (const auto& r : rules)
        if (r.id == id) return &r;
    return nullptr;
}

WriteOutcome WorkingMemory::write_fact(const Atom& atom, std::string text, FactOrigin origin) {
    if (!atom.ground()) throw NonGroundFact("cannot store non-ground fact: " + render(atom));

    Atom resolved;
    resolved.predicate = schema_.resolve_predicate(atom.predicate, atom.arity());
    for (const Term& arg : atom.args)
        resolved.args.push_back(Term{TermKind::object, schema_.resolve_object(arg.name)});

    FactEntry* conflict = nullptr;
    for (auto& f : facts_) {
        if (!f.active) continue;
        if (f.atom == resolved)
            return {WriteOutcome::Kind::duplicate, f.id, 0};
        if (mode_ == UpdateMode::stateful && f.atom.predicate == resolved.predicate &&
            !f.atom.args.empty() && !resolved.args.empty() &&
            f.atom.args.front() == resolved.args.front())
            conflict = &f;
    }

    FactEntry entry;
    entry.id = static_cast<int>(facts_.size()) + 1;
    entry.atom = std::move(resolved);
    entry.text = std::move(text);
    entry.origin = origin;

    if (conflict) {
        conflict->active = false;
        const int old_id = conflict->id;
        facts_.push_back(std::move(entry));
        return {WriteOutcome::Kind::updated, facts_.back().id, old_id};
    }
    facts_.push_back(std::move(entry));
    return {WriteOutcome::Kind::added, facts_.back().id, 0};
}

int WorkingMemory::write_rule(const Rule& rule, std::string text) {
    const std::string canonical = alpha_canonical(rule);
    if (auto it = rule_ids_by_canonical_.find(canonical); it != rule_ids_by_canonical_.end())
        return it->second;

    Rule resolved = rule;
    auto resolve = [this](Atom& a) {
        a.predicate = schema_.resolve_predicate(a.predicate, a.arity());
        for (Term& t : a.args)
            if (t.is_object()) t.name = schema_.resolve_object(t.name);
    };
    resolve(resolved.conclusion);
    for (Atom& p : resolved.premises) resolve(p);

    RuleEntry entry;
    entry.id = static_cast<int>(rules_.size()) + 1;
    entry.conclusion_warning = !resolved.unbound_conclusion_variables().empty();
    entry.rule = std::move(resolved);
    entry.text = std::move(text);
    rules_.push_back(std::move(entry));
    rule_ids_by_canonical_.emplace(canonical, rules_.back().id);
    return rules_.back().id;
}

Snapshot WorkingMemory::snapshot() const {
    Snapshot snap;
    for (const auto& f : facts_)
        if (f.active) snap.facts.push_back(f);
    snap.rules = rules_;
    snap.schema = schema_;
    return snap;
}

const FactEntry* WorkingMemory::fact_by_id(int id) const {
    if (id < 1 || id > static_cast<int>(facts_.size())) return nullptr;
    return &facts_[static_cast<std::size_t>(id) - 1];
}

std::size_t WorkingMemory::active_fact_count() const {
    return static_cast<std::size_t>(
        std::count_if(facts_.begin(), facts_.end(), [](const FactEntry& f) { return f.active; }));
}

std::string WorkingMemory::dump() const {
    std::ostringstream out;
    for (const auto& f : facts_)
        out << "F " << f.id << ' ' << (f.active ? 1 : 0) << ' ' << f.origin.to_string() << " | "
            << render(f.atom) << " | " << f.text << '\n';
    for (const auto& r : rules_)
        out << "R " << r.id << " | " << render(r.rule) << " | " << r.text << '\n';

    out << "S predicates:";
    const auto& preds = schema_.predicates();
    for (std::size_t i = 0; i < preds.size(); ++i) {
        out << (i ? ", " : " ") << preds[i];
        if (const auto* ars = schema_.arities(preds[i])) {
            out << '/';
            bool first = true;
            for (int a : *ars) {
                if (!first) out << '|';
                out << a;
                first = false;
            }
        }
    }
    out << '\n';
    out << "S objects:";
    const auto& objs = schema_.objects();
    for (std::size_t i = 0; i < objs.size(); ++i) out << (i ? ", " : " ") << objs[i];
    out << '\n';
    return out.str();
}

}  // namespace rulemem
