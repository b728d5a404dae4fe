#include "rulemem/implement.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

namespace rulemem {

std::string to_string(Judgement j) {
    switch (j) {
        case Judgement::none: return "none";
        case Judgement::solves_query: return "solves_query";
        case Judgement::not_solved: return "not_solved";
        case Judgement::conflict: return "conflict";
    }
    return "unknown";
}

ImplementationResult symbolic_implement(const Grounding& grounding, const Rule& rule,
                                        const std::vector<FactEntry>&) {
    const Atom derived = apply_substitution(rule.conclusion, grounding.substitution);
    if (!derived.ground()) {
        std::string missing;
        for (const auto& v : derived.variables()) missing += (missing.empty() ? "" : ", ") + v;
        throw UncoveredConclusionVariable("conclusion variables unbound: " + missing + " in " +
                                          render(rule.conclusion));
    }
    ImplementationResult result;
    result.new_facts.push_back(InferredFact{derived, verbalize_atom(derived)});
    return result;
}

std::string verbalize_atom(const Atom& atom) {
    const std::string& p = atom.predicate;
    auto arg = [&atom](std::size_t i) { return atom.args[i].name; };

    if (p == "contains" && !atom.args.empty()) {
        std::string items;
        for (std::size_t i = 1; i < atom.args.size(); ++i) {
            if (i > 1) items += " and ";
            items += arg(i);
        }
        if (items.empty()) items = "nothing";
        return arg(0) + " contains " + items + ".";
    }
    if (atom.args.size() == 2 && p.size() > 3 && p.rfind("_of") == p.size() - 3) {
        std::string rel = p.substr(0, p.size() - 3);
        std::replace(rel.begin(), rel.end(), '_', ' ');
        return arg(0) + " is the " + rel + " of " + arg(1) + ".";
    }
    if (atom.args.size() == 1) {
        std::string prop = p;
        bool negated = false;
        if (prop.rfind("not_", 0) == 0) {
            negated = true;
            prop = prop.substr(4);
        }
        std::replace(prop.begin(), prop.end(), '_', ' ');
        return arg(0) + (negated ? " is not " : " is ") + prop + ".";
    }
    return render(atom) + ".";
}

namespace {

// Deterministic box-state transition: put/remove/move applied to the grounded
// state facts. Emits one full contents fact per touched box, destination first
// for moves; "nothing" encodes an empty box.
ImplementationResult implement_state_operation(const ImplementRequest& request) {
    const Atom& op = request.op_fact->atom;

    std::map<std::string, std::vector<std::string>> state;
    for (const FactEntry& f : request.state_facts) {
        if (f.atom.args.empty()) continue;
        std::vector<std::string> items;
        for (std::size_t i = 1; i < f.atom.args.size(); ++i)
            if (f.atom.args[i].name != "nothing") items.push_back(f.atom.args[i].name);
        state[f.atom.args.front().name] = std::move(items);
    }

    auto add = [](std::vector<std::string>& items, const std::string& item) {
        if (std::find(items.begin(), items.end(), item) == items.end()) items.push_back(item);
    };
    auto drop = [](std::vector<std::string>& items, const std::string& item) {
        items.erase(std::remove(items.begin(), items.end(), item), items.end());
    };

    const std::string& pred = op.predicate;
    std::vector<std::string> touched;
    if (pred == "put_into" && op.args.size() >= 2) {
        const std::string box = op.args.back().name;
        for (std::size_t i = 0; i + 1 < op.args.size(); ++i) add(state[box], op.args[i].name);
        touched.push_back(box);
    } else if (pred == "remove_from" && op.args.size() >= 2) {
        const std::string box = op.args.back().name;
        for (std::size_t i = 0; i + 1 < op.args.size(); ++i) drop(state[box], op.args[i].name);
        touched.push_back(box);
    } else if (pred == "move_from_to" && op.args.size() >= 3) {
        const std::string src = op.args[op.args.size() - 2].name;
        const std::string dst = op.args.back().name;
        std::vector<std::string> moved;
        if (op.args.size() == 3 && op.args.front().name == "the contents")
            moved = state[src];
        else
            for (std::size_t i = 0; i + 2 < op.args.size(); ++i) moved.push_back(op.args[i].name);
        for (const std::string& item : moved) {
            drop(state[src], item);
            add(state[dst], item);
        }
        touched.push_back(dst);
        if (src != dst) touched.push_back(src);
    }

    ImplementationResult result;
    for (const std::string& box : touched) {
        Atom atom;
        atom.predicate = "contains";
        atom.args.push_back(make_object(box));
        if (state[box].empty())
            atom.args.push_back(make_object("nothing"));
        else
            for (const std::string& item : state[box]) atom.args.push_back(make_object(item));
        result.new_facts.push_back(InferredFact{atom, verbalize_atom(atom)});
    }
    return result;
}

}  // namespace

ImplementationResult SymbolicImplementer::implement(const ImplementRequest& request) {
    if (request.task == TaskKind::state_tracking && request.op_fact)
        return implement_state_operation(request);
    // Constraint conflicts are a judgement over natural-language rules; there
    // is nothing to derive symbolically, so such runs fall through to backup.
    if (request.task == TaskKind::constraint) return {};
    return symbolic_implement(request.grounding, request.rule, request.premise_facts);
}

namespace {

std::string_view trim_view(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool starts_with_marker(std::string_view line, std::string_view marker) {
    return line.size() >= marker.size() &&
           std::equal(marker.begin(), marker.end(), line.begin(), [](char a, char b) {
               return std::tolower(static_cast<unsigned char>(a)) ==
                      std::tolower(static_cast<unsigned char>(b));
           });
}

// "<NL sentence> [symbolic(...)]" -> InferredFact; nullopt when the line has no
// parseable bracketed atom.
std::optional<InferredFact> parse_fact_line(std::string_view line) {
    const std::size_t open = line.rfind('[');
    if (open == std::string_view::npos) return std::nullopt;
    const std::size_t close = line.find(']', open);
    if (close == std::string_view::npos) return std::nullopt;
    Atom atom;
    try {
        atom = parse_atom(line.substr(open + 1, close - open - 1), ParseContext::fact);
    } catch (const MalformedTerm&) {
        return std::nullopt;
    }
    std::string_view nl = trim_view(line.substr(0, open));
    if (nl.rfind("- ", 0) == 0) nl.remove_prefix(2);
    return InferredFact{std::move(atom), std::string(trim_view(nl))};
}

}  // namespace

ImplementationResult parse_implementation_response(const std::string& text, TaskKind task) {
    ImplementationResult result;
    std::istringstream in(text);
    std::string raw_line;
    bool in_facts = false;
    while (std::getline(in, raw_line)) {
        std::string_view line = trim_view(raw_line);
        if (line.empty()) {
            in_facts = false;
            continue;
        }
        if (starts_with_marker(line, "New facts:") || starts_with_marker(line, "New fact:")) {
            in_facts = true;
            const std::size_t colon = line.find(':');
            std::string_view rest = trim_view(line.substr(colon + 1));
            if (rest.empty()) continue;
            if (auto fact = parse_fact_line(rest))
                result.new_facts.push_back(std::move(*fact));
            else
                ++result.skipped_lines;
            continue;
        }
        if (starts_with_marker(line, "Judgement:")) {
            in_facts = false;
            std::string_view rest = trim_view(line.substr(line.find(':') + 1));
            if (starts_with_marker(rest, "Yes"))
                result.judgement =
                    task == TaskKind::constraint ? Judgement::conflict : Judgement::solves_query;
            else if (starts_with_marker(rest, "No"))
                result.judgement = Judgement::not_solved;
            continue;
        }
        if (starts_with_marker(line, "Rule Implementation:")) {
            in_facts = false;
            continue;
        }
        if (in_facts) {
            if (auto fact = parse_fact_line(line))
                result.new_facts.push_back(std::move(*fact));
            else
                ++result.skipped_lines;
        }
    }
    return result;
}

std::string format_fact_list(TaskKind task, const std::vector<FactEntry>& facts) {
    std::ostringstream out;
    if (task == TaskKind::constraint) {
        for (std::size_t i = 0; i < facts.size(); ++i) {
            if (i) out << '\n';
            out << "- " << facts[i].text;
        }
        return out.str();
    }
    for (std::size_t i = 0; i < facts.size(); ++i) {
        if (i) out << ' ';
        out << facts[i].id << ". " << facts[i].text;
    }
    return out.str();
}

PromptSlots implement_slots(const ImplementRequest& request) {
    PromptSlots slots;
    slots.objects = request.schema_objects;
    slots.predicates = request.schema_predicates;
    slots.query = request.query;
    slots.rule = request.rule_text;
    slots.context = request.context;
    slots.facts = format_fact_list(request.task, request.premise_facts);
    if (request.task == TaskKind::state_tracking) {
        std::ostringstream states;
        for (std::size_t i = 0; i < request.state_facts.size(); ++i) {
            if (i) states << ' ';
            states << request.state_facts[i].text;
        }
        slots.state_facts = states.str();
        if (request.op_fact) slots.op_facts = request.op_fact->text;
    }
    return slots;
}

ImplementationResult llm_implement(const ImplementRequest& request, const PromptRegistry& registry,
                                   Gateway& gateway) {
    const PromptText prompt = build_prompt(request.task, implement_slots(request), registry);
    const std::string response = gateway.complete(prompt.system, prompt.user);
    ImplementationResult result = parse_implementation_response(response, request.task);
    result.raw = "SYSTEM:\n" + prompt.system + "\nUSER:\n" + prompt.user + "\nRESPONSE:\n" + response;
    return result;
}

ImplementationResult LlmImplementer::implement(const ImplementRequest& request) {
    return llm_implement(request, registry_, gateway_);
}

}  // namespace rulemem
