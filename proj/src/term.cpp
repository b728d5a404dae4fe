#include "rulemem/term.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace rulemem {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

// Splits on commas at parenthesis depth zero.
std::vector<std::string_view> split_top_level(std::string_view s) {
    std::vector<std::string_view> out;
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        if (c == '(') ++depth;
        else if (c == ')') --depth;
        else if (c == ',' && depth == 0) {
            out.push_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    out.push_back(s.substr(start));
    return out;
}

}  // namespace

std::string normalize_predicate(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    bool pending_sep = false;
    for (char c : trim(raw)) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            pending_sep = true;
            continue;
        }
        if (pending_sep) {
            out.push_back('_');
            pending_sep = false;
        }
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

std::string normalize_object(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    bool pending_sep = false;
    for (char c : trim(raw)) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            pending_sep = true;
            continue;
        }
        if (pending_sep) {
            out.push_back(' ');
            pending_sep = false;
        }
        out.push_back(c);
    }
    return out;
}

bool is_variable_token(std::string_view token) {
    if (token.empty() || token.size() > 3) return false;
    if (!std::isupper(static_cast<unsigned char>(token.front()))) return false;
    for (char c : token)
        if (std::isspace(static_cast<unsigned char>(c))) return false;
    return true;
}

Term make_variable(std::string name) { return Term{TermKind::variable, std::move(name)}; }

Term make_object(std::string_view name) { return Term{TermKind::object, normalize_object(name)}; }

bool Atom::ground() const {
    return std::all_of(args.begin(), args.end(), [](const Term& t) { return t.is_object(); });
}

std::vector<std::string> Atom::variables() const {
    std::vector<std::string> out;
    for (const Term& t : args)
        if (t.is_variable() && std::find(out.begin(), out.end(), t.name) == out.end())
            out.push_back(t.name);
    return out;
}

std::vector<std::string> Rule::premise_variables() const {
    std::vector<std::string> out;
    for (const Atom& p : premises)
        for (const std::string& v : p.variables())
            if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    return out;
}

std::vector<std::string> Rule::unbound_conclusion_variables() const {
    std::vector<std::string> out;
    const auto bound = premise_variables();
    for (const std::string& v : conclusion.variables())
        if (std::find(bound.begin(), bound.end(), v) == bound.end()) out.push_back(v);
    return out;
}

bool Substitution::bind(const std::string& var, const Term& object) {
    auto [it, inserted] = bindings_.emplace(var, object);
    return inserted || it->second == object;
}

const Term* Substitution::lookup(const std::string& var) const {
    auto it = bindings_.find(var);
    return it == bindings_.end() ? nullptr : &it->second;
}

namespace {

Term classify_arg(std::string_view token, ParseContext ctx,
                  const std::vector<std::string>* premise_vars) {
    std::string word = normalize_object(token);
    if (ctx == ParseContext::fact) return Term{TermKind::object, std::move(word)};
    if (is_variable_token(word)) return Term{TermKind::variable, std::move(word)};
    // Conclusion tokens matching a premise variable stay variables even past
    // the length cutoff.
    if (premise_vars && word.find(' ') == std::string::npos && !word.empty() &&
        std::isupper(static_cast<unsigned char>(word.front())) &&
        std::find(premise_vars->begin(), premise_vars->end(), word) != premise_vars->end())
        return Term{TermKind::variable, std::move(word)};
    return Term{TermKind::object, std::move(word)};
}

Atom parse_atom_impl(std::string_view input, ParseContext ctx,
                     const std::vector<std::string>* premise_vars) {
    std::string_view s = trim(input);
    if (!s.empty() && s.front() == '[' && s.back() == ']') s = trim(s.substr(1, s.size() - 2));
    if (!s.empty() && s.back() == '.') s = trim(s.substr(0, s.size() - 1));
    if (s.empty()) throw MalformedTerm("empty term");

    const std::size_t opens = std::count(s.begin(), s.end(), '(');
    const std::size_t closes = std::count(s.begin(), s.end(), ')');
    if (opens != 1 || closes != 1 || s.back() != ')')
        throw MalformedTerm("unbalanced parentheses in '" + std::string(s) + "'");

    const std::size_t lparen = s.find('(');
    std::string predicate = normalize_predicate(s.substr(0, lparen));
    if (predicate.empty()) throw MalformedTerm("empty predicate in '" + std::string(s) + "'");
    if (predicate.find(":-") != std::string::npos)
        throw MalformedTerm("':-' inside predicate name");

    Atom atom;
    atom.predicate = std::move(predicate);
    std::string_view inside = trim(s.substr(lparen + 1, s.size() - lparen - 2));
    if (inside.empty()) return atom;

    for (std::string_view piece : split_top_level(inside)) {
        piece = trim(piece);
        if (piece.empty()) throw MalformedTerm("empty argument in '" + std::string(s) + "'");
        atom.args.push_back(classify_arg(piece, ctx, premise_vars));
    }
    return atom;
}

}  // namespace

Atom parse_atom(std::string_view input, ParseContext ctx) {
    return parse_atom_impl(input, ctx, nullptr);
}

Rule parse_rule(std::string_view input) {
    std::string_view s = trim(input);
    if (!s.empty() && s.back() == '.') s = trim(s.substr(0, s.size() - 1));

    const std::size_t sep = s.find(":-");
    if (sep == std::string_view::npos) throw MalformedRule("missing ':-' in '" + std::string(s) + "'");
    if (s.find(":-", sep + 2) != std::string_view::npos)
        throw MalformedRule("nested ':-' in '" + std::string(s) + "'");

    std::string_view head = trim(s.substr(0, sep));
    std::string_view body = trim(s.substr(sep + 2));
    if (body.empty()) throw MalformedRule("rule has no premises: '" + std::string(s) + "'");

    Rule rule;
    for (std::string_view piece : split_top_level(body)) {
        piece = trim(piece);
        if (piece.empty()) throw MalformedRule("empty premise in '" + std::string(s) + "'");
        rule.premises.push_back(parse_atom_impl(piece, ParseContext::pattern, nullptr));
    }
    const auto premise_vars = rule.premise_variables();
    rule.conclusion = parse_atom_impl(head, ParseContext::pattern, &premise_vars);
    return rule;
}

std::string render(const Atom& atom) {
    std::ostringstream out;
    out << atom.predicate << '(';
    for (std::size_t i = 0; i < atom.args.size(); ++i) {
        if (i) out << ", ";
        out << atom.args[i].name;
    }
    out << ')';
    return out.str();
}

std::string render(const Rule& rule) {
    std::ostringstream out;
    out << render(rule.conclusion) << ":-";
    for (std::size_t i = 0; i < rule.premises.size(); ++i) {
        if (i) out << ", ";
        out << render(rule.premises[i]);
    }
    return out.str();
}

std::optional<Substitution> unify_args(const Atom& pattern, const Atom& ground,
                                       const Substitution& seed) {
    if (pattern.args.size() != ground.args.size()) return std::nullopt;
    Substitution s = seed;
    for (std::size_t i = 0; i < pattern.args.size(); ++i) {
        const Term& p = pattern.args[i];
        const Term& g = ground.args[i];
        if (g.is_variable()) return std::nullopt;  // ground side must be ground
        if (p.is_object()) {
            if (p.name != g.name) return std::nullopt;
        } else if (!s.bind(p.name, g)) {
            return std::nullopt;
        }
    }
    return s;
}

std::optional<Substitution> unify_atom(const Atom& pattern, const Atom& ground,
                                       const Substitution& seed) {
    if (pattern.predicate != ground.predicate) return std::nullopt;
    return unify_args(pattern, ground, seed);
}

Atom apply_substitution(const Atom& atom, const Substitution& s) {
    Atom out = atom;
    for (Term& t : out.args) {
        if (!t.is_variable()) continue;
        if (const Term* bound = s.lookup(t.name)) t = *bound;
    }
    return out;
}

std::string alpha_canonical(const Rule& rule) {
    std::map<std::string, std::string> renames;
    auto canon = [&renames](const Atom& atom) {
        Atom out = atom;
        for (Term& t : out.args) {
            if (!t.is_variable()) continue;
            auto it = renames.find(t.name);
            if (it == renames.end())
                it = renames.emplace(t.name, "V" + std::to_string(renames.size() + 1)).first;
            t.name = it->second;
        }
        return out;
    };
    Rule renamed;
    renamed.conclusion = canon(rule.conclusion);
    for (const Atom& p : rule.premises) renamed.premises.push_back(canon(p));
    return render(renamed);
}

}  // namespace rulemem
