#include "rulemem/dataset.hpp"

#include <fstream>
#include <regex>

#include "rulemem/term.hpp"

using nlohmann::json;

namespace rulemem {

namespace {

std::vector<SymbolicText> pairs_from(const json& j, const char* key) {
    std::vector<SymbolicText> out;
    if (!j.contains(key)) return out;
    for (const auto& item : j.at(key))
        out.push_back({item.at("text").get<std::string>(), item.at("symbolic").get<std::string>()});
    return out;
}

std::vector<std::string> strings_from(const json& j, const char* key) {
    std::vector<std::string> out;
    if (!j.contains(key)) return out;
    for (const auto& item : j.at(key)) out.push_back(item.get<std::string>());
    return out;
}

json pairs_to_json(const std::vector<SymbolicText>& items) {
    json out = json::array();
    for (const auto& item : items) out.push_back({{"text", item.text}, {"symbolic", item.symbolic}});
    return out;
}

void validate(const InstanceSpec& spec) {
    if (spec.id.empty()) throw std::runtime_error("missing \"id\"");
    if (spec.query.empty()) throw std::runtime_error("missing \"query\"");
    if (spec.gold.empty()) throw std::runtime_error("missing \"gold\"");

    const bool has_raw =
        !spec.context_facts.empty() || !spec.context_rules.empty() || !spec.context_ops.empty();
    if (spec.preparsed() && has_raw)
        throw std::runtime_error("instance mixes pre-parsed and raw context forms");

    switch (spec.mode) {
        case TaskKind::kinship:
            if (spec.query_args.size() != 2)
                throw std::runtime_error("kinship query needs two entities");
            break;
        case TaskKind::logic:
            if (spec.query_atom.empty())
                throw std::runtime_error("logic instance needs \"query_atom\"");
            parse_atom(spec.query_atom, ParseContext::fact);
            break;
        case TaskKind::constraint:
            if (spec.options.empty())
                throw std::runtime_error("constraint instance needs \"options\"");
            if (spec.rules.empty() && spec.context_rules.empty())
                throw std::runtime_error("constraint instance needs rules");
            break;
        case TaskKind::state_tracking:
            if (spec.query_args.size() != 1)
                throw std::runtime_error("state instance needs the queried box");
            if (spec.ops.empty() && spec.context_ops.empty())
                throw std::runtime_error("state instance needs operations");
            break;
    }

    for (const auto& f : spec.facts) parse_atom(f.symbolic, ParseContext::fact);
    for (const auto& o : spec.ops) parse_atom(o.symbolic, ParseContext::fact);
    for (const auto& r : spec.rules) parse_rule(r.symbolic);
    for (const auto& opt : spec.options)
        for (const auto& f : opt.facts) parse_atom(f.symbolic, ParseContext::fact);
}

}  // namespace

InstanceSpec instance_from_json(const json& j) {
    InstanceSpec spec;
    spec.id = j.value("id", "");
    spec.mode = task_kind_from_string(j.value("mode", "kinship"));
    spec.query = j.value("query", "");
    spec.query_args = strings_from(j, "query_args");
    spec.query_atom = j.value("query_atom", "");
    spec.gold = j.value("gold", "");
    if (j.contains("depth")) spec.depth = j.at("depth").get<int>();

    spec.facts = pairs_from(j, "facts");
    spec.rules = pairs_from(j, "rules");
    spec.ops = pairs_from(j, "ops");
    spec.context_facts = strings_from(j, "context_facts");
    spec.context_rules = strings_from(j, "context_rules");
    spec.context_ops = strings_from(j, "context_ops");
    spec.context = j.value("context", "");

    if (j.contains("options")) {
        for (const auto& opt : j.at("options")) {
            OptionSpec o;
            o.label = opt.at("label").get<std::string>();
            o.text = opt.at("text").get<std::string>();
            o.facts = pairs_from(opt, "facts");
            spec.options.push_back(std::move(o));
        }
    }
    spec.polarity = j.value("polarity", "positive") == "negative" ? Polarity::negative
                                                                  : Polarity::positive;

    // Common query phrasings fill the structured slots when absent.
    if (spec.query_args.empty()) {
        static const std::regex kinship_q(R"(How is (.+) related to (.+)\?)");
        static const std::regex box_q(R"((Box \d+))");
        std::smatch m;
        if (spec.mode == TaskKind::kinship && std::regex_search(spec.query, m, kinship_q))
            spec.query_args = {m[1].str(), m[2].str()};
        else if (spec.mode == TaskKind::state_tracking && std::regex_search(spec.query, m, box_q))
            spec.query_args = {m[1].str()};
    }
    validate(spec);
    return spec;
}

json to_json(const InstanceSpec& spec) {
    json j;
    j["id"] = spec.id;
    j["mode"] = to_string(spec.mode);
    j["query"] = spec.query;
    if (!spec.query_args.empty()) j["query_args"] = spec.query_args;
    if (!spec.query_atom.empty()) j["query_atom"] = spec.query_atom;
    j["gold"] = spec.gold;
    if (spec.depth) j["depth"] = *spec.depth;
    if (!spec.facts.empty()) j["facts"] = pairs_to_json(spec.facts);
    if (!spec.rules.empty()) j["rules"] = pairs_to_json(spec.rules);
    if (!spec.ops.empty()) j["ops"] = pairs_to_json(spec.ops);
    if (!spec.context_facts.empty()) j["context_facts"] = spec.context_facts;
    if (!spec.context_rules.empty()) j["context_rules"] = spec.context_rules;
    if (!spec.context_ops.empty()) j["context_ops"] = spec.context_ops;
    if (!spec.context.empty()) j["context"] = spec.context;
    if (!spec.options.empty()) {
        json opts = json::array();
        for (const auto& o : spec.options) {
            json jo = {{"label", o.label}, {"text", o.text}};
            if (!o.facts.empty()) jo["facts"] = pairs_to_json(o.facts);
            opts.push_back(std::move(jo));
        }
        j["options"] = std::move(opts);
        j["polarity"] = spec.polarity == Polarity::negative ? "negative" : "positive";
    }
    return j;
}

std::vector<InstanceSpec> load_dataset(const std::filesystem::path& path,
                                       std::optional<TaskKind> expected_mode) {
    std::ifstream in(path);
    if (!in) throw FormatError(0, "cannot open dataset: " + path.string());

    std::vector<InstanceSpec> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            json j = json::parse(line);
            InstanceSpec spec = instance_from_json(j);
            if (expected_mode && spec.mode != *expected_mode)
                throw std::runtime_error("expected mode " + to_string(*expected_mode) + ", got " +
                                         to_string(spec.mode));
            out.push_back(std::move(spec));
        } catch (const FormatError&) {
            throw;
        } catch (const std::exception& e) {
            throw FormatError(line_no, e.what());
        }
    }
    return out;
}

void save_dataset(const std::vector<InstanceSpec>& instances, const std::filesystem::path& path) {
    std::ofstream out(path);
    for (const auto& spec : instances) out << to_json(spec).dump() << '\n';
}

}  // namespace rulemem
