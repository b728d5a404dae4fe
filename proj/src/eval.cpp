#include "rulemem/eval.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

using nlohmann::json;

namespace rulemem {

namespace {

std::string lower_trim(const std::string& s) {
    std::string out;
    for (char c : s) out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    while (!out.empty() && std::isspace(static_cast<unsigned char>(out.front()))) out.erase(out.begin());
    while (!out.empty() && (std::isspace(static_cast<unsigned char>(out.back())) || out.back() == '.'))
        out.pop_back();
    return out;
}

// "the rose and the letter" -> {"rose", "letter"}; "nothing" -> {}
std::set<std::string> content_set(const std::string& text) {
    std::set<std::string> items;
    std::string normalized = lower_trim(text);
    std::replace(normalized.begin(), normalized.end(), ',', ' ');
    std::string token;
    std::istringstream in(normalized);
    std::vector<std::string> words;
    while (in >> token) words.push_back(token);
    std::vector<std::string> pieces;
    std::string current;
    for (const auto& w : words) {
        if (w == "and") {
            if (!current.empty()) pieces.push_back(current);
            current.clear();
        } else {
            if (!current.empty()) current += ' ';
            current += w;
        }
    }
    if (!current.empty()) pieces.push_back(current);
    for (std::string piece : pieces) {
        for (const char* article : {"the ", "a ", "an "})
            if (piece.rfind(article, 0) == 0) piece = piece.substr(std::string(article).size());
        if (piece.empty() || piece == "nothing") continue;
        items.insert(piece);
    }
    return items;
}

}  // namespace

bool answers_match(TaskKind mode, const std::string& answer, const std::string& gold) {
    if (mode == TaskKind::state_tracking) return content_set(answer) == content_set(gold);
    return lower_trim(answer) == lower_trim(gold);
}

EvalReport evaluate(const std::vector<InstanceSpec>& instances, const EngineConfig& config,
                    const PromptRegistry& registry, Gateway* gateway) {
    EvalReport report;
    report.total = static_cast<int>(instances.size());
    int correct = 0, direct = 0;

    for (const auto& instance : instances) {
        InstanceOutcome row;
        row.id = instance.id;
        row.mode = instance.mode;
        row.gold = instance.gold;
        row.depth = instance.depth;
        try {
            Engine engine(config, registry, gateway);
            const RunOutcome outcome = engine.run(instance);
            row.answer = outcome.answer;
            row.solved_directly = outcome.solved_directly;
            row.steps_used = outcome.steps_used;
            row.correct = answers_match(instance.mode, outcome.answer, instance.gold);
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        correct += row.correct ? 1 : 0;
        direct += row.solved_directly ? 1 : 0;
        if (row.depth) {
            auto& [d_correct, d_total] = report.per_depth[*row.depth];
            d_correct += row.correct ? 1 : 0;
            ++d_total;
        }
        report.outcomes.push_back(std::move(row));
    }
    if (report.total > 0) {
        report.accuracy = static_cast<double>(correct) / report.total;
        report.execution_rate = static_cast<double>(direct) / report.total;
    }
    return report;
}

json EvalReport::to_json() const {
    json j;
    j["accuracy"] = accuracy;
    j["execution_rate"] = execution_rate;
    j["total"] = total;
    json depths = json::object();
    for (const auto& [depth, counts] : per_depth)
        depths[std::to_string(depth)] = {{"correct", counts.first}, {"total", counts.second}};
    j["per_depth"] = std::move(depths);
    json rows = json::array();
    for (const auto& row : outcomes) {
        json r = {{"id", row.id},
                  {"mode", to_string(row.mode)},
                  {"answer", row.answer},
                  {"gold", row.gold},
                  {"correct", row.correct},
                  {"solved_directly", row.solved_directly},
                  {"steps_used", row.steps_used}};
        if (row.depth) r["depth"] = *row.depth;
        if (!row.error.empty()) r["error"] = row.error;
        rows.push_back(std::move(r));
    }
    j["instances"] = std::move(rows);
    return j;
}

std::string EvalReport::table() const {
    std::ostringstream out;
    char line[128];
    std::snprintf(line, sizeof line, "instances: %d  accuracy: %.4f  execution_rate: %.4f\n", total,
                  accuracy, execution_rate);
    out << line;
    if (!per_depth.empty()) {
        out << "depth  correct/total\n";
        for (const auto& [depth, counts] : per_depth) {
            std::snprintf(line, sizeof line, "%5d  %d/%d\n", depth, counts.first, counts.second);
            out << line;
        }
    }
    for (const auto& row : outcomes) {
        std::snprintf(line, sizeof line, "%-12s %-5s direct=%d steps=%d  %s -> %s\n", row.id.c_str(),
                      row.correct ? "ok" : "WRONG", row.solved_directly ? 1 : 0, row.steps_used,
                      row.gold.c_str(), row.answer.c_str());
        out << line;
    }
    return out.str();
}

}  // namespace rulemem
