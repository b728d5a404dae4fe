// Regenerates data/cassettes/*.jsonl from the replay fixtures by running the
// engine against a scripted transport in record mode. The scripted responses
// follow the same output formats the rule-implementation prompts ask for.
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "rulemem/engine.hpp"
#include "rulemem/eval.hpp"

using namespace rulemem;
using nlohmann::json;

namespace {

struct Scripted {
    std::vector<std::string> needles;  // all must occur in the live prompt section
    std::string content;
};

std::string wrap_completion(const std::string& model, const std::string& content) {
    json body = {{"id", "chatcmpl-fixture"},
                 {"object", "chat.completion"},
                 {"model", model},
                 {"choices",
                  {{{"index", 0},
                    {"message", {{"role", "assistant"}, {"content", content}}},
                    {"finish_reason", "stop"}}}}};
    return body.dump();
}

Gateway::Transport scripted_transport(std::string model, std::vector<Scripted> script) {
    return [model = std::move(model), script = std::move(script)](const std::string& request_body) {
        const json request = json::parse(request_body);
        std::string user;
        for (const auto& message : request.at("messages"))
            if (message.at("role") == "user") user = message.at("content").get<std::string>();

        // match against the live section only; the few-shot exemplars repeat
        // most phrases
        const std::string marker = "### Here's what you need to do.";
        const std::size_t pos = user.find(marker);
        const std::string live = pos == std::string::npos ? user : user.substr(pos);

        for (const auto& entry : script) {
            bool all = true;
            for (const auto& needle : entry.needles)
                if (live.find(needle) == std::string::npos) {
                    all = false;
                    break;
                }
            if (all) return wrap_completion(model, entry.content);
        }
        std::cerr << "scripted transport: no match for prompt:\n" << live << "\n";
        throw std::runtime_error("unscripted prompt");
    };
}

int failures = 0;

void expect(bool ok, const std::string& what) {
    std::cout << (ok ? "[ok]   " : "[FAIL] ") << what << "\n";
    if (!ok) ++failures;
}

void record_fixture(const std::string& name, const std::filesystem::path& fixture,
                    const std::filesystem::path& cassette, std::vector<Scripted> script,
                    const std::string& expected_answer,
                    EngineConfig::ImplementerKind implementer) {
    std::filesystem::remove(cassette);

    GatewayConfig gateway_config;
    gateway_config.mode = GatewayMode::record;
    gateway_config.cassette_path = cassette.string();
    gateway_config.backoff_ms = 0;
    Gateway gateway(gateway_config, scripted_transport(gateway_config.model, std::move(script)));

    EngineConfig config;
    config.implementer = implementer;
    config.backup_enabled = true;

    const auto instances = load_dataset(fixture);
    const PromptRegistry registry = PromptRegistry::embedded();
    Engine engine(config, registry, &gateway);
    const RunOutcome outcome = engine.run(instances.at(0));

    expect(outcome.answer == expected_answer,
           name + ": answer '" + outcome.answer + "' (expected '" + expected_answer + "'), " +
               std::to_string(gateway.cassette_size()) + " exchanges recorded");
}

std::vector<Scripted> kinship_script() {
    return {
        {{"Fact List:", "Rule: If B is the grandson of A"},
         "Rule Implementation: According to the rule, since Don is the grandson of James, and Lena "
         "is the sister of Don, we can infer that Lena is the granddaughter of James.\n"
         "New fact: Lena is the granddaughter of James. [granddaughter_of(Lena, James)]\n"
         "Judgement: No. Because the new fact does not state the relationship between Gwen and "
         "James."},
        {{"Fact List:", "Rule: If B is the granddaughter of A"},
         "Rule Implementation: According to the rule, since Lena is the granddaughter of James, and "
         "Gwen is the daughter of Lena, we can infer that Gwen is the great granddaughter of "
         "James.\n"
         "New fact: Gwen is the great granddaughter of James. [great_granddaughter_of(Gwen, "
         "James)]\n"
         "Judgement: Yes. Because the new fact states the relationship between Gwen and James."},
        {{"Context: Don's father, Joshua, and grandfather, James"},
         "- Joshua is the father of Don. [father_of(Joshua, Don)]\n"
         "- Don is the son of Joshua. [son_of(Don, Joshua)]\n"
         "- James is the grandfather of Don. [grandfather_of(James, Don)]\n"
         "- Don is the grandson of James. [grandson_of(Don, James)]"},
        {{"Context: Lena and her brother Don"},
         "- Lena is the sister of Don. [sister_of(Lena, Don)]\n"
         "- Don is the brother of Lena. [brother_of(Don, Lena)]"},
        {{"Context: Gwen is the daughter of Lena."},
         "- Gwen is the daughter of Lena. [daughter_of(Gwen, Lena)]\n"
         "- Lena is the mother of Gwen. [mother_of(Lena, Gwen)]"},
        {{"Rule: If B is the grandson of A"},
         "granddaughter_of(C, A) :- grandson_of(B, A), sister_of(C, B)."},
        {{"Rule: If B is the granddaughter of A"},
         "great_granddaughter_of(C, A) :- granddaughter_of(B, A), daughter_of(C, B)."},
    };
}

std::vector<Scripted> logic_script() {
    return {
        {{"Rule: All big things are not green."},
         "Rule Implementation: According to the rule, since Gary is big, we can infer that Gary is "
         "not green.\n"
         "New fact: Gary is not green. [not_green(Gary)]\n"
         "Judgement: No. Because the new fact does not state whether Gary is soft."},
        {{"Rule: If something is not green then it is soft."},
         "Rule Implementation: According to the rule, since Gary is not green, we can infer that "
         "Gary is soft.\n"
         "New fact: Gary is soft. [soft(Gary)]\n"
         "Judgement: Yes. Because the new fact states that Gary is soft."},
    };
}

std::vector<Scripted> constraint_script() {
    return {
        {{"Rule: Omar can only speak in the afternoon.", "- Omar speaks in the morning."},
         "Rule Implementation: According to the rule, Omar speaks in the morning here, which "
         "violates the afternoon-only condition.\n"
         "Judgement: Yes."},
        {{"Rule: Omar can only speak in the afternoon.", "- Nora speaks in the morning."},
         "Rule Implementation: According to the rule and the facts, Omar speaks in the afternoon, "
         "so there is no conflict.\n"
         "Judgement: No.\n"
         "New fact: Omar gives his talk in the afternoon. [assign(Omar, afternoon)]"},
        {{"Rule: Omar can only speak in the afternoon.", "- Nora speaks in the afternoon."},
         "Rule Implementation: According to the rule and the facts, Omar speaks in the afternoon, "
         "so there is no conflict.\n"
         "Judgement: No.\n"
         "New fact: Omar gives his talk in the afternoon. [assign(Omar, afternoon)]"},
        {{"Rule: Nora and Omar cannot speak in the same session.", "- Nora speaks in the morning."},
         "Rule Implementation: According to the rule, Nora speaks in the morning and Omar in the "
         "afternoon, so there is no conflict.\n"
         "Judgement: No.\n"
         "New fact: Nora and Omar speak in different sessions. [assign(Nora, morning)]"},
        {{"Rule: Nora and Omar cannot speak in the same session.",
          "- Nora speaks in the afternoon."},
         "Rule Implementation: According to the rule, Nora and Omar both speak in the afternoon, "
         "which is a conflict.\n"
         "Judgement: Yes."},
    };
}

std::vector<Scripted> state_script() {
    return {
        {{"Operational Fact: Put the shoe into Box 0."},
         "Rule Implementation: Based on the rule, after the putting operation, we can infer that "
         "Box 0 contains the rose and the shoe.\n"
         "New facts:\n"
         "Box 0 contains the rose and the shoe. [contains(Box 0, the rose, the shoe)]"},
        {{"Operational Fact: Move the contents of Box 2 to Box 1."},
         "Rule Implementation: Based on the rule, after the moving operation, we can infer that Box "
         "1 contains the letter and the book, and Box 2 contains nothing.\n"
         "New facts:\n"
         "Box 1 contains the letter and the book. [contains(Box 1, the letter, the book)]\n"
         "Box 2 contains nothing. [contains(Box 2, nothing)]"},
        {{"Operational Fact: Remove the rose from Box 0."},
         "Rule Implementation: Based on the rule, after the removing operation, we can infer that "
         "Box 0 contains the shoe.\n"
         "New facts:\n"
         "Box 0 contains the shoe. [contains(Box 0, the shoe)]"},
        {{"Operational Fact: Put the tape into Box 2."},
         "Rule Implementation: Based on the rule, after the putting operation, we can infer that "
         "Box 2 contains the tape.\n"
         "New facts:\n"
         "Box 2 contains the tape. [contains(Box 2, the tape)]"},
        {{"Operational Fact: Move the contents of Box 0 to Box 2."},
         "Rule Implementation: Based on the rule, after the moving operation, we can infer that Box "
         "2 contains the tape and the shoe, and Box 0 contains nothing.\n"
         "New facts:\n"
         "Box 2 contains the tape and the shoe. [contains(Box 2, the tape, the shoe)]\n"
         "Box 0 contains nothing. [contains(Box 0, nothing)]"},
        {{"Operational Fact: Remove the letter from Box 1."},
         "Rule Implementation: Based on the rule, after the removing operation, we can infer that "
         "Box 1 contains the book.\n"
         "New facts:\n"
         "Box 1 contains the book. [contains(Box 1, the book)]"},
        {{"Operational Fact: Put the map into Box 1."},
         "Rule Implementation: Based on the rule, after the putting operation, we can infer that "
         "Box 1 contains the book and the map.\n"
         "New facts:\n"
         "Box 1 contains the book and the map. [contains(Box 1, the book, the map)]"},
    };
}

std::vector<Scripted> metric_backup_script() {
    return {
        {{"Query: How is Ida related to Gus?"},
         "Ida connects to Gus through Hal: alpha then bravo composes to charlie.\nAnswer: charlie"},
        {{"Query: How is Lou related to Jon?"},
         "Lou connects to Jon through Kim, which looks like a delta relationship.\nAnswer: delta"},
    };
}

}  // namespace

int main() {
    const std::filesystem::path source_dir = RULEMEM_SOURCE_DIR;
    const auto fixtures = source_dir / "data" / "fixtures";
    const auto cassettes = source_dir / "data" / "cassettes";
    std::filesystem::create_directories(cassettes);

    record_fixture("kinship", fixtures / "replay_kinship.jsonl", cassettes / "kinship.jsonl",
                   kinship_script(), "great_granddaughter", EngineConfig::ImplementerKind::llm);
    record_fixture("logic", fixtures / "replay_logic.jsonl", cassettes / "logic.jsonl",
                   logic_script(), "true", EngineConfig::ImplementerKind::llm);
    record_fixture("constraint", fixtures / "replay_constraint.jsonl",
                   cassettes / "constraint.jsonl", constraint_script(), "A",
                   EngineConfig::ImplementerKind::llm);
    record_fixture("state", fixtures / "replay_state.jsonl", cassettes / "state.jsonl",
                   state_script(), "the book and the map", EngineConfig::ImplementerKind::llm);

    // The metric fixture exercises the backup answerer: two instances fall
    // through to scratchpad answers, one right and one wrong.
    {
        const auto cassette = cassettes / "metric_backup.jsonl";
        std::filesystem::remove(cassette);
        GatewayConfig gateway_config;
        gateway_config.mode = GatewayMode::record;
        gateway_config.cassette_path = cassette.string();
        gateway_config.backoff_ms = 0;
        Gateway gateway(gateway_config,
                        scripted_transport(gateway_config.model, metric_backup_script()));

        EngineConfig config;  // symbolic implementer, backup on
        const auto instances = load_dataset(fixtures / "metric_fixture.jsonl");
        const PromptRegistry registry = PromptRegistry::embedded();
        const EvalReport report = evaluate(instances, config, registry, &gateway);
        expect(report.execution_rate == 0.5 && report.accuracy == 0.75,
               "metric fixture: rate " + std::to_string(report.execution_rate) + ", accuracy " +
                   std::to_string(report.accuracy) + ", " +
                   std::to_string(gateway.cassette_size()) + " exchanges recorded");
    }

    if (failures) {
        std::cerr << failures << " fixture(s) failed\n";
        return 1;
    }
    std::cout << "cassettes written to " << cassettes << "\n";
    return 0;
}
