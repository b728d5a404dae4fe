#include "doctest.h"
#include "json.hpp"
#include "rulemem/implement.hpp"

using namespace rulemem;

namespace {
Atom fact(const std::string& text) { return parse_atom(text, ParseContext::fact); }
}  // namespace

TEST_CASE("symbolic_implement") {
    const Rule rule = parse_rule("granddaughter_of(C, A):-grandson_of(B, A), sister_of(C, B)");
    SUBCASE("applies the grounding's bindings to the conclusion") {
        Grounding g;
        g.substitution.bind("A", make_object("James"));
        g.substitution.bind("B", make_object("Don"));
        g.substitution.bind("C", make_object("Lena"));
        const auto result = symbolic_implement(g, rule, {});
        REQUIRE(result.new_facts.size() == 1);
        CHECK(render(result.new_facts[0].atom) == "granddaughter_of(Lena, James)");
        CHECK(result.new_facts[0].text == "Lena is the granddaughter of James.");
        CHECK(result.judgement == Judgement::none);  // the engine's matcher decides

        // soundness: the derived atom unifies back onto the conclusion
        const auto back = unify_atom(rule.conclusion, result.new_facts[0].atom);
        REQUIRE(back.has_value());
        CHECK(*back->lookup("A") == make_object("James"));
        CHECK(*back->lookup("C") == make_object("Lena"));
    }
    SUBCASE("ground conclusions ignore the substitution") {
        const Rule ground_rule = parse_rule("sees(tiger, bald eagle):-needs(X, tiger)");
        Grounding g;
        g.substitution.bind("X", make_object("cow"));
        const auto result = symbolic_implement(g, ground_rule, {});
        REQUIRE(result.new_facts.size() == 1);
        CHECK(render(result.new_facts[0].atom) == "sees(tiger, bald eagle)");
    }
    SUBCASE("uncovered conclusion variable throws") {
        Grounding g;
        g.substitution.bind("B", make_object("Don"));
        CHECK_THROWS_AS(symbolic_implement(g, rule, {}), UncoveredConclusionVariable);
    }
}

TEST_CASE("deterministic box-state implementation") {
    ImplementRequest request;
    request.task = TaskKind::state_tracking;
    request.state_facts = {
        {1, fact("contains(Box 1, the rose)"), "Box 1 contains the rose.", FactOrigin::input(), true},
        {2, fact("contains(Box 2, the letter)"), "Box 2 contains the letter.", FactOrigin::input(), true}};
    SymbolicImplementer implementer;

    SUBCASE("move emits destination then source") {
        request.op_fact = FactEntry{3, fact("move_from_to(the contents, Box 2, Box 1)"),
                                    "Move the contents of Box 2 to Box 1.", FactOrigin::input(), true};
        const auto result = implementer.implement(request);
        REQUIRE(result.new_facts.size() == 2);
        CHECK(render(result.new_facts[0].atom) == "contains(Box 1, the rose, the letter)");
        CHECK(result.new_facts[0].text == "Box 1 contains the rose and the letter.");
        CHECK(render(result.new_facts[1].atom) == "contains(Box 2, nothing)");
        CHECK(result.new_facts[1].text == "Box 2 contains nothing.");
    }
    SUBCASE("variadic remove") {
        request.state_facts = {{1, fact("contains(Box 4, the bread, the radio, the tape)"),
                                "Box 4 contains the bread and the radio and the tape.",
                                FactOrigin::input(), true}};
        request.op_fact = FactEntry{2, fact("remove_from(the radio, the tape, Box 4)"),
                                    "Remove the radio and the tape from Box 4.", FactOrigin::input(), true};
        const auto result = implementer.implement(request);
        REQUIRE(result.new_facts.size() == 1);
        CHECK(render(result.new_facts[0].atom) == "contains(Box 4, the bread)");
    }
    SUBCASE("put into an unseen box starts from empty") {
        request.op_fact = FactEntry{3, fact("put_into(the shoe, Box 9)"), "Put the shoe into Box 9.",
                                    FactOrigin::input(), true};
        const auto result = implementer.implement(request);
        REQUIRE(result.new_facts.size() == 1);
        CHECK(render(result.new_facts[0].atom) == "contains(Box 9, the shoe)");
    }
}

TEST_CASE("build_prompt") {
    const PromptRegistry registry = PromptRegistry::embedded();
    SUBCASE("kinship template carries its few-shot exemplar lines") {
        const PromptText& tmpl = registry.text(TaskKind::kinship, PromptStage::implement);
        CHECK(tmpl.user.find("New fact: Lena is the sister of Joshua. [sister_of(Lena, Joshua)]") !=
              std::string::npos);
        CHECK(tmpl.system.find("expert in determining kinship relationships") != std::string::npos);
    }
    SUBCASE("logic template carries the judgement exemplar") {
        const PromptText& tmpl = registry.text(TaskKind::logic, PromptStage::implement);
        CHECK(tmpl.user.find(
                  "Judgement: Yes. Because the new fact states the relationship between Bob and "
                  "quiet.") != std::string::npos);
    }
    SUBCASE("slot substitution and determinism") {
        PromptSlots slots;
        slots.objects = "Joshua, Don, James";
        slots.predicates = "sister_of, brother_of";
        slots.query = "How is Lena related to Joshua?";
        slots.facts = "1. James is the father of Joshua. 3. Lena is the daughter of James.";
        slots.rule = "If B is the father of A, and C is the daughter of B, then C is the sister of A.";
        const PromptText p1 = build_prompt(TaskKind::kinship, slots, registry);
        const PromptText p2 = build_prompt(TaskKind::kinship, slots, registry);
        CHECK(p1.user == p2.user);
        CHECK(p1.system == p2.system);
        CHECK(p1.user.find("Query: How is Lena related to Joshua?") != std::string::npos);
        CHECK(p1.user.find("{facts}") == std::string::npos);
        CHECK(p1.user.find("{query}") == std::string::npos);
    }
    SUBCASE("missing template reports the task") {
        CHECK_THROWS_AS(registry.text(TaskKind::kinship, PromptStage::op_fact_init), UnknownTaskKind);
    }
    SUBCASE("directory override matches the embedded set") {
        const PromptRegistry from_dir =
            PromptRegistry::from_directory(std::string(RULEMEM_SOURCE_DIR) + "/prompts");
        CHECK(from_dir.text(TaskKind::state_tracking, PromptStage::implement).user ==
              registry.text(TaskKind::state_tracking, PromptStage::implement).user);
    }
}

TEST_CASE("parse_implementation_response") {
    SUBCASE("single new fact with judgement") {
        const auto result = parse_implementation_response(
            "New fact: Hugh is the brother of Wesley. [brother_of(Hugh, Wesley)]\nJudgement: No.",
            TaskKind::kinship);
        REQUIRE(result.new_facts.size() == 1);
        CHECK(render(result.new_facts[0].atom) == "brother_of(Hugh, Wesley)");
        CHECK(result.new_facts[0].text == "Hugh is the brother of Wesley.");
        CHECK(result.judgement == Judgement::not_solved);
        CHECK(result.skipped_lines == 0);
    }
    SUBCASE("constraint yes means conflict") {
        const auto result = parse_implementation_response("Judgement: Yes.", TaskKind::constraint);
        CHECK(result.new_facts.empty());
        CHECK(result.judgement == Judgement::conflict);
    }
    SUBCASE("kinship yes means solves_query") {
        const auto result = parse_implementation_response(
            "New fact: Lena is the sister of Joshua. [sister_of(Lena, Joshua)]\n"
            "Judgement: Yes. Because the new fact states the relationship between Joshua and Lena.",
            TaskKind::kinship);
        CHECK(result.judgement == Judgement::solves_query);
    }
    SUBCASE("empty text is a valid empty parse") {
        const auto result = parse_implementation_response("", TaskKind::logic);
        CHECK(result.new_facts.empty());
        CHECK(result.judgement == Judgement::none);
    }
    SUBCASE("boxes multi-fact block") {
        const auto result = parse_implementation_response(
            "Rule Implementation: Based on the rule, we can infer the new states.\n"
            "New facts:\n"
            "Box 1 contains the rose and the letter. [contains(Box 1, the rose, the letter)]\n"
            "Box 2 contains nothing. [contains(Box 2, nothing)]",
            TaskKind::state_tracking);
        REQUIRE(result.new_facts.size() == 2);
        CHECK(render(result.new_facts[0].atom) == "contains(Box 1, the rose, the letter)");
        CHECK(render(result.new_facts[1].atom) == "contains(Box 2, nothing)");
    }
    SUBCASE("lines without a parseable bracket are skipped and counted") {
        const auto result = parse_implementation_response(
            "New facts:\n"
            "Box 1 contains the rose. [contains(Box 1, the rose)]\n"
            "Box 2 is empty now.\n"
            "Box 3 holds things. [contains(]\n",
            TaskKind::state_tracking);
        CHECK(result.new_facts.size() == 1);
        CHECK(result.skipped_lines == 2);
    }
    SUBCASE("total on arbitrary text") {
        const auto result = parse_implementation_response(
            "Sure! Here is a long-winded paragraph that follows no format at all.",
            TaskKind::kinship);
        CHECK(result.new_facts.empty());
        CHECK(result.judgement == Judgement::none);
    }
}

TEST_CASE("llm_implement via replay") {
    // Record through a scripted transport once, then replay twice; results
    // must be identical and the replay must stay off the network.
    const std::string cassette = "/tmp/rulemem_test_llm_implement.jsonl";
    std::remove(cassette.c_str());

    const std::string canned =
        "Rule Implementation: According to the rule, we can infer the sibling link.\n"
        "New fact: Lena is the sister of Joshua. [sister_of(Lena, Joshua)]\n"
        "Judgement: Yes. Because the new fact states the relationship between Joshua and Lena.";

    ImplementRequest request;
    request.task = TaskKind::kinship;
    request.rule = parse_rule("sister_of(C, A):-father_of(B, A), daughter_of(C, B)");
    request.rule_text = "If B is the father of A, and C is the daughter of B, then C is the sister of A.";
    request.premise_facts = {
        {1, fact("father_of(James, Joshua)"), "James is the father of Joshua.", FactOrigin::input(), true},
        {3, fact("daughter_of(Lena, James)"), "Lena is the daughter of James.", FactOrigin::input(), true}};
    request.query = "How is Joshua related to Lena?";
    request.schema_objects = "Joshua, Don, James";
    request.schema_predicates = "father_of, sister_of, daughter_of";

    const PromptRegistry registry = PromptRegistry::embedded();

    GatewayConfig record_config;
    record_config.mode = GatewayMode::record;
    record_config.cassette_path = cassette;
    Gateway recorder(record_config, [&canned](const std::string&) {
        return std::string(R"({"choices":[{"message":{"role":"assistant","content":)") +
               nlohmann::json(canned).dump() + "}}]}";
    });
    const auto recorded = llm_implement(request, registry, recorder);
    REQUIRE(recorded.new_facts.size() == 1);
    CHECK(recorded.judgement == Judgement::solves_query);
    CHECK(recorded.raw.find("RESPONSE:") != std::string::npos);

    GatewayConfig replay_config;
    replay_config.mode = GatewayMode::replay;
    replay_config.cassette_path = cassette;
    Gateway replayer(replay_config);
    const auto first = llm_implement(request, registry, replayer);
    const auto second = llm_implement(request, registry, replayer);
    CHECK(render(first.new_facts.at(0).atom) == "sister_of(Lena, Joshua)");
    CHECK(render(first.new_facts.at(0).atom) == render(second.new_facts.at(0).atom));
    CHECK(first.judgement == second.judgement);
    CHECK(first.raw == second.raw);
    CHECK(replayer.network_calls() == 0);

    // fact list numbering uses memory ids
    CHECK(format_fact_list(TaskKind::kinship, request.premise_facts) ==
          "1. James is the father of Joshua. 3. Lena is the daughter of James.");
}
