#include <random>

#include "doctest.h"
#include "rulemem/memory.hpp"

using namespace rulemem;

namespace {
Atom fact(const std::string& text) { return parse_atom(text, ParseContext::fact); }
}  // namespace

TEST_CASE("schema_resolve") {
    MemorySchema schema;
    SUBCASE("empty schema inserts") {
        const std::string& name = schema.resolve_predicate("father_of", 2);
        CHECK(name == "father_of");
        CHECK(schema.has_predicate("father_of"));
    }
    SUBCASE("existing canonical entry is returned, case-folded") {
        schema.resolve_predicate("father_of", 2);
        CHECK(schema.resolve_predicate("Father_Of", 2) == "father_of");
        CHECK(schema.predicates().size() == 1);
    }
    SUBCASE("objects are case-sensitive") {
        schema.resolve_object("the rose");
        CHECK(schema.resolve_object("the rose") == "the rose");
        CHECK(schema.objects().size() == 1);
        schema.resolve_object("The Rose");
        CHECK(schema.objects().size() == 2);
    }
    SUBCASE("free function shape") {
        CHECK(schema_resolve("located in", SymbolKind::predicate, schema, 2) == "located_in");
        CHECK(schema_resolve("Box  4", SymbolKind::object, schema) == "Box 4");
    }
}

TEST_CASE("write_fact additive") {
    WorkingMemory mem(UpdateMode::additive);
    const auto first = mem.write_fact(fact("brother_of(Hugh, Wesley)"), "Hugh is the brother of Wesley.",
                                      FactOrigin::input());
    CHECK(first.kind == WriteOutcome::Kind::added);

    SUBCASE("duplicate writes are idempotent") {
        const auto w1 = mem.write_fact(fact("sister_of(Lena, Joshua)"), "", FactOrigin::input());
        const auto w2 = mem.write_fact(fact("sister_of(Lena, Joshua)"), "", FactOrigin::input());
        CHECK(w1.kind == WriteOutcome::Kind::added);
        CHECK(w2.kind == WriteOutcome::Kind::duplicate);
        CHECK(w2.id == w1.id);
        CHECK(mem.active_fact_count() == 2);
    }
    SUBCASE("non-ground facts are rejected") {
        CHECK_THROWS_AS(mem.write_fact(parse_atom("p(X)"), "", FactOrigin::input()), NonGroundFact);
    }
    SUBCASE("additive mode never deactivates") {
        mem.write_fact(fact("contains(Box 1, the rose)"), "", FactOrigin::input());
        mem.write_fact(fact("contains(Box 1, the letter)"), "", FactOrigin::input());
        CHECK(mem.active_fact_count() == 3);
    }
}

TEST_CASE("write_fact stateful update") {
    WorkingMemory mem(UpdateMode::stateful);
    const auto w1 =
        mem.write_fact(fact("contains(Box 1, the rose)"), "Box 1 contains the rose.", FactOrigin::input());
    CHECK(w1.kind == WriteOutcome::Kind::added);

    const auto w2 = mem.write_fact(fact("contains(Box 1, the rose, the letter)"),
                                   "Box 1 contains the rose and the letter.", FactOrigin::inferred(1));
    CHECK(w2.kind == WriteOutcome::Kind::updated);
    CHECK(w2.superseded_id == w1.id);
    CHECK_FALSE(mem.fact_by_id(w1.id)->active);
    CHECK(mem.active_fact_count() == 1);

    SUBCASE("identical atom is a duplicate, not an update") {
        const auto w3 = mem.write_fact(fact("contains(Box 1, the rose, the letter)"), "",
                                       FactOrigin::inferred(2));
        CHECK(w3.kind == WriteOutcome::Kind::duplicate);
    }
    SUBCASE("different conflict key adds") {
        const auto w3 = mem.write_fact(fact("contains(Box 2, the tape)"), "", FactOrigin::input());
        CHECK(w3.kind == WriteOutcome::Kind::added);
        CHECK(mem.active_fact_count() == 2);
    }
}

TEST_CASE("write_rule dedup") {
    WorkingMemory mem(UpdateMode::additive);
    const Rule r = parse_rule("granddaughter_of(C, A):-grandson_of(B, A), sister_of(C, B)");
    const int id1 = mem.write_rule(r, "granddaughter rule");
    CHECK(mem.write_rule(r, "again") == id1);
    CHECK(mem.rules().size() == 1);

    SUBCASE("alpha-equivalent rules are duplicates") {
        const int q1 = mem.write_rule(parse_rule("q(X):-p(X)"), "");
        const int q2 = mem.write_rule(parse_rule("q(Y):-p(Y)"), "");
        CHECK(q1 == q2);
    }
    SUBCASE("new predicates enter the schema") {
        mem.write_rule(parse_rule("cousin_of(C, A):-uncle_of(B, A), son_of(C, B)"), "");
        CHECK(mem.schema().has_predicate("cousin_of"));
        CHECK(mem.schema().has_predicate("uncle_of"));
    }
    SUBCASE("conclusion-variable warning is flagged") {
        const int id = mem.write_rule(parse_rule("knows(X, D):-meets(X, Y)"), "");
        CHECK(mem.rules()[static_cast<std::size_t>(id) - 1].conclusion_warning);
    }
}

TEST_CASE("snapshot isolation") {
    WorkingMemory mem(UpdateMode::additive);
    mem.write_fact(fact("p(ada)"), "", FactOrigin::input());
    const Snapshot snap = mem.snapshot();
    mem.write_fact(fact("p(ben)"), "", FactOrigin::input());
    CHECK(snap.facts.size() == 1);
    CHECK(mem.active_fact_count() == 2);

    const Snapshot empty = WorkingMemory(UpdateMode::additive).snapshot();
    CHECK(empty.facts.empty());
    CHECK(empty.rules.empty());
}

TEST_CASE("random write script keeps the invariants") {
    std::mt19937_64 rng(99);
    const std::vector<std::string> boxes = {"Box 0", "Box 1", "Box 2"};
    const std::vector<std::string> items = {"the rose", "the pen", "the tape", "the map"};

    WorkingMemory mem(UpdateMode::stateful);
    std::size_t adds = 0, deactivations = 0;
    for (int i = 0; i < 300; ++i) {
        Atom atom;
        atom.predicate = "contains";
        atom.args.push_back(make_object(boxes[rng() % boxes.size()]));
        const std::size_t n = 1 + rng() % 3;
        std::vector<std::string> chosen;
        for (std::size_t k = 0; k < n; ++k) {
            const std::string& item = items[rng() % items.size()];
            if (std::find(chosen.begin(), chosen.end(), item) == chosen.end()) chosen.push_back(item);
        }
        for (const auto& item : chosen) atom.args.push_back(make_object(item));

        const auto outcome = mem.write_fact(atom, "", FactOrigin::input());
        if (outcome.kind == WriteOutcome::Kind::added) ++adds;
        if (outcome.kind == WriteOutcome::Kind::updated) {
            ++adds;
            ++deactivations;
        }

        // stateful single-state: at most one active fact per (predicate, first arg)
        std::map<std::string, int> per_key;
        for (const auto& f : mem.facts())
            if (f.active) ++per_key[f.atom.predicate + "|" + f.atom.args.front().name];
        for (const auto& [key, count] : per_key) CHECK(count == 1);

        // schema closure: every active fact's symbols are in the schema
        for (const auto& f : mem.facts()) {
            if (!f.active) continue;
            CHECK(mem.schema().has_predicate(f.atom.predicate));
            for (const Term& t : f.atom.args) CHECK(mem.schema().has_object(t.name));
        }
    }
    CHECK(mem.snapshot().facts.size() == adds - deactivations);
}

TEST_CASE("dump format") {
    WorkingMemory mem(UpdateMode::stateful);
    mem.write_fact(fact("contains(Box 1, the rose)"), "Box 1 contains the rose.", FactOrigin::input());
    mem.write_fact(fact("contains(Box 1, the rose, the letter)"), "Box 1 contains the rose and the letter.",
                   FactOrigin::inferred(1));
    mem.write_rule(parse_rule("contains(A, X):-put_into(X, A)"),
                   "If put the contents X into Box A, then X are in Box A.");

    const std::string dump = mem.dump();
    CHECK(dump.find("F 1 0 input | contains(Box 1, the rose) | Box 1 contains the rose.\n") !=
          std::string::npos);
    CHECK(dump.find("F 2 1 inferred:1 | contains(Box 1, the rose, the letter) | ") !=
          std::string::npos);
    CHECK(dump.find("R 1 | contains(A, X):-put_into(X, A) | ") != std::string::npos);
    CHECK(dump.find("S predicates: contains/2|3, put_into/2") != std::string::npos);
    CHECK(dump.find("S objects: Box 1, the rose, the letter") != std::string::npos);
}
