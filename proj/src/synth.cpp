#include "rulemem/synth.hpp"

#include <algorithm>
#include <random>
#include <sstream>

namespace rulemem {

namespace {

const std::vector<std::string> kPeople = {
    "Alice", "Brian",  "Clara", "Daniel", "Elena", "Frank", "Grace",  "Henry", "Irene", "Jacob",
    "Karen", "Liam",   "Mona",  "Nathan", "Olga",  "Peter", "Quinn",  "Rosa",  "Samuel", "Tara"};

// Invented relation words keep the chains free of real kinship semantics.
const std::vector<std::string> kRelations = {
    "alpha",  "bravo",  "charlie", "delta",  "echo",   "foxtrot", "golf",   "hotel",
    "india",  "juliet", "kilo",    "lima",   "mike",   "november", "oscar",  "papa",
    "quebec", "romeo",  "sierra",  "tango",  "uniform", "victor",  "whiskey", "xray"};

const std::vector<std::string> kItems = {
    "the apple", "the book", "the brick", "the coat",  "the disk", "the flower",
    "the glove", "the hat",  "the key",   "the lamp",  "the map",  "the pen",
    "the radio", "the rose", "the shoe",  "the tape"};

std::string chain_fact_text(const std::string& rel, const std::string& a, const std::string& b) {
    return a + " is the " + rel + " of " + b + ".";
}

std::string chain_rule_text(const std::string& first, const std::string& second,
                            const std::string& result) {
    return "If B is the " + first + " of A, and C is the " + second + " of B, then C is the " +
           result + " of A.";
}

std::string chain_rule_symbolic(const std::string& first, const std::string& second,
                                const std::string& result) {
    return result + "_of(C, A):-" + first + "_of(B, A), " + second + "_of(C, B)";
}

}  // namespace

std::vector<InstanceSpec> generate_kinship(const KinshipSynthConfig& config) {
    std::mt19937_64 rng(config.seed);
    std::vector<InstanceSpec> out;

    for (int n = 0; n < config.count; ++n) {
        const int depth = config.min_depth +
                          (config.max_depth > config.min_depth
                               ? static_cast<int>(rng() % static_cast<std::uint64_t>(
                                                      config.max_depth - config.min_depth + 1))
                               : 0);

        std::vector<std::string> people = kPeople;
        std::shuffle(people.begin(), people.end(), rng);
        people.resize(static_cast<std::size_t>(depth) + 2);  // p0 .. p(depth+1)

        std::vector<std::string> relations = kRelations;
        std::shuffle(relations.begin(), relations.end(), rng);
        // depth+1 base relations, depth derived ones, then distractor vocabulary
        std::size_t next_rel = 0;
        auto take_rel = [&relations, &next_rel]() { return relations.at(next_rel++); };

        InstanceSpec spec;
        spec.id = "synth_k" + std::to_string(n);
        spec.mode = TaskKind::kinship;
        spec.depth = depth;

        std::vector<std::string> base_rels;
        for (int i = 0; i <= depth; ++i) base_rels.push_back(take_rel());
        for (int i = 0; i <= depth; ++i) {
            const std::string& rel = base_rels[static_cast<std::size_t>(i)];
            const std::string& upper = people[static_cast<std::size_t>(i) + 1];
            const std::string& lower = people[static_cast<std::size_t>(i)];
            spec.facts.push_back(
                {chain_fact_text(rel, upper, lower), rel + "_of(" + upper + ", " + lower + ")"});
        }

        // Composition chain: derived_i links p(i+1) to p0.
        std::string previous = base_rels[0];
        std::string final_rel;
        for (int i = 1; i <= depth; ++i) {
            const std::string derived = take_rel();
            spec.rules.push_back(
                {chain_rule_text(previous, base_rels[static_cast<std::size_t>(i)], derived),
                 chain_rule_symbolic(previous, base_rels[static_cast<std::size_t>(i)], derived)});
            previous = derived;
            final_rel = derived;
        }

        // Distractors reference vocabulary absent from the facts, so they never fire.
        for (int d = 0; d < config.distractor_rules; ++d) {
            const std::string a = take_rel(), b = take_rel(), c = take_rel();
            spec.rules.push_back({chain_rule_text(a, b, c), chain_rule_symbolic(a, b, c)});
        }

        std::shuffle(spec.rules.begin(), spec.rules.end(), rng);

        const std::string& target = people[static_cast<std::size_t>(depth) + 1];
        const std::string& anchor = people[0];
        spec.query = "How is " + target + " related to " + anchor + "?";
        spec.query_args = {target, anchor};
        spec.gold = final_rel;
        out.push_back(std::move(spec));
    }
    return out;
}

std::string box_contents_text(const std::vector<std::string>& items) {
    if (items.empty()) return "nothing";
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += " and ";
        out += items[i];
    }
    return out;
}

std::map<std::string, std::vector<std::string>> simulate_boxes(const std::vector<Atom>& states,
                                                               const std::vector<Atom>& ops) {
    std::map<std::string, std::vector<std::string>> world;
    for (const Atom& s : states) {
        if (s.args.empty()) continue;
        std::vector<std::string> items;
        for (std::size_t i = 1; i < s.args.size(); ++i)
            if (s.args[i].name != "nothing") items.push_back(s.args[i].name);
        world[s.args.front().name] = std::move(items);
    }
    auto add = [](std::vector<std::string>& items, const std::string& item) {
        if (std::find(items.begin(), items.end(), item) == items.end()) items.push_back(item);
    };
    auto drop = [](std::vector<std::string>& items, const std::string& item) {
        items.erase(std::remove(items.begin(), items.end(), item), items.end());
    };
    for (const Atom& op : ops) {
        if (op.predicate == "put_into" && op.args.size() >= 2) {
            auto& box = world[op.args.back().name];
            for (std::size_t i = 0; i + 1 < op.args.size(); ++i) add(box, op.args[i].name);
        } else if (op.predicate == "remove_from" && op.args.size() >= 2) {
            auto& box = world[op.args.back().name];
            for (std::size_t i = 0; i + 1 < op.args.size(); ++i) drop(box, op.args[i].name);
        } else if (op.predicate == "move_from_to" && op.args.size() >= 3) {
            const std::string src = op.args[op.args.size() - 2].name;
            const std::string dst = op.args.back().name;
            std::vector<std::string> moved;
            if (op.args.size() == 3 && op.args.front().name == "the contents")
                moved = world[src];
            else
                for (std::size_t i = 0; i + 2 < op.args.size(); ++i) moved.push_back(op.args[i].name);
            for (const auto& item : moved) {
                drop(world[src], item);
                add(world[dst], item);
            }
        }
    }
    return world;
}

std::vector<InstanceSpec> generate_boxes(const BoxesSynthConfig& config) {
    std::mt19937_64 rng(config.seed);
    std::vector<InstanceSpec> out;

    const std::vector<std::pair<std::string, std::string>> box_rules = {
        {"If put the contents X into Box A, then X are in Box A.", "contains(A, X):-put_into(X, A)"},
        {"If remove the contents X from Box A, then X are not in Box A.",
         "not_contains(A, X):-remove_from(X, A)"},
        {"If move the contents X from Box A to Box B, then X are not in Box A and X are in Box B.",
         "contains(B, X):-move_from_to(X, A, B)"}};

    for (int n = 0; n < config.count; ++n) {
        InstanceSpec spec;
        spec.id = "synth_b" + std::to_string(n);
        spec.mode = TaskKind::state_tracking;
        spec.depth = config.operations;

        std::vector<std::string> boxes;
        for (int b = 0; b < config.boxes; ++b) boxes.push_back("Box " + std::to_string(b));

        std::vector<std::string> pool = kItems;
        std::shuffle(pool.begin(), pool.end(), rng);
        std::size_t next_item = 0;

        std::map<std::string, std::vector<std::string>> world;
        std::vector<Atom> state_atoms;
        bool first_box_empty = true;
        for (const auto& box : boxes) {
            // One box may start empty; the rest hold 1-2 items.
            const int count = first_box_empty ? 0 : 1 + static_cast<int>(rng() % 2);
            first_box_empty = false;
            std::vector<std::string> items;
            for (int i = 0; i < count && next_item < pool.size(); ++i)
                items.push_back(pool[next_item++]);
            world[box] = items;

            Atom atom;
            atom.predicate = "contains";
            atom.args.push_back(make_object(box));
            if (items.empty())
                atom.args.push_back(make_object("nothing"));
            else
                for (const auto& item : items) atom.args.push_back(make_object(item));
            state_atoms.push_back(atom);
            spec.facts.push_back(
                {box + " contains " + box_contents_text(items) + ".", render(atom)});
        }

        std::vector<Atom> op_atoms;
        auto pick_box = [&boxes, &rng]() { return boxes[rng() % boxes.size()]; };
        for (int step = 0; step < config.operations; ++step) {
            // choose an applicable operation kind
            std::vector<std::string> nonempty;
            for (const auto& [box, items] : world)
                if (!items.empty()) nonempty.push_back(box);

            const int roll = static_cast<int>(rng() % 4);
            const int kind = roll == 3 ? 0 : roll;  // puts twice as likely as the others
            Atom op;
            std::string text;
            if (kind == 0 || nonempty.empty()) {  // put a fresh or recycled item
                const std::string box = pick_box();
                const std::string item =
                    next_item < pool.size() ? pool[next_item++] : pool[rng() % pool.size()];
                op.predicate = "put_into";
                op.args = {make_object(item), make_object(box)};
                text = "Put " + item + " into " + box + ".";
            } else if (kind == 1) {  // remove an existing item
                const std::string box = nonempty[rng() % nonempty.size()];
                const auto& items = world[box];
                const std::string item = items[rng() % items.size()];
                op.predicate = "remove_from";
                op.args = {make_object(item), make_object(box)};
                text = "Remove " + item + " from " + box + ".";
            } else {  // move all contents
                const std::string src = nonempty[rng() % nonempty.size()];
                std::string dst = pick_box();
                while (dst == src && boxes.size() > 1) dst = pick_box();
                op.predicate = "move_from_to";
                op.args = {make_object("the contents"), make_object(src), make_object(dst)};
                text = "Move the contents of " + src + " to " + dst + ".";
            }
            world = simulate_boxes(state_atoms, [&] {
                std::vector<Atom> so_far = op_atoms;
                so_far.push_back(op);
                return so_far;
            }());
            op_atoms.push_back(op);
            spec.ops.push_back({text, render(op)});
        }

        for (const auto& [text, symbolic] : box_rules) spec.rules.push_back({text, symbolic});

        // Prefer querying a box that ends non-empty.
        const auto final_world = simulate_boxes(state_atoms, op_atoms);
        std::string queried = boxes[rng() % boxes.size()];
        if (final_world.count(queried) == 0 || final_world.at(queried).empty()) {
            for (const auto& box : boxes)
                if (final_world.count(box) && !final_world.at(box).empty()) {
                    queried = box;
                    break;
                }
        }
        spec.query = "What does " + queried + " contain?";
        spec.query_args = {queried};
        std::vector<std::string> final_items;
        if (auto it = final_world.find(queried); it != final_world.end()) final_items = it->second;
        spec.gold = box_contents_text(final_items);
        out.push_back(std::move(spec));
    }
    return out;
}

}  // namespace rulemem
