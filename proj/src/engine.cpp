#include "rulemem/engine.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

using nlohmann::json;

namespace rulemem {

namespace {

std::string trim_copy(std::string s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    return s;
}

std::string strip_prefix(const std::string& line, const std::string& prefix) {
    if (line.rfind(prefix, 0) == 0) return trim_copy(line.substr(prefix.size()));
    return line;
}

std::string toggle_not(const std::string& predicate) {
    if (predicate.rfind("not_", 0) == 0) return predicate.substr(4);
    return "not_" + predicate;
}

std::string kinship_answer(const std::string& predicate) {
    if (predicate.size() > 3 && predicate.rfind("_of") == predicate.size() - 3)
        return predicate.substr(0, predicate.size() - 3);
    return predicate;
}

std::string contents_answer(const Atom& contains_fact) {
    std::string out;
    for (std::size_t i = 1; i < contains_fact.args.size(); ++i) {
        if (i > 1) out += " and ";
        out += contains_fact.args[i].name;
    }
    return out.empty() ? "nothing" : out;
}

}  // namespace

QueryPattern build_query_pattern(const InstanceSpec& instance) {
    QueryPattern q;
    if (instance.mode == TaskKind::logic)
        q.atom = parse_atom(instance.query_atom, ParseContext::fact);
    else
        q.args = instance.query_args;
    return q;
}

Engine::Engine(EngineConfig config, const PromptRegistry& registry, Gateway* gateway)
    : config_(std::move(config)), registry_(registry), gateway_(gateway) {}

std::unique_ptr<Implementer> Engine::make_implementer() {
    if (config_.implementer == EngineConfig::ImplementerKind::llm) {
        if (!gateway_) throw InitializationError("LLM implementer requires a gateway");
        return std::make_unique<LlmImplementer>(registry_, *gateway_);
    }
    return std::make_unique<SymbolicImplementer>();
}

int Engine::resolve_max_steps(const InstanceSpec& instance) const {
    if (config_.max_steps) return *config_.max_steps;
    switch (instance.mode) {
        case TaskKind::state_tracking:
            return static_cast<int>(std::max(instance.ops.size(), instance.context_ops.size()));
        case TaskKind::constraint:
            return static_cast<int>(std::max(instance.rules.size(), instance.context_rules.size()));
        default:
            break;
    }
    const int depth = instance.depth.value_or(5);
    if (depth <= 2) return 4;
    if (depth <= 4) return 6;
    return 8;
}

std::vector<InferredFact> Engine::extract_facts(TaskKind task, PromptStage stage,
                                                const std::string& sentence,
                                                const MemorySchema& schema,
                                                const std::string& context_text,
                                                const std::string& option_text,
                                                const std::string& query_text) {
    if (!gateway_) throw InitializationError("raw-context initialization requires a gateway");
    PromptSlots slots;
    slots.objects = schema.objects_text();
    slots.predicates = schema.predicates_text();
    slots.context = context_text.empty() ? sentence : context_text;
    slots.option = option_text;
    slots.query = query_text;
    const PromptText prompt = registry_.instantiate(task, stage, slots);
    const std::string response = gateway_->complete(prompt.system, prompt.user);

    std::vector<InferredFact> out;
    std::istringstream in(response);
    std::string raw_line;
    while (std::getline(in, raw_line)) {
        std::string line = trim_copy(raw_line);
        if (line.empty() || line == "Facts:" || line == "Fact:") continue;
        line = strip_prefix(line, "- ");
        line = strip_prefix(line, "Facts:");
        line = strip_prefix(line, "Fact:");
        if (line.empty()) continue;
        const std::size_t open = line.rfind('[');
        try {
            if (open != std::string::npos && line.find(']', open) != std::string::npos) {
                const std::size_t close = line.find(']', open);
                Atom atom = parse_atom(line.substr(open + 1, close - open - 1), ParseContext::fact);
                std::string text = trim_copy(line.substr(0, open));
                out.push_back({std::move(atom), std::move(text)});
            } else if (line.find('(') != std::string::npos) {
                Atom atom = parse_atom(line, ParseContext::fact);
                out.push_back({std::move(atom), sentence});
            }
        } catch (const MalformedTerm&) {
            // unusable line; extraction is best-effort
        }
    }
    return out;
}

std::vector<Rule> Engine::extract_rules(TaskKind task, const std::string& sentence,
                                        const MemorySchema& schema,
                                        const std::string& context_text) {
    if (!gateway_) throw InitializationError("raw-context initialization requires a gateway");
    PromptSlots slots;
    slots.objects = schema.objects_text();
    slots.predicates = schema.predicates_text();
    slots.rule = sentence;
    slots.context = context_text;
    const PromptText prompt = registry_.instantiate(task, PromptStage::rule_init, slots);
    const std::string response = gateway_->complete(prompt.system, prompt.user);

    std::vector<Rule> out;
    std::istringstream in(response);
    std::string raw_line;
    while (std::getline(in, raw_line)) {
        std::string line = trim_copy(raw_line);
        if (line.empty()) continue;
        line = strip_prefix(line, "- ");
        line = strip_prefix(line, "Symbolic Rule:");
        if (line.empty()) continue;
        try {
            if (line.find(":-") != std::string::npos) {
                out.push_back(parse_rule(line));
            } else if (line.find('(') != std::string::npos) {
                // Bare constraint conclusions (AR-LSAT) become self-premise
                // rules: always applicable, judged against the facts.
                Rule rule;
                rule.conclusion = parse_atom(line, ParseContext::pattern);
                rule.premises.push_back(rule.conclusion);
                out.push_back(std::move(rule));
            }
        } catch (const std::runtime_error&) {
            // unusable line; extraction is best-effort
        }
    }
    return out;
}

Engine::Initialized Engine::initialize(const InstanceSpec& instance) {
    const UpdateMode mode = instance.mode == TaskKind::state_tracking ? UpdateMode::stateful
                                                                      : UpdateMode::additive;
    Initialized init{WorkingMemory(mode), {}};
    WorkingMemory& mem = init.memory;

    auto capture_op = [&mem, &init](const WriteOutcome& outcome) {
        if (const FactEntry* entry = mem.fact_by_id(outcome.id)) init.ops.push_back(*entry);
    };

    if (instance.preparsed()) {
        for (const auto& f : instance.facts)
            mem.write_fact(parse_atom(f.symbolic, ParseContext::fact), f.text, FactOrigin::input());
        for (const auto& r : instance.rules) mem.write_rule(parse_rule(r.symbolic), r.text);
        for (const auto& o : instance.ops)
            capture_op(
                mem.write_fact(parse_atom(o.symbolic, ParseContext::fact), o.text, FactOrigin::input()));
    } else {
        const TaskKind task = instance.mode;
        const PromptStage fact_stage = PromptStage::fact_init;
        for (const auto& sentence : instance.context_facts)
            for (auto& fact : extract_facts(task, fact_stage, sentence, mem.schema()))
                mem.write_fact(fact.atom, fact.text, FactOrigin::input());
        for (const auto& sentence : instance.context_rules)
            for (auto& rule : extract_rules(task, sentence, mem.schema(), instance.context))
                mem.write_rule(rule, sentence);
        for (const auto& sentence : instance.context_ops)
            for (auto& fact :
                 extract_facts(task, PromptStage::op_fact_init, sentence, mem.schema()))
                capture_op(mem.write_fact(fact.atom, fact.text, FactOrigin::input()));
    }

    if (mem.facts().empty() && mem.rules().empty())
        throw InitializationError("initialization produced no facts and no rules for instance " +
                                  instance.id);
    return init;
}

WorkingMemory Engine::initialize_memory(const InstanceSpec& instance) {
    return initialize(instance).memory;
}

std::optional<FactEntry> Engine::query_solved(const WorkingMemory& memory,
                                              const QueryPattern& query, TaskKind task) {
    const auto& facts = memory.facts();
    for (auto it = facts.rbegin(); it != facts.rend(); ++it) {
        const FactEntry& f = *it;
        if (!f.active) continue;
        switch (task) {
            case TaskKind::kinship: {
                if (query.args.size() != 2 || f.atom.args.size() != 2) break;
                if (f.atom.args[0].name == normalize_object(query.args[0]) &&
                    f.atom.args[1].name == normalize_object(query.args[1]))
                    return f;
                break;
            }
            case TaskKind::logic: {
                if (!query.atom) break;
                if (f.atom == *query.atom) return f;
                Atom complement = *query.atom;
                complement.predicate = toggle_not(complement.predicate);
                if (f.atom == complement) return f;
                break;
            }
            case TaskKind::state_tracking: {
                if (query.args.size() != 1 || f.atom.predicate != "contains") break;
                if (!f.atom.args.empty() && f.atom.args[0].name == normalize_object(query.args[0]))
                    return f;
                break;
            }
            case TaskKind::constraint:
                break;  // constraint answers come from option outcomes
        }
    }
    return std::nullopt;
}

std::optional<std::string> Engine::predict_constraint_answer(
    const std::vector<std::pair<std::string, bool>>& option_conflicts, Polarity polarity) {
    const bool want_conflict = polarity == Polarity::negative;
    std::vector<std::string> candidates;
    for (const auto& [label, conflict] : option_conflicts)
        if (conflict == want_conflict) candidates.push_back(label);
    if (candidates.size() == 1) return candidates.front();
    return std::nullopt;
}

RunOutcome Engine::run(const InstanceSpec& instance) {
    if (instance.mode == TaskKind::constraint) return run_constraint(instance);
    return run_iterative(instance);
}

RunOutcome Engine::run_iterative(const InstanceSpec& instance) {
    Initialized init = initialize(instance);
    WorkingMemory& mem = init.memory;
    const TaskKind task = instance.mode;
    const QueryPattern query = build_query_pattern(instance);
    const int max_steps = resolve_max_steps(instance);
    auto implementer = make_implementer();

    RunOutcome outcome;
    std::optional<FactEntry> hit;

    // Input facts may already resolve the query.
    if (task != TaskKind::state_tracking) hit = query_solved(mem, query, task);

    GroundingOptions opts{config_.match, config_.prune_limit};
    NoveltySet novelty;
    bool gateway_failed = false;
    std::size_t ops_done = 0;

    try {
        for (int step = 1; !hit && step <= max_steps; ++step) {
            if (task == TaskKind::state_tracking &&
                static_cast<std::size_t>(step) > init.ops.size())
                break;  // operations consumed

            const Snapshot snap = mem.snapshot();
            std::vector<Grounding> groundings;
            if (task == TaskKind::state_tracking) {
                if (auto g = ground_chronological(snap, init.ops[static_cast<std::size_t>(step) - 1],
                                                  opts))
                    groundings.push_back(std::move(*g));
            } else {
                groundings = ground_enumerate(snap, novelty, opts);
            }

            StepRecord record;
            record.step = step;
            for (const auto& g : groundings) record.groundings.push_back({g.rule_id, g.fact_ids});
            outcome.steps_used = step;
            if (task == TaskKind::state_tracking) ++ops_done;

            if (groundings.empty()) {
                if (task != TaskKind::state_tracking) {
                    record.stop = "no groundings";
                    outcome.trace.push_back(std::move(record));
                    break;
                }
                record.stop = "operation matched no rule";
                outcome.trace.push_back(std::move(record));
                continue;
            }

            // Whole batch first, then one serialized commit pass in grounding order.
            std::vector<ImplementationResult> results;
            for (const auto& g : groundings) {
                ImplementRequest request;
                request.task = task;
                request.grounding = g;
                if (const RuleEntry* rule = snap.rule_by_id(g.rule_id)) {
                    request.rule = rule->rule;
                    request.rule_text = rule->text;
                }
                for (int fid : g.fact_ids)
                    if (const FactEntry* f = snap.fact_by_id(fid)) request.premise_facts.push_back(*f);
                if (task == TaskKind::state_tracking) {
                    request.op_fact = init.ops[static_cast<std::size_t>(step) - 1];
                    for (int fid : g.state_fact_ids)
                        if (const FactEntry* f = snap.fact_by_id(fid))
                            request.state_facts.push_back(*f);
                }
                request.query = instance.query;
                request.context = instance.context;
                request.schema_objects = snap.schema.objects_text();
                request.schema_predicates = snap.schema.predicates_text();
                results.push_back(implementer->implement(request));
            }
            record.implemented = static_cast<int>(results.size());

            for (const auto& result : results) {
                record.judgements.push_back(to_string(result.judgement));
                for (const auto& fact : result.new_facts) {
                    const WriteOutcome w =
                        mem.write_fact(fact.atom, fact.text, FactOrigin::inferred(step));
                    if (w.kind != WriteOutcome::Kind::duplicate) record.committed.push_back(w.id);
                }
            }

            novelty = NoveltySet(record.committed.begin(), record.committed.end());

            if (task != TaskKind::state_tracking) {
                hit = query_solved(mem, query, task);
                if (hit) record.stop = "query solved";
                else if (record.committed.empty()) record.stop = "no new facts";
            }
            const bool no_progress = !hit && record.committed.empty();
            outcome.trace.push_back(std::move(record));
            if (task != TaskKind::state_tracking && no_progress) break;
        }
    } catch (const GatewayError&) {
        if (!config_.backup_enabled || !gateway_) throw;
        gateway_failed = true;
        hit.reset();
    }

    // The state lookup is only meaningful once every operation has been applied.
    if (!gateway_failed && task == TaskKind::state_tracking && ops_done == init.ops.size())
        hit = query_solved(mem, query, task);

    if (gateway_failed) {
        finish_unsolved(outcome, instance);
    } else if (hit) {
        outcome.solved_directly = true;
        switch (task) {
            case TaskKind::kinship:
                outcome.answer = kinship_answer(hit->atom.predicate);
                break;
            case TaskKind::logic:
                outcome.answer = (query.atom && hit->atom == *query.atom) ? "true" : "false";
                break;
            case TaskKind::state_tracking:
                outcome.answer = contents_answer(hit->atom);
                break;
            default:
                outcome.answer = render(hit->atom);
        }
    } else if (task == TaskKind::logic) {
        // Open-world reading: neither the atom nor its complement derivable
        // within budget.
        outcome.answer = "unknown";
        outcome.solved_directly = true;
    } else {
        finish_unsolved(outcome, instance);
    }
    outcome.memory_dump = mem.dump();
    return outcome;
}

RunOutcome Engine::run_constraint(const InstanceSpec& instance) {
    // Rule base is shared across options; each option runs in its own memory.
    std::vector<std::pair<Rule, std::string>> shared_rules;
    if (instance.preparsed()) {
        for (const auto& r : instance.rules)
            shared_rules.emplace_back(parse_rule(r.symbolic), r.text);
    } else {
        MemorySchema scratch;
        for (const auto& sentence : instance.context_rules)
            for (auto& rule : extract_rules(TaskKind::constraint, sentence, scratch, instance.context))
                shared_rules.emplace_back(std::move(rule), sentence);
    }
    if (shared_rules.empty())
        throw InitializationError("constraint instance has no usable rules: " + instance.id);

    auto implementer = make_implementer();
    const int budget = config_.max_steps.value_or(static_cast<int>(shared_rules.size()));
    GroundingOptions opts{config_.match, config_.prune_limit};

    RunOutcome outcome;
    std::vector<std::pair<std::string, bool>> conflicts;
    std::ostringstream dumps;

    try {
        for (const auto& option : instance.options) {
            WorkingMemory mem(UpdateMode::additive);
            for (const auto& [rule, text] : shared_rules) mem.write_rule(rule, text);

            if (!option.facts.empty()) {
                for (const auto& f : option.facts)
                    mem.write_fact(parse_atom(f.symbolic, ParseContext::fact), f.text,
                                   FactOrigin::input());
            } else if (!instance.preparsed()) {
                for (auto& fact :
                     extract_facts(TaskKind::constraint, PromptStage::fact_init, option.text,
                                   mem.schema(), instance.context, option.text, instance.query))
                    mem.write_fact(fact.atom, fact.text, FactOrigin::input());
            }

            std::set<int> implemented_rules;
            bool conflict = false;
            for (int step = 1; step <= budget; ++step) {
                const Snapshot snap = mem.snapshot();
                const std::vector<Grounding> ranked = ground_rank_constraints(snap, opts);
                const Grounding* next = nullptr;
                for (const auto& g : ranked)
                    if (!implemented_rules.count(g.rule_id)) {
                        next = &g;
                        break;
                    }
                if (!next) break;  // every rule checked

                ImplementRequest request;
                request.task = TaskKind::constraint;
                request.grounding = *next;
                if (const RuleEntry* rule = snap.rule_by_id(next->rule_id)) {
                    request.rule = rule->rule;
                    request.rule_text = rule->text;
                }
                request.premise_facts = snap.facts;  // option facts plus inferred ones
                request.query = instance.query;
                request.context = instance.context;
                request.schema_objects = snap.schema.objects_text();
                request.schema_predicates = snap.schema.predicates_text();

                const ImplementationResult result = implementer->implement(request);
                implemented_rules.insert(next->rule_id);

                StepRecord record;
                record.step = ++outcome.steps_used;
                record.option = option.label;
                record.groundings.push_back({next->rule_id, next->fact_ids});
                record.implemented = 1;
                record.judgements.push_back(to_string(result.judgement));
                for (const auto& fact : result.new_facts) {
                    const WriteOutcome w =
                        mem.write_fact(fact.atom, fact.text, FactOrigin::inferred(record.step));
                    if (w.kind != WriteOutcome::Kind::duplicate) record.committed.push_back(w.id);
                }
                if (result.judgement == Judgement::conflict) {
                    conflict = true;
                    record.stop = "conflict";
                }
                const bool stop = record.stop.has_value();
                outcome.trace.push_back(std::move(record));
                if (stop) break;
            }
            conflicts.emplace_back(option.label, conflict);
            dumps << "## option " << option.label << '\n' << mem.dump();
        }
    } catch (const GatewayError&) {
        if (!config_.backup_enabled || !gateway_) throw;
        conflicts.clear();
    }

    outcome.memory_dump = dumps.str();
    if (auto answer = predict_constraint_answer(conflicts, instance.polarity)) {
        outcome.answer = *answer;
        outcome.solved_directly = true;
        return outcome;
    }
    finish_unsolved(outcome, instance);
    return outcome;
}

void Engine::finish_unsolved(RunOutcome& outcome, const InstanceSpec& instance) {
    outcome.solved_directly = false;
    if (config_.backup_enabled && gateway_) {
        try {
            outcome.answer = backup_answer(instance);
            return;
        } catch (const GatewayError&) {
            // degraded: fall through to abstain
        }
    }
    outcome.answer = "abstain";
}

std::string Engine::backup_answer(const InstanceSpec& instance) {
    if (!gateway_) throw GatewayError(GatewayError::Kind::network, "no gateway configured");

    std::ostringstream context;
    auto append = [&context](const std::string& text) {
        if (text.empty()) return;
        if (context.tellp() > 0) context << ' ';
        context << text;
    };
    if (instance.preparsed()) {
        for (const auto& f : instance.facts) append(f.text);
        for (const auto& o : instance.ops) append(o.text);
        for (const auto& r : instance.rules) append(r.text);
    } else {
        append(instance.context);
        for (const auto& s : instance.context_facts) append(s);
        for (const auto& s : instance.context_ops) append(s);
        for (const auto& s : instance.context_rules) append(s);
    }
    for (const auto& option : instance.options) append(option.label + ") " + option.text);

    PromptSlots slots;
    slots.context = context.str();
    slots.query = instance.query;
    const PromptText prompt = registry_.instantiate(instance.mode, PromptStage::backup, slots);
    const std::string response = gateway_->complete(prompt.system, prompt.user);

    // Prefer the last explicit "Answer:" line; otherwise the final line.
    std::istringstream in(response);
    std::string line, last_nonempty, explicit_answer;
    while (std::getline(in, line)) {
        line = trim_copy(line);
        if (line.empty()) continue;
        last_nonempty = line;
        if (line.rfind("Answer:", 0) == 0) explicit_answer = trim_copy(line.substr(7));
    }
    std::string answer = explicit_answer.empty() ? last_nonempty : explicit_answer;
    if (!answer.empty() && answer.back() == '.') answer.pop_back();
    return answer;
}

json to_json(const StepRecord& record) {
    json j;
    j["step"] = record.step;
    if (!record.option.empty()) j["option"] = record.option;
    json gs = json::array();
    for (const auto& g : record.groundings) gs.push_back({{"rule", g.rule_id}, {"facts", g.fact_ids}});
    j["groundings"] = std::move(gs);
    j["implemented"] = record.implemented;
    j["committed"] = record.committed;
    j["judgements"] = record.judgements;
    if (record.stop) j["stop"] = *record.stop;
    return j;
}

json to_json(const RunOutcome& outcome) {
    json j;
    j["answer"] = outcome.answer;
    j["solved_directly"] = outcome.solved_directly;
    j["steps_used"] = outcome.steps_used;
    j["memory_dump"] = outcome.memory_dump;
    return j;
}

void write_trace(const RunOutcome& outcome, const std::filesystem::path& path) {
    std::ofstream out(path);
    for (const auto& record : outcome.trace) out << to_json(record).dump() << '\n';
    json final_record;
    final_record["outcome"] = to_json(outcome);
    out << final_record.dump() << '\n';
}

}  // namespace rulemem
