#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "rulemem/engine.hpp"
#include "rulemem/eval.hpp"
#include "rulemem/synth.hpp"

using namespace rulemem;
using nlohmann::json;

namespace {

struct CliOptions {
    std::string gateway_mode = "replay";
    std::string implementer = "symbolic";
    std::optional<int> max_steps;
    std::optional<int> prune_limit;
    std::string match = "exact";
    std::string cassette;
    bool no_backup = false;
    std::uint64_t seed = 1;
    std::string model = "gpt-4-turbo";
    std::string endpoint = "https://api.openai.com/v1";
    std::string prompts_dir;
    std::string trace_path;
    int index = 0;
};

MatchMode parse_match(const std::string& spec) {
    if (spec == "exact") return MatchMode::exact();
    if (spec.rfind("approx:", 0) == 0) return MatchMode::approximate(std::stod(spec.substr(7)));
    if (spec == "approx") return MatchMode::approximate(0.85);
    throw CLI::ValidationError("--match", "expected 'exact' or 'approx:<threshold>'");
}

EngineConfig engine_config(const CliOptions& opts) {
    EngineConfig config;
    config.max_steps = opts.max_steps;
    if (opts.prune_limit) {
        if (*opts.prune_limit <= 0)
            config.prune_limit = std::nullopt;  // 0 lifts the cap
        else
            config.prune_limit = static_cast<std::size_t>(*opts.prune_limit);
    }
    config.match = parse_match(opts.match);
    config.implementer = opts.implementer == "llm" ? EngineConfig::ImplementerKind::llm
                                                   : EngineConfig::ImplementerKind::symbolic;
    config.backup_enabled = !opts.no_backup;
    return config;
}

std::unique_ptr<Gateway> make_gateway(const CliOptions& opts) {
    const bool needs_gateway = opts.implementer == "llm" || !opts.cassette.empty();
    if (!needs_gateway) return nullptr;
    GatewayConfig config;
    config.mode = gateway_mode_from_string(opts.gateway_mode);
    config.cassette_path = opts.cassette;
    config.model = opts.model;
    config.endpoint = opts.endpoint;
    return std::make_unique<Gateway>(config);
}

PromptRegistry load_registry(const CliOptions& opts) {
    if (!opts.prompts_dir.empty()) return PromptRegistry::from_directory(opts.prompts_dir);
    return PromptRegistry::embedded();
}

int cmd_run(const std::string& path, const CliOptions& opts) {
    const auto instances = load_dataset(path);
    if (instances.empty()) {
        std::cerr << "no instances in " << path << "\n";
        return 1;
    }
    if (opts.index < 0 || opts.index >= static_cast<int>(instances.size())) {
        std::cerr << "index " << opts.index << " out of range (0.." << instances.size() - 1 << ")\n";
        return 1;
    }
    const PromptRegistry registry = load_registry(opts);
    auto gateway = make_gateway(opts);
    Engine engine(engine_config(opts), registry, gateway.get());
    const RunOutcome outcome = engine.run(instances[static_cast<std::size_t>(opts.index)]);

    json report = to_json(outcome);
    report.erase("memory_dump");
    std::cout << report.dump(2) << "\n";
    if (!opts.trace_path.empty()) write_trace(outcome, opts.trace_path);
    return 0;
}

int cmd_eval(const std::string& path, const CliOptions& opts, const std::string& json_out) {
    const auto instances = load_dataset(path);
    const PromptRegistry registry = load_registry(opts);
    auto gateway = make_gateway(opts);
    const EvalReport report = evaluate(instances, engine_config(opts), registry, gateway.get());
    std::cout << report.table();
    if (!json_out.empty()) {
        std::ofstream out(json_out);
        out << report.to_json().dump(2) << "\n";
    } else {
        std::cout << report.to_json().dump(2) << "\n";
    }
    return 0;
}

int cmd_trace(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        std::cerr << "cannot open trace: " << path << "\n";
        return 1;
    }
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        if (j.contains("outcome")) {
            const auto& o = j["outcome"];
            std::cout << "answer: " << o.value("answer", "") << "  solved_directly: "
                      << (o.value("solved_directly", false) ? "yes" : "no")
                      << "  steps: " << o.value("steps_used", 0) << "\n";
            if (o.contains("memory_dump")) std::cout << "memory:\n" << o["memory_dump"].get<std::string>();
            continue;
        }
        std::cout << "step " << j.value("step", 0);
        if (j.contains("option")) std::cout << " [option " << j["option"].get<std::string>() << "]";
        std::cout << ": " << j["groundings"].size() << " groundings, " << j.value("implemented", 0)
                  << " implemented, committed " << j["committed"].dump() << ", judgements "
                  << j["judgements"].dump();
        if (j.contains("stop")) std::cout << ", stop: " << j["stop"].get<std::string>();
        std::cout << "\n";
    }
    return 0;
}

int cmd_gen(const std::string& task, int count, std::uint64_t seed, const std::string& out_path) {
    std::vector<InstanceSpec> instances;
    if (task == "kinship") {
        KinshipSynthConfig config;
        config.count = count;
        config.seed = seed;
        instances = generate_kinship(config);
    } else if (task == "boxes" || task == "state") {
        BoxesSynthConfig config;
        config.count = count;
        config.seed = seed;
        instances = generate_boxes(config);
    } else {
        std::cerr << "unknown generator task: " << task << "\n";
        return 1;
    }
    save_dataset(instances, out_path);
    std::cout << "wrote " << instances.size() << " instances to " << out_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Working-memory rule application engine"};
    app.set_config("--config");
    app.require_subcommand(1);

    CliOptions opts;
    app.add_option("--mode", opts.gateway_mode, "Gateway mode: live, record, replay")
        ->check(CLI::IsMember({"live", "record", "replay"}));
    app.add_option("--implementer", opts.implementer, "Rule implementer: symbolic or llm")
        ->check(CLI::IsMember({"symbolic", "llm"}));
    app.add_option("--max-steps", opts.max_steps, "Step budget override");
    app.add_option("--prune-limit", opts.prune_limit, "Groundings per step (0 = unlimited)");
    app.add_option("--match", opts.match, "Predicate matching: exact or approx:<threshold>");
    app.add_option("--cassette", opts.cassette, "Cassette path for record/replay");
    app.add_flag("--no-backup", opts.no_backup, "Disable the backup answerer");
    app.add_option("--seed", opts.seed, "Generator seed");
    app.add_option("--model", opts.model, "Model name sent to the gateway");
    app.add_option("--endpoint", opts.endpoint, "Chat-completion endpoint base URL");
    app.add_option("--prompts", opts.prompts_dir, "Prompt template directory override");
    app.add_option("--trace", opts.trace_path, "Write a step trace (run subcommand)");

    std::string run_path, eval_path, trace_path, gen_task = "kinship", gen_out, eval_json;
    int gen_count = 20;

    auto* run_cmd = app.add_subcommand("run", "Run one instance and print the outcome");
    run_cmd->add_option("dataset", run_path, "Dataset JSONL")->required();
    run_cmd->add_option("--index", opts.index, "Instance index within the file");

    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a dataset and print the report");
    eval_cmd->add_option("dataset", eval_path, "Dataset JSONL")->required();
    eval_cmd->add_option("--json", eval_json, "Write the JSON report here");

    auto* trace_cmd = app.add_subcommand("trace", "Pretty-print a trace file");
    trace_cmd->add_option("trace_file", trace_path, "Trace JSONL")->required();

    auto* record_cmd = app.add_subcommand("record", "Run one instance with gateway recording");
    record_cmd->add_option("dataset", run_path, "Dataset JSONL")->required();
    record_cmd->add_option("--index", opts.index, "Instance index within the file");

    auto* replay_cmd = app.add_subcommand("replay", "Run one instance from a cassette");
    replay_cmd->add_option("dataset", run_path, "Dataset JSONL")->required();
    replay_cmd->add_option("--index", opts.index, "Instance index within the file");

    auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic dataset");
    gen_cmd->add_option("--task", gen_task, "kinship or boxes");
    gen_cmd->add_option("--count", gen_count, "Instances to generate");
    gen_cmd->add_option("--out", gen_out, "Output JSONL path")->required();

    // Global flags remain valid after the subcommand name.
    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
        std::cerr << e.what() << "\n" << app.help();
        return 2;
    }

    try {
        if (run_cmd->parsed()) return cmd_run(run_path, opts);
        if (record_cmd->parsed()) {
            opts.gateway_mode = "record";
            return cmd_run(run_path, opts);
        }
        if (replay_cmd->parsed()) {
            opts.gateway_mode = "replay";
            return cmd_run(run_path, opts);
        }
        if (eval_cmd->parsed()) return cmd_eval(eval_path, opts, eval_json);
        if (trace_cmd->parsed()) return cmd_trace(trace_path);
        if (gen_cmd->parsed()) return cmd_gen(gen_task, gen_count, opts.seed, gen_out);
    } catch (const GatewayError& e) {
        std::cerr << "gateway error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
