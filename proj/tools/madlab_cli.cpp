// madlab: multi-agent debate lab.
//
// Subcommands:
//   run       debate a task corpus and score it with the selected mechanisms
//   simulate  Monte Carlo sweeps over synthetic probabilistic agents
//   attack    clean-vs-attacked comparison on the same corpus
//   decide    re-run the decision mechanisms on a recorded transcript
//   report    regenerate summary.csv from a results.json
//
// Exit codes: 0 ok, 1 config error, 2 corpus/transcript error, 3 backend error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "madlab/agents.hpp"
#include "madlab/config_io.hpp"
#include "madlab/debate.hpp"
#include "madlab/decide.hpp"
#include "madlab/errors.hpp"
#include "madlab/experiment.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace madlab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitCorpus = 2;
constexpr int kExitBackend = 3;

struct CliInvocation {
    std::string command;
    std::string config_path;
    std::string corpus_path;
    std::string out_dir = "out";
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> mechanisms;
    std::string transcript_path;
    std::string results_path;
    std::optional<double> attack_fraction;
    bool save_transcripts = false;
};

json load_config_json(const CliInvocation& inv) {
    std::ifstream in(inv.config_path);
    if (!in) throw ConfigError("config not readable: " + inv.config_path);
    json j = json::parse(in, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) throw ConfigError("config is not valid JSON: " + inv.config_path);
    for (const std::string& assignment : inv.overrides) apply_override(j, assignment);
    return j;
}

ExperimentSpec build_spec(const CliInvocation& inv, const json& config) {
    ExperimentSpec spec = experiment_from_json(config);
    if (inv.seed) spec.config.seed = *inv.seed;
    if (!inv.mechanisms.empty()) {
        spec.mechanisms.clear();
        for (const std::string& name : inv.mechanisms) {
            const auto mechanism = mechanism_from_string(name);
            if (!mechanism) throw ConfigError("unknown mechanism: " + name);
            spec.mechanisms.push_back(*mechanism);
        }
    }
    return spec;
}

void print_summary(const ExperimentSpec& spec, const std::vector<RunResult>& results) {
    const ExperimentSummary summary = summarize(spec, results);
    for (const SummaryRow& row : summary.rows) {
        std::printf("%-22s accuracy %.4f   mean TC %.1f   tie rate %.4f\n",
                    to_string(row.mechanism), row.accuracy, row.mean_token_cost, row.tie_rate);
    }
}

int cmd_run(const CliInvocation& inv) {
    const json config = load_config_json(inv);
    ExperimentSpec spec = build_spec(inv, config);
    spec.tasks = load_corpus_jsonl(inv.corpus_path);
    if (inv.save_transcripts)
        spec.transcript_dir = (fs::path(inv.out_dir) / "transcripts").string();

    const auto results = run_experiment(spec);
    write_report(spec, results, inv.out_dir);
    print_summary(spec, results);
    std::printf("wrote %s and %s\n", (fs::path(inv.out_dir) / "results.json").string().c_str(),
                (fs::path(inv.out_dir) / "summary.csv").string().c_str());
    return kExitOk;
}

// Sweeps beta over synthetic agents; one summary row per (beta, mechanism)
// plus a consensus-by-round table.
int cmd_simulate(const CliInvocation& inv) {
    const json config = load_config_json(inv);
    ExperimentSpec base = build_spec(inv, config);
    if (inv.mechanisms.empty() && !config.contains("mechanisms"))
        base.mechanisms = {Mechanism::Score};

    if (base.config.backends.size() != 1 ||
        !std::holds_alternative<SyntheticSpec>(base.config.backends[0].impl))
        throw ConfigError("simulate needs a single shared synthetic backend");
    const SyntheticSpec& synth = std::get<SyntheticSpec>(base.config.backends[0].impl);

    std::vector<double> betas;
    if (config.contains("betas"))
        betas = config.at("betas").get<std::vector<double>>();
    else if (synth.beta)
        betas = {*synth.beta};
    else
        betas = {base.config.mode == DebateMode::Conformity ? 1.5 : -1.5};

    Task task;
    task.id = "synthetic";
    task.question = config.value("question", std::string("Choose your answer."));
    task.kind = TaskKind::FreeText;
    task.ground_truth =
        NormalizedAnswer(config.value("true_answer", synth.answer_space.at(0)));

    std::string summary_rows;
    std::string consensus_rows;
    for (const double beta : betas) {
        ExperimentSpec spec = base;
        std::get<SyntheticSpec>(spec.config.backends[0].impl).beta = beta;
        spec.tasks = {task};
        const auto results = run_experiment(spec);
        const ExperimentSummary summary = summarize(spec, results);
        for (const SummaryRow& row : summary.rows) {
            char line[160];
            std::snprintf(line, sizeof(line), "%.3f,%s,%.6f,%.6f,%.6f\n", beta,
                          to_string(row.mechanism), row.accuracy, row.mean_token_cost,
                          row.tie_rate);
            summary_rows += line;
        }
        for (int k = 0; k <= spec.config.n_rounds; ++k) {
            char line[96];
            std::snprintf(line, sizeof(line), "%.3f,%d,%.6f\n", beta, k,
                          consensus_rate(results, k));
            consensus_rows += line;
        }
    }

    fs::create_directories(inv.out_dir);
    {
        std::ofstream out(fs::path(inv.out_dir) / "simulate_summary.csv", std::ios::binary);
        out << "beta,mechanism,accuracy,mean_token_cost,tie_rate\n" << summary_rows;
    }
    {
        std::ofstream out(fs::path(inv.out_dir) / "consensus.csv", std::ios::binary);
        out << "beta,round,consensus_rate\n" << consensus_rows;
    }
    std::printf("simulated %zu beta value(s) x %d trial(s); wrote simulate_summary.csv and "
                "consensus.csv under %s\n",
                betas.size(), base.trials, inv.out_dir.c_str());
    return kExitOk;
}

int cmd_attack(const CliInvocation& inv) {
    const json config = load_config_json(inv);
    ExperimentSpec clean = build_spec(inv, config);
    clean.tasks = load_corpus_jsonl(inv.corpus_path);
    clean.attack_fraction.reset();
    clean.config.attacked.clear();

    ExperimentSpec attacked = clean;
    attacked.attack_fraction = inv.attack_fraction.value_or(
        config.contains("attack_fraction") ? config.at("attack_fraction").get<double>() : 0.5);

    const auto clean_results = run_experiment(clean);
    const auto attacked_results = run_experiment(attacked);
    write_report(clean, clean_results, fs::path(inv.out_dir) / "clean");
    write_report(attacked, attacked_results, fs::path(inv.out_dir) / "attacked");

    std::string rows;
    for (const Mechanism mechanism : clean.mechanisms) {
        const double before = accuracy(clean_results, mechanism);
        const double after = accuracy(attacked_results, mechanism);
        char line[160];
        std::snprintf(line, sizeof(line), "%s,%.6f,%.6f,%.6f\n", to_string(mechanism), before,
                      after, before - after);
        rows += line;
        std::printf("%-22s clean %.4f   attacked %.4f   drop %.4f\n", to_string(mechanism),
                    before, after, before - after);
    }
    std::ofstream out(fs::path(inv.out_dir) / "attack_summary.csv", std::ios::binary);
    out << "mechanism,clean_accuracy,attacked_accuracy,drop\n" << rows;
    return kExitOk;
}

int cmd_decide(const CliInvocation& inv) {
    Task task;
    task.kind = TaskKind::FreeText;
    const Transcript transcript = read_transcript(inv.transcript_path, &task);
    const std::uint64_t seed = inv.seed.value_or(0);

    json output;
    output["transcript"] = inv.transcript_path;
    for (const Mechanism mechanism : {Mechanism::Score, Mechanism::MajorityFinalRound}) {
        const std::uint64_t tie_seed =
            derive_seed(seed, "tie-break", static_cast<std::uint64_t>(mechanism));
        SplitMix64 rng(tie_seed);
        try {
            Decision d = decide(mechanism, transcript, Weights{}, rng);
            d.seed = tie_seed;
            output[to_string(mechanism)] = decision_to_json(d, tie_seed);
        } catch (const AllAnswersNone&) {
            output[to_string(mechanism)] = {{"final_answer", nullptr},
                                            {"note", "no decidable answer"}};
        }
    }
    std::cout << output.dump(2) << "\n";
    return kExitOk;
}

int cmd_report(const CliInvocation& inv) {
    std::ifstream in(inv.results_path);
    if (!in) throw CorpusError("results not readable: " + inv.results_path);
    const json doc = json::parse(in, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded() || !doc.contains("results") || !doc.contains("spec"))
        throw CorpusError("results file is malformed: " + inv.results_path);

    std::vector<RunResult> results;
    for (const auto& r : doc.at("results")) results.push_back(run_result_from_json(r));

    ExperimentSpec spec;
    const json& echo = doc.at("spec");
    spec.config.n_agents = echo.value("n_agents", 1);
    spec.config.n_rounds = echo.value("n_rounds", 0);
    if (echo.contains("mode"))
        if (const auto mode = debate_mode_from_string(echo.at("mode").get<std::string>()))
            spec.config.mode = *mode;
    spec.trials = echo.value("trials", 1);
    if (echo.contains("attack_fraction"))
        spec.attack_fraction = echo.at("attack_fraction").get<double>();
    spec.mechanisms.clear();
    for (const auto& m : echo.value("mechanisms", std::vector<std::string>{}))
        if (const auto mechanism = mechanism_from_string(m)) spec.mechanisms.push_back(*mechanism);

    fs::create_directories(inv.out_dir);
    std::ofstream out(fs::path(inv.out_dir) / "summary.csv", std::ios::binary);
    out << summary_csv(summarize(spec, results));
    print_summary(spec, results);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-agent debate lab: scored decisions over full debate trajectories"};
    app.require_subcommand(1);

    CliInvocation inv;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", inv.config_path, "experiment config (JSON)")
            ->required()
            ->check(CLI::ExistingFile);
        cmd->add_option("--out", inv.out_dir, "output directory");
        cmd->add_option("--override", inv.overrides,
                        "config override key=value (repeatable, dotted keys allowed)");
        cmd->add_option("--seed", inv.seed, "seed override");
        cmd->add_option("--mechanisms", inv.mechanisms,
                        "decision mechanisms: score, majority_final_round");
    };

    CLI::App* run = app.add_subcommand("run", "debate a JSONL corpus and write reports");
    add_common(run);
    run->add_option("--corpus", inv.corpus_path, "task corpus (JSONL)")->required();
    run->add_flag("--save-transcripts", inv.save_transcripts,
                  "persist every debate transcript under <out>/transcripts/");

    CLI::App* simulate = app.add_subcommand("simulate", "synthetic Monte Carlo sweeps");
    add_common(simulate);

    CLI::App* attack = app.add_subcommand("attack", "clean vs attacked comparison");
    add_common(attack);
    attack->add_option("--corpus", inv.corpus_path, "task corpus (JSONL)")->required();
    attack->add_option("--attack-fraction", inv.attack_fraction,
                       "fraction of agents compromised per trial (default 0.5)");

    CLI::App* decide_cmd = app.add_subcommand("decide", "decide a recorded transcript");
    decide_cmd->add_option("--transcript", inv.transcript_path, "transcript JSON file")
        ->required();
    decide_cmd->add_option("--seed", inv.seed, "tie-break seed");

    CLI::App* report = app.add_subcommand("report", "regenerate summary.csv from results.json");
    report->add_option("--results", inv.results_path, "results.json path")->required();
    report->add_option("--out", inv.out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (run->parsed()) return cmd_run(inv);
        if (simulate->parsed()) return cmd_simulate(inv);
        if (attack->parsed()) return cmd_attack(inv);
        if (decide_cmd->parsed()) return cmd_decide(inv);
        if (report->parsed()) return cmd_report(inv);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const CorpusError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitCorpus;
    } catch (const Error& e) {
        std::cerr << "backend error: " << e.what() << "\n";
        return kExitBackend;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBackend;
    }
    return kExitConfig;
}
