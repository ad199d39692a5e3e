#include "madlab/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include "madlab/agents.hpp"
#include "madlab/config_io.hpp"
#include "madlab/debate.hpp"
#include "madlab/errors.hpp"
#include "madlab/rng.hpp"

namespace madlab {

bool operator==(const RunResult& a, const RunResult& b) {
    return a.task_id == b.task_id && a.trial == b.trial && a.decisions == b.decisions &&
           a.correct == b.correct && a.answers == b.answers && a.token_counts == b.token_counts &&
           a.token_cost == b.token_cost && a.attacked == b.attacked;
}

std::uint64_t trial_seed(std::uint64_t base_seed, const std::string& task_id, int trial) {
    return derive_seed(base_seed, task_id, static_cast<std::uint64_t>(trial));
}

std::set<int> sample_attacked(int n_agents, double fraction, std::uint64_t seed) {
    const int count = static_cast<int>(std::floor(fraction * n_agents));
    std::vector<int> pool(n_agents);
    std::iota(pool.begin(), pool.end(), 1);
    SplitMix64 rng(seed);
    std::set<int> out;
    for (int i = 0; i < count; ++i) {
        const std::size_t j = i + rng.below(static_cast<std::uint64_t>(n_agents - i));
        std::swap(pool[i], pool[j]);
        out.insert(pool[i]);
    }
    return out;
}

std::vector<std::string> validate_spec(const ExperimentSpec& spec) {
    std::vector<std::string> errors = validate_config(spec.config);
    if (spec.trials < 1) errors.push_back("trials must be >= 1");
    if (spec.mechanisms.empty()) errors.push_back("at least one mechanism is required");
    if (spec.attack_fraction && (*spec.attack_fraction < 0.0 || *spec.attack_fraction > 1.0))
        errors.push_back("attack_fraction must lie in [0,1]");
    return errors;
}

std::size_t token_cost(const Transcript& transcript) {
    std::size_t total = 0;
    for (int i = 1; i <= transcript.n_agents(); ++i)
        for (int k = 0; k <= transcript.n_rounds(); ++k) total += transcript.cell(i, k).token_count;
    return total;
}

namespace {

std::string file_safe(const std::string& id) {
    std::string out = id;
    for (char& c : out)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_')) c = '_';
    return out;
}

RunResult run_one(const ExperimentSpec& spec, const Task& task, int trial,
                  const std::vector<std::shared_ptr<AgentBackend>>& agents) {
    const std::uint64_t seed = trial_seed(spec.config.seed, task.id, trial);
    DebateConfig cfg = spec.config;
    cfg.backends.clear();  // agents are prebuilt and shared across trials
    cfg.seed = seed;
    if (spec.attack_fraction) {
        cfg.attacked =
            sample_attacked(cfg.n_agents, *spec.attack_fraction, derive_seed(seed, "attacked"));
    }

    const Transcript transcript = run_debate(cfg, task, agents);

    if (spec.transcript_dir) {
        const auto path = std::filesystem::path(*spec.transcript_dir) /
                          (file_safe(task.id) + "_t" + std::to_string(trial) + ".json");
        write_transcript(transcript, task, path);
    }

    RunResult rr;
    rr.task_id = task.id;
    rr.trial = trial;
    rr.attacked = cfg.attacked;
    rr.token_cost = token_cost(transcript);
    rr.answers.resize(cfg.n_agents);
    rr.token_counts.resize(cfg.n_agents);
    for (int i = 1; i <= cfg.n_agents; ++i) {
        for (int k = 0; k <= cfg.n_rounds; ++k) {
            const Response& cell = transcript.cell(i, k);
            rr.answers[i - 1].push_back(cell.answer);
            rr.token_counts[i - 1].push_back(cell.token_count);
        }
    }

    for (const Mechanism mechanism : spec.mechanisms) {
        const std::uint64_t tie_seed =
            derive_seed(seed, "tie-break", static_cast<std::uint64_t>(mechanism));
        SplitMix64 rng(tie_seed);
        try {
            Decision d = decide(mechanism, transcript, cfg.weights, rng);
            d.seed = tie_seed;
            rr.correct[mechanism] = d.final_answer == task.ground_truth;
            rr.decisions[mechanism] = std::move(d);
        } catch (const AllAnswersNone&) {
            rr.decisions[mechanism] = std::nullopt;
            rr.correct[mechanism] = false;
        }
    }
    return rr;
}

}  // namespace

std::vector<RunResult> run_experiment(const ExperimentSpec& spec, Execution exec) {
    const auto errors = validate_spec(spec);
    if (!errors.empty()) {
        std::string joined;
        for (const auto& e : errors) joined += (joined.empty() ? "" : "; ") + e;
        throw ConfigError(joined);
    }

    struct Job {
        const Task* task;
        int trial;
    };
    std::vector<Job> jobs;
    jobs.reserve(spec.tasks.size() * static_cast<std::size_t>(spec.trials));
    for (const Task& task : spec.tasks)
        for (int trial = 0; trial < spec.trials; ++trial) jobs.push_back({&task, trial});

    // Backends are stateless and safe to share; build them once up front so a
    // bad backend spec also fails before any work is scheduled.
    const auto agents = make_backends(spec.config);

    std::vector<RunResult> results(jobs.size());
    std::vector<std::string> job_errors(jobs.size());
    const bool parallel = exec == Execution::Parallel;
    const auto total = static_cast<std::ptrdiff_t>(jobs.size());

    // Jobs are independent; per-trial seeds make the outcome identical no
    // matter how the loop is scheduled.
    #pragma omp parallel for schedule(dynamic, 16) if (parallel)
    for (std::ptrdiff_t j = 0; j < total; ++j) {
        try {
            results[j] = run_one(spec, *jobs[j].task, jobs[j].trial, agents);
        } catch (const std::exception& e) {
            job_errors[j] = e.what();
        }
    }

    for (std::size_t j = 0; j < job_errors.size(); ++j)
        if (!job_errors[j].empty())
            throw Error("job " + std::to_string(j) + " failed: " + job_errors[j]);

    std::stable_sort(results.begin(), results.end(), [](const RunResult& a, const RunResult& b) {
        if (a.task_id != b.task_id) return a.task_id < b.task_id;
        return a.trial < b.trial;
    });
    return results;
}

double accuracy(const std::vector<RunResult>& results, Mechanism mechanism) {
    if (results.empty()) throw EmptyResultSet();
    std::size_t hits = 0;
    for (const RunResult& r : results)
        if (r.correct.at(mechanism)) ++hits;
    return static_cast<double>(hits) / static_cast<double>(results.size());
}

double consensus_rate(const std::vector<RunResult>& results, int round) {
    if (results.empty()) return 0.0;
    std::size_t unanimous = 0;
    for (const RunResult& r : results) {
        const NormalizedAnswer* first = nullptr;
        bool all_equal = true;
        for (const auto& agent_row : r.answers) {
            const NormalizedAnswer& a = agent_row.at(static_cast<std::size_t>(round));
            if (a.is_none()) continue;
            if (first == nullptr) {
                first = &a;
            } else if (*first != a) {
                all_equal = false;
                break;
            }
        }
        if (first != nullptr && all_equal) ++unanimous;
    }
    return static_cast<double>(unanimous) / static_cast<double>(results.size());
}

ExperimentSummary summarize(const ExperimentSpec& spec, const std::vector<RunResult>& results) {
    ExperimentSummary summary;
    summary.n_agents = spec.config.n_agents;
    summary.n_rounds = spec.config.n_rounds;
    summary.mode = spec.config.mode;
    summary.attack_fraction = spec.attack_fraction;
    summary.trials = spec.trials;
    if (results.empty()) return summary;

    double mean_tc = 0.0;
    for (const RunResult& r : results) mean_tc += static_cast<double>(r.token_cost);
    mean_tc /= static_cast<double>(results.size());

    for (const Mechanism mechanism : spec.mechanisms) {
        SummaryRow row;
        row.mechanism = mechanism;
        row.accuracy = accuracy(results, mechanism);
        row.mean_token_cost = mean_tc;
        std::size_t ties = 0;
        for (const RunResult& r : results) {
            const auto it = r.decisions.find(mechanism);
            if (it != r.decisions.end() && it->second && it->second->tie_broken) ++ties;
        }
        row.tie_rate = static_cast<double>(ties) / static_cast<double>(results.size());
        summary.rows.push_back(row);
    }
    return summary;
}

}  // namespace madlab
