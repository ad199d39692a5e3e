#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "madlab/decide.hpp"
#include "madlab/types.hpp"

namespace madlab {

// Outcome of one debate: every requested mechanism evaluated on the same
// transcript, plus the answer/token grids needed for offline analysis.
struct RunResult {
    std::string task_id;
    int trial = 0;
    std::map<Mechanism, std::optional<Decision>> decisions;  // nullopt = all answers were None
    std::map<Mechanism, bool> correct;
    std::vector<std::vector<NormalizedAnswer>> answers;      // [agent][round], N x (R+1)
    std::vector<std::vector<std::size_t>> token_counts;
    std::size_t token_cost = 0;
    std::set<int> attacked;  // realized attacked set for this trial

    friend bool operator==(const RunResult&, const RunResult&);
};

struct ExperimentSpec {
    DebateConfig config;
    std::vector<Task> tasks;
    std::vector<Mechanism> mechanisms = {Mechanism::Score, Mechanism::MajorityFinalRound};
    // When set, floor(attack_fraction * N) agents are sampled (uniform, without
    // replacement, seeded) per trial; otherwise config.attacked is used as-is.
    std::optional<double> attack_fraction;
    int trials = 1;
    // When set, every debate transcript is written here as
    // <task_id>_t<trial>.json for offline re-decision.
    std::optional<std::string> transcript_dir;
};

std::vector<std::string> validate_spec(const ExperimentSpec& spec);

enum class Execution { Serial, Parallel };

/// Run every (task, trial) job: debate once, evaluate all mechanisms on that
/// one transcript, never abort the sweep on per-task failures. Parallel and
/// serial execution produce identical results; output is sorted by
/// (task_id, trial). Per-trial seeds derive from (seed, task_id, trial).
std::vector<RunResult> run_experiment(const ExperimentSpec& spec,
                                      Execution exec = Execution::Parallel);

// Fraction of results whose correct[mechanism] is true. Throws EmptyResultSet.
double accuracy(const std::vector<RunResult>& results, Mechanism mechanism);

// Total output tokens across all agents and rounds.
std::size_t token_cost(const Transcript& transcript);

/// Fraction of runs whose round-k column is unanimous over its non-None
/// answers (an all-None column does not count as consensus).
double consensus_rate(const std::vector<RunResult>& results, int round);

struct SummaryRow {
    Mechanism mechanism = Mechanism::Score;
    double accuracy = 0.0;
    double mean_token_cost = 0.0;
    double tie_rate = 0.0;
};

struct ExperimentSummary {
    std::vector<SummaryRow> rows;
    int n_agents = 0;
    int n_rounds = 0;
    DebateMode mode = DebateMode::Conformity;
    std::optional<double> attack_fraction;
    int trials = 1;
};

ExperimentSummary summarize(const ExperimentSpec& spec, const std::vector<RunResult>& results);

// The per-trial base seed; exposed so individual jobs can be re-run alone.
std::uint64_t trial_seed(std::uint64_t base_seed, const std::string& task_id, int trial);

// The realized attacked set for one trial under an attack fraction.
std::set<int> sample_attacked(int n_agents, double fraction, std::uint64_t seed);

}  // namespace madlab
