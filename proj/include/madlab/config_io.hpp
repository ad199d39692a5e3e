#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "madlab/experiment.hpp"
#include "madlab/types.hpp"

namespace madlab {

// --- configs -----------------------------------------------------------

// Config files mirror DebateConfig field names, plus the experiment keys
// (trials, mechanisms, attack_fraction, backends / backend). Throws ConfigError.
ExperimentSpec load_experiment_config(const std::filesystem::path& path);
ExperimentSpec experiment_from_json(const nlohmann::json& j);

// Apply one `key=value` override to the raw config document. Dotted keys
// reach nested fields (weights.w1, backend.beta). Unknown keys are rejected
// before execution. Values parse as JSON when possible, else as strings.
void apply_override(nlohmann::json& config, const std::string& assignment);

// --- corpus ------------------------------------------------------------

// JSONL, one task per line: {"id", "question", "answer", "kind"}. Ground
// truths are normalized by kind and must not map to None. Throws CorpusError.
std::vector<Task> load_corpus_jsonl(const std::filesystem::path& path);

// --- transcripts (first-class on-disk artifacts) -----------------------

nlohmann::json transcript_to_json(const Transcript& transcript, const Task* task = nullptr);
Transcript transcript_from_json(const nlohmann::json& j, Task* task_out = nullptr);
void write_transcript(const Transcript& transcript, const Task& task,
                      const std::filesystem::path& path);
Transcript read_transcript(const std::filesystem::path& path, Task* task_out = nullptr);

// --- decisions / results / reports --------------------------------------

nlohmann::json decision_to_json(const Decision& decision, std::uint64_t seed);
nlohmann::json run_result_to_json(const RunResult& result);
RunResult run_result_from_json(const nlohmann::json& j);

// Writes results.json (full results) and summary.csv (one row per mechanism).
void write_report(const ExperimentSpec& spec, const std::vector<RunResult>& results,
                  const std::filesystem::path& out_dir);

std::vector<RunResult> load_results(const std::filesystem::path& results_json);

std::string summary_csv(const ExperimentSummary& summary);

}  // namespace madlab
