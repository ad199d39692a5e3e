#include "madlab/config_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "madlab/errors.hpp"

namespace madlab {

namespace {

using nlohmann::json;

json read_json_file(const std::filesystem::path& path, const char* what) {
    std::ifstream in(path);
    if (!in) throw ConfigError(std::string(what) + " not readable: " + path.string());
    json j = json::parse(in, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded())
        throw ConfigError(std::string(what) + " is not valid JSON: " + path.string());
    return j;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

// --- backend specs -------------------------------------------------------

ScriptStepSpec step_from_json(const json& j) {
    ScriptStepSpec step;
    if (j.contains("rule")) {
        const std::string rule = j.at("rule").get<std::string>();
        if (rule == "copy_plurality") {
            step.rule = ScriptStepSpec::Rule::CopyPlurality;
        } else if (rule == "hold") {
            step.rule = ScriptStepSpec::Rule::Hold;
        } else if (rule == "fixed") {
            step.rule = ScriptStepSpec::Rule::Fixed;
        } else {
            throw ConfigError("unknown script rule: " + rule);
        }
    }
    if (step.rule == ScriptStepSpec::Rule::Fixed) {
        if (!j.contains("answer")) throw ConfigError("fixed script step needs an answer");
        if (!j.at("answer").is_null())
            step.answer = NormalizedAnswer(j.at("answer").get<std::string>());
    }
    if (j.contains("token_count")) step.token_count = j.at("token_count").get<std::size_t>();
    return step;
}

BackendSpec backend_from_json(const json& j) {
    const std::string kind = j.value("kind", "synthetic");
    BackendSpec spec;
    if (kind == "scripted") {
        ScriptedSpec s;
        for (const auto& step : j.at("steps")) s.steps.push_back(step_from_json(step));
        spec.impl = std::move(s);
    } else if (kind == "synthetic") {
        SyntheticSpec s;
        s.answer_space = j.at("answer_space").get<std::vector<std::string>>();
        s.p_in = j.at("p_in").get<std::vector<double>>();
        if (j.contains("beta")) s.beta = j.at("beta").get<double>();
        if (j.contains("p_in_anti_conformity"))
            s.p_in_anti_conformity = j.at("p_in_anti_conformity").get<std::vector<double>>();
        s.model_seed = j.value("model_seed", 0ULL);
        spec.impl = std::move(s);
    } else if (kind == "llm_http") {
        LlmHttpSpec s;
        s.endpoint = j.at("endpoint").get<std::string>();
        s.model = j.value("model", "default");
        s.path = j.value("path", s.path);
        s.api_key_env = j.value("api_key_env", s.api_key_env);
        s.timeout_s = j.value("timeout_s", s.timeout_s);
        s.max_retries = j.value("max_retries", s.max_retries);
        s.backoff_ms = j.value("backoff_ms", s.backoff_ms);
        spec.impl = std::move(s);
    } else {
        throw ConfigError("unknown backend kind: " + kind);
    }
    return spec;
}

const char* const kKnownTopKeys[] = {"n_agents",   "n_rounds",        "mode",
                                     "weights",    "attacked",        "seed",
                                     "context_window", "backend",     "backends",
                                     "trials",     "mechanisms",      "attack_fraction",
                                     "betas",      "true_answer",     "question"};

bool known_top_key(const std::string& key) {
    for (const char* k : kKnownTopKeys)
        if (key == k) return true;
    return false;
}

json answer_to_json(const NormalizedAnswer& a) {
    return a.is_none() ? json(nullptr) : json(a.value());
}

NormalizedAnswer answer_from_json(const json& j) {
    return j.is_null() ? NormalizedAnswer::none() : NormalizedAnswer(j.get<std::string>());
}

}  // namespace

ExperimentSpec experiment_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    for (const auto& [key, value] : j.items())
        if (!known_top_key(key)) throw ConfigError("unknown config key: " + key);

    ExperimentSpec spec;
    DebateConfig& cfg = spec.config;
    cfg.n_agents = j.value("n_agents", cfg.n_agents);
    cfg.n_rounds = j.value("n_rounds", cfg.n_rounds);
    if (j.contains("mode")) {
        const auto mode = debate_mode_from_string(j.at("mode").get<std::string>());
        if (!mode) throw ConfigError("unknown mode: " + j.at("mode").get<std::string>());
        cfg.mode = *mode;
    }
    if (j.contains("weights")) {
        const json& w = j.at("weights");
        cfg.weights.initial_credit = w.value("w1", cfg.weights.initial_credit);
        cfg.weights.transfer_penalty = w.value("w2", cfg.weights.transfer_penalty);
        cfg.weights.transfer_credit = w.value("w3", cfg.weights.transfer_credit);
        cfg.weights.maintain_credit = w.value("w4", cfg.weights.maintain_credit);
    }
    if (j.contains("attacked"))
        for (const auto& a : j.at("attacked")) cfg.attacked.insert(a.get<int>());
    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("context_window")) {
        const auto w = context_window_from_string(j.at("context_window").get<std::string>());
        if (!w)
            throw ConfigError("unknown context_window: " +
                              j.at("context_window").get<std::string>());
        cfg.context_window = *w;
    }
    if (j.contains("backend")) cfg.backends.push_back(backend_from_json(j.at("backend")));
    if (j.contains("backends"))
        for (const auto& b : j.at("backends")) cfg.backends.push_back(backend_from_json(b));

    spec.trials = j.value("trials", spec.trials);
    if (j.contains("attack_fraction")) spec.attack_fraction = j.at("attack_fraction").get<double>();
    if (j.contains("mechanisms")) {
        spec.mechanisms.clear();
        for (const auto& m : j.at("mechanisms")) {
            const auto mechanism = mechanism_from_string(m.get<std::string>());
            if (!mechanism) throw ConfigError("unknown mechanism: " + m.get<std::string>());
            spec.mechanisms.push_back(*mechanism);
        }
    }
    return spec;
}

ExperimentSpec load_experiment_config(const std::filesystem::path& path) {
    return experiment_from_json(read_json_file(path, "config"));
}

void apply_override(json& config, const std::string& assignment) {
    const std::size_t eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override must look like key=value: " + assignment);
    const std::string key = assignment.substr(0, eq);
    const std::string value = assignment.substr(eq + 1);

    // Dotted keys address nested objects; the leading segment must be known.
    std::vector<std::string> parts;
    std::stringstream ss(key);
    std::string part;
    while (std::getline(ss, part, '.')) parts.push_back(part);
    if (parts.empty() || !known_top_key(parts[0]))
        throw ConfigError("unknown override key: " + key);

    json parsed = json::parse(value, nullptr, /*allow_exceptions=*/false);
    if (parsed.is_discarded()) parsed = value;  // plain strings stay strings

    json* node = &config;
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) node = &((*node)[parts[i]]);
    (*node)[parts.back()] = std::move(parsed);
}

std::vector<Task> load_corpus_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw CorpusError("corpus not readable: " + path.string());

    std::vector<Task> tasks;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        const json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
        if (j.is_discarded() || !j.is_object())
            throw CorpusError("line " + std::to_string(line_no) + " is not a JSON object");
        Task task;
        try {
            task.id = j.at("id").get<std::string>();
            task.question = j.at("question").get<std::string>();
            const std::string kind_str = j.at("kind").get<std::string>();
            const auto kind = task_kind_from_string(kind_str);
            if (!kind)
                throw CorpusError("line " + std::to_string(line_no) +
                                  ": unknown kind: " + kind_str);
            task.kind = *kind;
            task.ground_truth = normalize_answer(j.at("answer").get<std::string>(), task.kind);
        } catch (const json::exception& e) {
            throw CorpusError("line " + std::to_string(line_no) + ": " + e.what());
        }
        if (task.ground_truth.is_none())
            throw CorpusError("line " + std::to_string(line_no) +
                              ": ground truth does not normalize to an answer");
        tasks.push_back(std::move(task));
    }
    return tasks;
}

json transcript_to_json(const Transcript& transcript, const Task* task) {
    json j;
    j["n_agents"] = transcript.n_agents();
    j["n_rounds"] = transcript.n_rounds();
    if (task != nullptr) {
        j["task"] = {{"id", task->id},
                     {"question", task->question},
                     {"kind", to_string(task->kind)},
                     {"answer", answer_to_json(task->ground_truth)}};
    }
    json cells = json::array();
    for (int i = 1; i <= transcript.n_agents(); ++i) {
        for (int k = 0; k <= transcript.n_rounds(); ++k) {
            const Response& r = transcript.cell(i, k);
            cells.push_back({{"agent", r.agent_index},
                             {"round", r.round},
                             {"raw_text", r.raw_text},
                             {"answer", answer_to_json(r.answer)},
                             {"token_count", r.token_count},
                             {"token_count_estimated", r.token_count_estimated}});
        }
    }
    j["cells"] = std::move(cells);
    return j;
}

Transcript transcript_from_json(const json& j, Task* task_out) {
    try {
        Transcript transcript(j.at("n_agents").get<int>(), j.at("n_rounds").get<int>());
        if (task_out != nullptr && j.contains("task")) {
            const json& t = j.at("task");
            task_out->id = t.value("id", std::string("unknown"));
            task_out->question = t.value("question", std::string());
            if (t.contains("kind")) {
                const auto kind = task_kind_from_string(t.at("kind").get<std::string>());
                if (kind) task_out->kind = *kind;
            }
            if (t.contains("answer")) task_out->ground_truth = answer_from_json(t.at("answer"));
        }
        for (const json& c : j.at("cells")) {
            Response r;
            r.agent_index = c.at("agent").get<int>();
            r.round = c.at("round").get<int>();
            r.raw_text = c.value("raw_text", std::string());
            r.answer = answer_from_json(c.at("answer"));
            r.token_count = c.value("token_count", std::size_t{0});
            r.token_count_estimated = c.value("token_count_estimated", false);
            transcript.set(std::move(r));
        }
        if (!transcript.complete())
            throw CorpusError("transcript is missing cells");
        return transcript;
    } catch (const CorpusError&) {
        throw;
    } catch (const json::exception& e) {
        throw CorpusError(std::string("malformed transcript: ") + e.what());
    } catch (const std::exception& e) {
        throw CorpusError(std::string("malformed transcript: ") + e.what());
    }
}

void write_transcript(const Transcript& transcript, const Task& task,
                      const std::filesystem::path& path) {
    write_text_file(path, transcript_to_json(transcript, &task).dump(2) + "\n");
}

Transcript read_transcript(const std::filesystem::path& path, Task* task_out) {
    std::ifstream in(path);
    if (!in) throw CorpusError("transcript not readable: " + path.string());
    const json j = json::parse(in, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) throw CorpusError("transcript is not valid JSON: " + path.string());
    return transcript_from_json(j, task_out);
}

json decision_to_json(const Decision& decision, std::uint64_t seed) {
    json scores = json::object();
    for (const auto& [answer, score] : decision.scores) scores[answer.display()] = score;
    json max_set = json::array();
    for (const auto& answer : decision.max_set) max_set.push_back(answer_to_json(answer));
    return {{"final_answer", answer_to_json(decision.final_answer)},
            {"mechanism", to_string(decision.mechanism)},
            {"scores", std::move(scores)},
            {"max_set", std::move(max_set)},
            {"tie_broken", decision.tie_broken},
            {"seed", seed}};
}

namespace {

Decision decision_from_json(const json& j) {
    Decision d;
    d.final_answer = answer_from_json(j.at("final_answer"));
    const auto mechanism = mechanism_from_string(j.at("mechanism").get<std::string>());
    if (!mechanism) throw CorpusError("unknown mechanism in results file");
    d.mechanism = *mechanism;
    for (const auto& [key, value] : j.at("scores").items())
        d.scores[NormalizedAnswer(key)] = value.get<double>();
    for (const auto& a : j.at("max_set")) d.max_set.push_back(answer_from_json(a));
    d.tie_broken = j.at("tie_broken").get<bool>();
    d.seed = j.value("seed", 0ULL);
    return d;
}

}  // namespace

json run_result_to_json(const RunResult& result) {
    json decisions = json::object();
    for (const auto& [mechanism, decision] : result.decisions) {
        decisions[to_string(mechanism)] =
            decision ? decision_to_json(*decision, decision->seed) : json(nullptr);
    }
    json correct = json::object();
    for (const auto& [mechanism, ok] : result.correct) correct[to_string(mechanism)] = ok;

    json answers = json::array();
    for (const auto& row : result.answers) {
        json r = json::array();
        for (const auto& a : row) r.push_back(answer_to_json(a));
        answers.push_back(std::move(r));
    }

    return {{"task_id", result.task_id},
            {"trial", result.trial},
            {"attacked", result.attacked},
            {"answers", std::move(answers)},
            {"token_counts", result.token_counts},
            {"token_cost", result.token_cost},
            {"decisions", std::move(decisions)},
            {"correct", std::move(correct)}};
}

RunResult run_result_from_json(const json& j) {
    RunResult r;
    r.task_id = j.at("task_id").get<std::string>();
    r.trial = j.at("trial").get<int>();
    if (j.contains("attacked"))
        for (const auto& a : j.at("attacked")) r.attacked.insert(a.get<int>());
    for (const auto& row : j.at("answers")) {
        std::vector<NormalizedAnswer> answers;
        for (const auto& a : row) answers.push_back(answer_from_json(a));
        r.answers.push_back(std::move(answers));
    }
    r.token_counts = j.at("token_counts").get<std::vector<std::vector<std::size_t>>>();
    r.token_cost = j.at("token_cost").get<std::size_t>();
    for (const auto& [key, value] : j.at("decisions").items()) {
        const auto mechanism = mechanism_from_string(key);
        if (!mechanism) throw CorpusError("unknown mechanism in results file: " + key);
        r.decisions[*mechanism] =
            value.is_null() ? std::optional<Decision>{} : decision_from_json(value);
    }
    for (const auto& [key, value] : j.at("correct").items()) {
        const auto mechanism = mechanism_from_string(key);
        if (!mechanism) throw CorpusError("unknown mechanism in results file: " + key);
        r.correct[*mechanism] = value.get<bool>();
    }
    return r;
}

std::string summary_csv(const ExperimentSummary& summary) {
    std::string csv =
        "mechanism,accuracy,mean_token_cost,n_agents,n_rounds,mode,attack_fraction,tie_rate\n";
    for (const SummaryRow& row : summary.rows) {
        csv += to_string(row.mechanism);
        csv += ',' + format_double(row.accuracy);
        csv += ',' + format_double(row.mean_token_cost);
        csv += ',' + std::to_string(summary.n_agents);
        csv += ',' + std::to_string(summary.n_rounds);
        csv += ',';
        csv += to_string(summary.mode);
        csv += ',';
        csv += summary.attack_fraction ? format_double(*summary.attack_fraction) : "";
        csv += ',' + format_double(row.tie_rate);
        csv += '\n';
    }
    return csv;
}

void write_report(const ExperimentSpec& spec, const std::vector<RunResult>& results,
                  const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);

    json spec_echo = {{"n_agents", spec.config.n_agents},
                      {"n_rounds", spec.config.n_rounds},
                      {"mode", to_string(spec.config.mode)},
                      {"seed", spec.config.seed},
                      {"trials", spec.trials}};
    if (spec.attack_fraction) spec_echo["attack_fraction"] = *spec.attack_fraction;
    json mechanisms = json::array();
    for (const Mechanism m : spec.mechanisms) mechanisms.push_back(to_string(m));
    spec_echo["mechanisms"] = std::move(mechanisms);

    json results_json = json::array();
    for (const RunResult& r : results) results_json.push_back(run_result_to_json(r));

    const ExperimentSummary summary = summarize(spec, results);
    json summary_json = json::array();
    for (const SummaryRow& row : summary.rows) {
        summary_json.push_back({{"mechanism", to_string(row.mechanism)},
                                {"accuracy", row.accuracy},
                                {"mean_token_cost", row.mean_token_cost},
                                {"tie_rate", row.tie_rate}});
    }

    const json doc = {{"spec", std::move(spec_echo)},
                      {"summary", std::move(summary_json)},
                      {"results", std::move(results_json)}};
    write_text_file(out_dir / "results.json", doc.dump(2) + "\n");
    write_text_file(out_dir / "summary.csv", summary_csv(summary));
}

std::vector<RunResult> load_results(const std::filesystem::path& results_json) {
    std::ifstream in(results_json);
    if (!in) throw CorpusError("results not readable: " + results_json.string());
    const json j = json::parse(in, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded() || !j.contains("results"))
        throw CorpusError("results file is malformed: " + results_json.string());
    std::vector<RunResult> out;
    for (const auto& r : j.at("results")) out.push_back(run_result_from_json(r));
    return out;
}

}  // namespace madlab
