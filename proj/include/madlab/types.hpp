#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "madlab/answer.hpp"

namespace madlab {

// One agent utterance. token_count is the backend-reported output token count
// (>= 1 whenever raw_text is nonempty; 0 only for a missing/failed response).
struct Response {
    std::string raw_text;
    NormalizedAnswer answer;
    std::size_t token_count = 0;
    int agent_index = 0;  // 1-based
    int round = 0;        // 0-based; round 0 is generated without peer context
    bool token_count_estimated = false;
};

// Whitespace-separated unit count; the fallback when a backend reports no usage.
std::size_t estimate_tokens(std::string_view text);

// Dense N x (R+1) answer matrix including the context-free round 0.
// Each cell is populated exactly once before any decision runs.
class Transcript {
public:
    Transcript(int n_agents, int n_rounds);

    int n_agents() const { return n_agents_; }
    int n_rounds() const { return n_rounds_; }

    void set(Response response);                        // throws on bad index or double fill
    const Response& cell(int agent, int round) const;   // agent in 1..N, round in 0..R
    bool filled(int agent, int round) const;
    bool complete() const;
    bool round_complete(int round) const;

private:
    std::size_t index(int agent, int round) const;

    int n_agents_;
    int n_rounds_;
    std::vector<Response> cells_;
    std::vector<char> filled_;
};

// Score deltas for the four branches of the decision rule.
struct Weights {
    double initial_credit = 20.0;    // w1
    double transfer_penalty = 25.0;  // w2
    double transfer_credit = 30.0;   // w3
    double maintain_credit = 20.0;   // w4
};

enum class DebateMode { Conformity, AntiConformity };
enum class ContextWindow { PreviousRound, FullHistory };

const char* to_string(DebateMode mode);
const char* to_string(ContextWindow window);
std::optional<DebateMode> debate_mode_from_string(std::string_view s);
std::optional<ContextWindow> context_window_from_string(std::string_view s);

// --- backend descriptors (realized by the agents module) ---

struct ScriptStepSpec {
    enum class Rule { Fixed, CopyPlurality, Hold };
    Rule rule = Rule::Fixed;
    NormalizedAnswer answer;                  // Fixed only; None = scripted unparseable reply
    std::optional<std::size_t> token_count;   // declared count; absent = estimate
};

struct ScriptedSpec {
    std::vector<ScriptStepSpec> steps;  // one per round; shorter scripts exhaust
};

struct SyntheticSpec {
    std::vector<std::string> answer_space;              // canonical tokens
    std::vector<double> p_in;                           // independent reasoning distribution
    std::optional<double> beta;                         // absent = mode default (+1.5 / -1.5)
    std::optional<std::vector<double>> p_in_anti_conformity;  // optional per-mode override
    std::uint64_t model_seed = 0;
};

struct LlmHttpSpec {
    std::string endpoint;  // e.g. http://127.0.0.1:8080
    std::string model;
    std::string path = "/v1/chat/completions";
    std::string api_key_env = "MADLAB_API_KEY";
    int timeout_s = 60;
    int max_retries = 2;
    int backoff_ms = 250;
};

struct BackendSpec {
    std::variant<ScriptedSpec, SyntheticSpec, LlmHttpSpec> impl = SyntheticSpec{};

    const char* kind() const;
};

struct DebateConfig {
    int n_agents = 1;
    int n_rounds = 0;
    DebateMode mode = DebateMode::Conformity;
    Weights weights;
    std::set<int> attacked;  // compromised agents V; empty = clean run
    std::uint64_t seed = 0;
    ContextWindow context_window = ContextWindow::PreviousRound;
    std::vector<BackendSpec> backends;  // one entry shared by all agents, or one per agent
};

// Returns every violated invariant; empty = valid. Never mutates cfg.
std::vector<std::string> validate_config(const DebateConfig& cfg);

struct Task {
    std::string id;
    std::string question;
    NormalizedAnswer ground_truth;  // present (non-None) for every loaded task
    TaskKind kind = TaskKind::FreeText;
};

}  // namespace madlab
