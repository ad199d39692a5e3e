#pragma once

#include <memory>
#include <vector>

#include "madlab/backend.hpp"
#include "madlab/rng.hpp"

namespace madlab {

/// Peer-alignment score in [0,1]: the fraction of visible peer responses
/// whose normalized answer equals r. Empty peer sets score 0 for every r.
double conformity_score(const NormalizedAnswer& r, const Context& ctx, TaskKind kind);

// Probabilistic agent: samples from p_in(r) * exp(beta * conformity(r)) / Z.
// beta > 0 tilts toward peer-aligned answers, beta < 0 away from them.
class SyntheticAgent : public AgentBackend {
public:
    SyntheticAgent(SyntheticSpec spec, DebateMode mode);  // throws DegenerateModel / ConfigError

    Response respond(const PromptBundle& prompt, const AgentCall& call) const override;
    const char* kind() const override { return "synthetic"; }

    // Normalized sampling distribution for a given context; exposed so tests
    // can check it against the closed form.
    std::vector<double> distribution(const Context& ctx, TaskKind task_kind,
                                     DebateMode mode) const;

    double beta() const { return beta_; }
    const std::vector<std::string>& answer_space() const { return spec_.answer_space; }

private:
    SyntheticSpec spec_;
    double beta_;
};

// Samples one answer from the tilted distribution.
NormalizedAnswer synthetic_sample(const SyntheticAgent& agent, const Context& ctx,
                                  TaskKind task_kind, DebateMode mode, SplitMix64& rng);

// Deterministic test double driven by a per-round rule table.
class ScriptedAgent : public AgentBackend {
public:
    explicit ScriptedAgent(ScriptedSpec spec) : spec_(std::move(spec)) {}

    Response respond(const PromptBundle& prompt, const AgentCall& call) const override;
    const char* kind() const override { return "scripted"; }

private:
    ScriptedSpec spec_;
};

/// Evaluate one script step. Fixed returns the scripted answer verbatim.
/// CopyPlurality adopts the most common answer among the agent's own previous
/// answer and all visible peers (lexicographic tie-break); with no visible
/// peers it repeats its own. Hold always repeats the agent's own previous
/// answer. Throws ScriptExhausted when round is past the script.
Response scripted_respond(const ScriptedSpec& script, const Context& ctx, int round,
                          TaskKind kind);

// Instantiate the backend a spec describes; one per agent.
std::shared_ptr<AgentBackend> make_backend(const BackendSpec& spec, DebateMode mode);
std::vector<std::shared_ptr<AgentBackend>> make_backends(const DebateConfig& cfg);

}  // namespace madlab
