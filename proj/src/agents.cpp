#include "madlab/agents.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "madlab/errors.hpp"
#include "madlab/http_agent.hpp"

namespace madlab {

namespace {

constexpr double kDefaultConformityBeta = 1.5;
constexpr double kDefaultAntiConformityBeta = -1.5;

std::string templated_raw(const NormalizedAnswer& answer) {
    if (answer.is_none()) return "I cannot decide.";
    return "My answer is \\boxed{" + answer.value() + "} because that is where my reasoning "
           "lands this round.";
}

void check_distribution(const std::vector<double>& p, std::size_t space_size,
                        const char* label) {
    if (p.size() != space_size)
        throw ConfigError(std::string(label) + " must match answer_space size");
    double sum = 0.0;
    bool any_mass = false;
    for (const double v : p) {
        if (!std::isfinite(v) || v < 0.0)
            throw ConfigError(std::string(label) + " entries must be finite and >= 0");
        if (v > 0.0) any_mass = true;
        sum += v;
    }
    if (!any_mass) throw DegenerateModel(std::string(label) + " has no probability mass");
    if (std::abs(sum - 1.0) > 1e-12)
        throw ConfigError(std::string(label) + " must sum to 1");
}

// Most common answer among the agent's own previous answer and all visible
// peers; ties go to the lexicographically smallest. None answers do not vote.
NormalizedAnswer plurality_with_self(const NormalizedAnswer& own, const Context& ctx,
                                     TaskKind kind) {
    std::map<NormalizedAnswer, int> counts;
    if (!own.is_none()) counts[own] += 1;
    for (const PeerResponse& peer : ctx.peer_responses) {
        const NormalizedAnswer a = normalize_answer(peer.raw_text, kind);
        if (!a.is_none()) counts[a] += 1;
    }
    if (counts.empty()) return own;
    int best = 0;
    for (const auto& [answer, c] : counts) best = std::max(best, c);
    for (const auto& [answer, c] : counts)
        if (c == best) return answer;  // map order: smallest key first
    return own;
}

NormalizedAnswer own_previous(const Context& ctx, TaskKind kind, int round) {
    if (ctx.own_history.empty())
        throw ScriptExhausted("script rule needs a previous answer at round " +
                              std::to_string(round));
    return normalize_answer(ctx.own_history.back(), kind);
}

}  // namespace

double conformity_score(const NormalizedAnswer& r, const Context& ctx, TaskKind kind) {
    if (ctx.peer_responses.empty()) return 0.0;
    std::size_t matches = 0;
    for (const PeerResponse& peer : ctx.peer_responses)
        if (normalize_answer(peer.raw_text, kind) == r) ++matches;
    return static_cast<double>(matches) / static_cast<double>(ctx.peer_responses.size());
}

SyntheticAgent::SyntheticAgent(SyntheticSpec spec, DebateMode mode) : spec_(std::move(spec)) {
    if (spec_.answer_space.empty()) throw ConfigError("synthetic answer_space is empty");
    check_distribution(spec_.p_in, spec_.answer_space.size(), "p_in");
    if (spec_.p_in_anti_conformity)
        check_distribution(*spec_.p_in_anti_conformity, spec_.answer_space.size(),
                           "p_in_anti_conformity");
    beta_ = spec_.beta.value_or(mode == DebateMode::Conformity ? kDefaultConformityBeta
                                                               : kDefaultAntiConformityBeta);
    if (!std::isfinite(beta_)) throw ConfigError("beta must be finite");
}

std::vector<double> SyntheticAgent::distribution(const Context& ctx, TaskKind task_kind,
                                                 DebateMode mode) const {
    const std::vector<double>& p_in =
        (mode == DebateMode::AntiConformity && spec_.p_in_anti_conformity)
            ? *spec_.p_in_anti_conformity
            : spec_.p_in;

    // Normalize each peer once, then count matches per candidate; identical to
    // calling conformity_score per candidate, without re-parsing the raws.
    std::vector<std::size_t> matches(spec_.answer_space.size(), 0);
    for (const PeerResponse& peer : ctx.peer_responses) {
        const NormalizedAnswer a = normalize_answer(peer.raw_text, task_kind);
        if (a.is_none()) continue;
        for (std::size_t i = 0; i < spec_.answer_space.size(); ++i) {
            if (a.value() == spec_.answer_space[i]) {
                ++matches[i];
                break;
            }
        }
    }
    const double peer_count =
        ctx.peer_responses.empty() ? 1.0 : static_cast<double>(ctx.peer_responses.size());

    std::vector<double> masses(spec_.answer_space.size());
    double z = 0.0;
    for (std::size_t i = 0; i < masses.size(); ++i) {
        const double align = static_cast<double>(matches[i]) / peer_count;
        masses[i] = p_in[i] * std::exp(beta_ * align);
        z += masses[i];
    }
    if (!(z > 0.0) || !std::isfinite(z))
        throw DegenerateModel("tilted distribution has no finite mass");
    for (double& m : masses) m /= z;
    return masses;
}

Response SyntheticAgent::respond(const PromptBundle& prompt, const AgentCall& call) const {
    SplitMix64 rng(derive_seed(call.seed, spec_.model_seed));
    const NormalizedAnswer answer =
        synthetic_sample(*this, *call.context, call.task->kind, prompt.mode, rng);

    Response out;
    out.raw_text = templated_raw(answer);
    out.answer = answer;
    out.token_count = estimate_tokens(out.raw_text);
    out.agent_index = call.agent_index;
    out.round = call.round;
    return out;
}

NormalizedAnswer synthetic_sample(const SyntheticAgent& agent, const Context& ctx,
                                  TaskKind task_kind, DebateMode mode, SplitMix64& rng) {
    const std::vector<double> probs = agent.distribution(ctx, task_kind, mode);
    const double u = rng.uniform01();
    double cumulative = 0.0;
    std::size_t pick = probs.size() - 1;  // guard against fp slack at the top end
    for (std::size_t i = 0; i < probs.size(); ++i) {
        cumulative += probs[i];
        if (u < cumulative) {
            pick = i;
            break;
        }
    }
    return NormalizedAnswer(agent.answer_space()[pick]);
}

Response scripted_respond(const ScriptedSpec& script, const Context& ctx, int round,
                          TaskKind kind) {
    if (round < 0 || static_cast<std::size_t>(round) >= script.steps.size())
        throw ScriptExhausted("script has no step for round " + std::to_string(round));
    const ScriptStepSpec& step = script.steps[round];

    NormalizedAnswer answer;
    switch (step.rule) {
        case ScriptStepSpec::Rule::Fixed:
            answer = step.answer;
            break;
        case ScriptStepSpec::Rule::CopyPlurality:
            answer = plurality_with_self(own_previous(ctx, kind, round), ctx, kind);
            break;
        case ScriptStepSpec::Rule::Hold:
            answer = own_previous(ctx, kind, round);
            break;
    }

    Response out;
    out.raw_text = templated_raw(answer);
    out.answer = answer;
    out.token_count = step.token_count.value_or(estimate_tokens(out.raw_text));
    out.round = round;
    return out;
}

Response ScriptedAgent::respond(const PromptBundle&, const AgentCall& call) const {
    Response out = scripted_respond(spec_, *call.context, call.round, call.task->kind);
    out.agent_index = call.agent_index;
    return out;
}

std::shared_ptr<AgentBackend> make_backend(const BackendSpec& spec, DebateMode mode) {
    if (const auto* scripted = std::get_if<ScriptedSpec>(&spec.impl))
        return std::make_shared<ScriptedAgent>(*scripted);
    if (const auto* synthetic = std::get_if<SyntheticSpec>(&spec.impl))
        return std::make_shared<SyntheticAgent>(*synthetic, mode);
    return std::make_shared<LlmHttpAgent>(std::get<LlmHttpSpec>(spec.impl));
}

std::vector<std::shared_ptr<AgentBackend>> make_backends(const DebateConfig& cfg) {
    if (cfg.backends.empty())
        throw ConfigError("config names no backends; cannot run a debate");
    std::vector<std::shared_ptr<AgentBackend>> out;
    out.reserve(cfg.n_agents);
    for (int i = 0; i < cfg.n_agents; ++i) {
        const BackendSpec& spec =
            cfg.backends.size() == 1 ? cfg.backends[0] : cfg.backends[static_cast<std::size_t>(i)];
        out.push_back(make_backend(spec, cfg.mode));
    }
    return out;
}

}  // namespace madlab
