#include "madlab/debate.hpp"

#include <algorithm>
#include <string>
#include <string_view>

#include "madlab/context.hpp"
#include "madlab/errors.hpp"
#include "madlab/prompt.hpp"
#include "madlab/rng.hpp"

namespace madlab {

Transcript run_debate(const DebateConfig& cfg, const Task& task,
                      const std::vector<std::shared_ptr<AgentBackend>>& agents) {
    const auto errors = validate_config(cfg);
    if (!errors.empty()) {
        std::string joined;
        for (const auto& e : errors) joined += (joined.empty() ? "" : "; ") + e;
        throw ConfigError(joined);
    }
    if (static_cast<int>(agents.size()) != cfg.n_agents)
        throw ConfigError("expected " + std::to_string(cfg.n_agents) + " backends, got " +
                          std::to_string(agents.size()));

    const int n = cfg.n_agents;
    Transcript transcript(cfg.n_agents, cfg.n_rounds);

    // Fan out the per-round calls only when they block on I/O; for local
    // backends the fork/join overhead dwarfs the call itself.
    bool parallel_round = false;
    for (const auto& agent : agents)
        if (std::string_view(agent->kind()) == "llm_http") parallel_round = true;

    for (int k = 0; k <= cfg.n_rounds; ++k) {
        // Round barrier: every context below conditions only on rounds < k.
        std::vector<Context> contexts(n);
        std::vector<PromptBundle> bundles(n);
        for (int idx = 0; idx < n; ++idx) {
            contexts[idx] = build_context(transcript, idx + 1, k, cfg);
            bundles[idx] = render_prompt(contexts[idx], task, cfg.mode);
        }

        std::vector<Response> collected(n);
        // Backend calls within a round may run concurrently; exceptions become
        // failed cells here and never leave the loop.
        #pragma omp parallel for schedule(dynamic) if (parallel_round)
        for (int idx = 0; idx < n; ++idx) {
            const int agent = idx + 1;
            AgentCall call;
            call.agent_index = agent;
            call.round = k;
            call.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(agent),
                                    static_cast<std::uint64_t>(k));
            call.task = &task;
            call.context = &contexts[idx];
            try {
                collected[idx] = agents[idx]->respond(bundles[idx], call);
            } catch (const std::exception&) {
                collected[idx] = Response{};  // failed cell: empty raw, None answer
            }
        }

        for (int idx = 0; idx < n; ++idx) {
            Response r = std::move(collected[idx]);
            r.agent_index = idx + 1;
            r.round = k;
            r.answer = normalize_answer(r.raw_text, task.kind);
            if (!r.raw_text.empty() && r.token_count == 0) {
                r.token_count = std::max<std::size_t>(1, estimate_tokens(r.raw_text));
                r.token_count_estimated = true;
            }
            transcript.set(std::move(r));
        }
    }
    return transcript;
}

}  // namespace madlab
