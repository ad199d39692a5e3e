#include "madlab/context.hpp"

#include "madlab/errors.hpp"

namespace madlab {

Context build_context(const Transcript& transcript, int agent, int round,
                      const DebateConfig& cfg) {
    Context ctx;
    ctx.owner = agent;
    ctx.round = round;
    if (round == 0) return ctx;

    for (int k = 0; k < round; ++k) {
        if (!transcript.round_complete(k))
            throw IncompleteRound("round " + std::to_string(k) +
                                  " is incomplete; cannot assemble round " +
                                  std::to_string(round) + " context");
    }

    for (int k = 0; k < round; ++k) ctx.own_history.push_back(transcript.cell(agent, k).raw_text);

    // Compromised owners receive nothing; their own outputs stay visible to peers.
    if (cfg.attacked.count(agent) != 0) return ctx;

    const int from = cfg.context_window == ContextWindow::PreviousRound ? round - 1 : 0;
    for (int k = from; k < round; ++k) {
        for (int j = 1; j <= transcript.n_agents(); ++j) {
            if (j == agent) continue;
            ctx.peer_responses.push_back({j, k, transcript.cell(j, k).raw_text});
        }
    }
    return ctx;
}

}  // namespace madlab
