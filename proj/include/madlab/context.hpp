#pragma once

#include <string>
#include <vector>

#include "madlab/types.hpp"

namespace madlab {

struct PeerResponse {
    int agent_index = 0;
    int round = 0;
    std::string raw_text;
};

// What one agent sees when producing its round-k response. Attacked agents
// and round 0 see no peers; own_history always carries the agent's prior raws.
struct Context {
    int owner = 0;
    int round = 0;
    std::vector<PeerResponse> peer_responses;
    std::vector<std::string> own_history;
};

/// Assemble agent i's context for round k from the completed rounds < k.
/// Attacked owners get an empty peer list while their own outputs stay
/// visible to everyone else. previous_round takes only round k-1; full_history
/// takes rounds 0..k-1, ordered by (round, agent). Throws IncompleteRound if
/// any needed cell is missing. round 0 yields the empty context.
Context build_context(const Transcript& transcript, int agent, int round,
                      const DebateConfig& cfg);

}  // namespace madlab
