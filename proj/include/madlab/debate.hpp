#pragma once

#include <memory>
#include <vector>

#include "madlab/backend.hpp"
#include "madlab/types.hpp"

namespace madlab {

/// Run the full debate: round 0 from the question alone, then R synchronous
/// rounds where every response conditions only on rounds <= k-1. Within a
/// round the backend calls may run concurrently; cells are written in agent
/// order at the round barrier. A backend failure becomes an empty None-answer
/// cell and the debate continues.
Transcript run_debate(const DebateConfig& cfg, const Task& task,
                      const std::vector<std::shared_ptr<AgentBackend>>& agents);

}  // namespace madlab
