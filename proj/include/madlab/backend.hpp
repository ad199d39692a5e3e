#pragma once

#include <cstdint>
#include <string>

#include "madlab/context.hpp"
#include "madlab/prompt.hpp"
#include "madlab/types.hpp"

namespace madlab {

// Per-invocation metadata handed to a backend alongside the rendered prompt.
// seed is a derived stream unique to (config seed, agent, round), so backends
// stay pure functions and concurrent rounds remain deterministic.
struct AgentCall {
    int agent_index = 0;
    int round = 0;
    std::uint64_t seed = 0;
    const Task* task = nullptr;
    const Context* context = nullptr;
};

class AgentBackend {
public:
    virtual ~AgentBackend() = default;

    // Must be safe to invoke from concurrent workers.
    virtual Response respond(const PromptBundle& prompt, const AgentCall& call) const = 0;

    virtual const char* kind() const = 0;
    virtual std::string identity() const { return kind(); }
};

}  // namespace madlab
