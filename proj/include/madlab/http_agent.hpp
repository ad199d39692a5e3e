#pragma once

#include "madlab/backend.hpp"

namespace madlab {

/// One chat-completion request against an OpenAI-compatible endpoint.
/// Sends {model, messages:[system, user]} (temperature omitted so the
/// provider default applies), retries HTTP/transport failures with
/// exponential backoff up to spec.max_retries, and falls back to a
/// whitespace-token estimate when the usage field is missing.
/// Throws TimeoutError / HttpError / MalformedResponse once retries are spent.
Response llm_respond(const LlmHttpSpec& spec, const PromptBundle& prompt, TaskKind kind);

class LlmHttpAgent : public AgentBackend {
public:
    explicit LlmHttpAgent(LlmHttpSpec spec) : spec_(std::move(spec)) {}

    Response respond(const PromptBundle& prompt, const AgentCall& call) const override;
    const char* kind() const override { return "llm_http"; }
    std::string identity() const override { return spec_.model; }

    const LlmHttpSpec& spec() const { return spec_; }

private:
    LlmHttpSpec spec_;
};

}  // namespace madlab
