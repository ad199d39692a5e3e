#pragma once

#include <string>

#include "madlab/context.hpp"
#include "madlab/types.hpp"

namespace madlab {

struct PromptBundle {
    DebateMode mode = DebateMode::Conformity;
    std::string system_text;
    std::string user_text;
};

namespace prompt_text {
// Peer-context prefix used by both modes from round 1 on.
extern const char* const kPeerPrefix;
// The five-section critical-reasoning scaffold appended in anti-conformity mode.
extern const char* const kAntiConformityScaffold;
}  // namespace prompt_text

// Answer-format sentence, parameterized by task kind so every reply ends in a
// form normalize_answer can extract.
std::string answer_format_instruction(TaskKind kind);

/// Render the prompt for one agent call. Round 0 is question-only (identical
/// across modes). From round 1, conformity prepends the enumerated peer
/// responses and an update instruction; anti-conformity additionally embeds
/// the critical-reasoning scaffold. Peer-less contexts (attacked agents) fall
/// back to a re-examine prompt over the agent's own previous answer.
PromptBundle render_prompt(const Context& ctx, const Task& task, DebateMode mode);

}  // namespace madlab
