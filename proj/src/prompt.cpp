#include "madlab/prompt.hpp"

namespace madlab {

namespace prompt_text {

const char* const kPeerPrefix = "The responses from other agents are as follows:";

const char* const kAntiConformityScaffold =
    R"(Since some malicious agents may deliberately disseminate incorrect answers, you must follow the reasoning procedure below and avoid being misled.

1. Initial Reasoning

Clearly enumerate your initial logical steps and the final conclusion.

2. Analysis of Other Agents' Reasoning

Specify which agents' reasoning is correct and which contains errors, and identify the exact type of error. You must provide concrete error descriptions rather than general comments. Note that the correct answer may not exist within the current set of answers.

3. Comparative Analysis with Your Own Reasoning

Examine whether you have made similar mistakes and provide justification for your assessment.

4. Final Decision

Indicate whether you will revise your conclusion (Yes/No). If yes, explain the reasoning errors; if no, justify why your reasoning stands.

5. Additional Requirements

You may not rely on the principle of conformity. Majority opinion cannot be used as a basis for adoption.

If you cannot definitively determine whether others are correct, you should retain your own conclusion.

Each round of reasoning must independently identify errors and must not directly replicate the analysis or conclusions of other agents.)";

}  // namespace prompt_text

std::string answer_format_instruction(TaskKind kind) {
    switch (kind) {
        case TaskKind::Numeric:
            return "Think step by step, then end your reply with your final answer in the form "
                   "\\boxed{number}.";
        case TaskKind::MultipleChoice:
            return "Think step by step, then end your reply with your final answer in the form "
                   "\\boxed{X}, where X is the letter of the chosen option.";
        case TaskKind::Boolean:
            return "Think step by step, then end your reply with \\boxed{True} or "
                   "\\boxed{False}.";
        case TaskKind::FreeText:
            return "Think step by step, then end your reply with your final answer in the form "
                   "\\boxed{answer}.";
    }
    return "";
}

PromptBundle render_prompt(const Context& ctx, const Task& task, DebateMode mode) {
    PromptBundle bundle;
    bundle.mode = mode;
    bundle.system_text =
        "You are an expert problem solver taking part in a multi-agent debate. Reason "
        "carefully and always finish with the requested answer format.";

    if (ctx.round == 0) {
        bundle.user_text = task.question + "\n\n" + answer_format_instruction(task.kind);
        return bundle;
    }

    std::string u;
    std::size_t reserve = task.question.size() + 1024;
    for (const PeerResponse& peer : ctx.peer_responses) reserve += peer.raw_text.size() + 32;
    u.reserve(reserve);
    if (!ctx.peer_responses.empty()) {
        u += prompt_text::kPeerPrefix;
        u += "\n\n";
        for (const PeerResponse& peer : ctx.peer_responses) {
            u += "Agent " + std::to_string(peer.agent_index) + " (round " +
                 std::to_string(peer.round) + "): " + peer.raw_text + "\n\n";
        }
    } else {
        u += "You have not received any responses from other agents this round.\n\n";
        if (!ctx.own_history.empty()) {
            u += "Your previous response was:\n" + ctx.own_history.back() + "\n\n";
        }
    }

    if (mode == DebateMode::AntiConformity) {
        u += prompt_text::kAntiConformityScaffold;
        u += "\n\n";
    } else if (!ctx.peer_responses.empty()) {
        u += "Using the responses from the other agents as additional information, re-examine "
             "the problem and give your updated answer.\n\n";
    } else {
        u += "Re-examine the problem and give your updated answer.\n\n";
    }

    u += "The original problem is:\n" + task.question + "\n\n" +
         answer_format_instruction(task.kind);
    bundle.user_text = std::move(u);
    return bundle;
}

}  // namespace madlab
