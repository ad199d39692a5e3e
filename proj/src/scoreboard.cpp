#include "madlab/scoreboard.hpp"

#include "madlab/errors.hpp"

namespace madlab {

double round_factor(int round) {
    return 1.0 / static_cast<double>(round + 1);
}

const char* to_string(ScoreBranch branch) {
    switch (branch) {
        case ScoreBranch::Initial: return "initial";
        case ScoreBranch::TransferOut: return "transfer_out";
        case ScoreBranch::TransferIn: return "transfer_in";
        case ScoreBranch::Maintain: return "maintain";
    }
    return "unknown";
}

void ScoreBoard::apply(int agent, int round, ScoreBranch branch, const NormalizedAnswer& key,
                       double delta) {
    scores_[key] += delta;  // missing keys start at 0
    log_.push_back({agent, round, branch, key, delta});
}

void ScoreBoard::observe(const NormalizedAnswer& answer,
                         const std::optional<NormalizedAnswer>& prev, int round,
                         const Weights& w, int agent) {
    const double f = round_factor(round);
    if (!prev.has_value()) {
        apply(agent, round, ScoreBranch::Initial, answer, w.initial_credit * f);
        return;
    }
    if (answer != *prev) {
        // The guard is part of the rule even though accumulation in transcript
        // order always finds prev already keyed; it matters for standalone use.
        if (scores_.count(*prev) != 0)
            apply(agent, round, ScoreBranch::TransferOut, *prev, -(w.transfer_penalty * f));
        apply(agent, round, ScoreBranch::TransferIn, answer, w.transfer_credit * f);
    } else {
        apply(agent, round, ScoreBranch::Maintain, answer, w.maintain_credit * f);
    }
}

void ScoreBoard::strip_none() {
    scores_.erase(NormalizedAnswer::none());
}

ScoreBoard accumulate_scores(const Transcript& transcript, const Weights& weights) {
    if (!transcript.complete()) throw IncompleteRound("cannot score an incomplete transcript");
    ScoreBoard board;
    for (int k = 0; k <= transcript.n_rounds(); ++k) {
        for (int i = 1; i <= transcript.n_agents(); ++i) {
            const NormalizedAnswer& answer = transcript.cell(i, k).answer;
            std::optional<NormalizedAnswer> prev;
            if (k > 0) prev = transcript.cell(i, k - 1).answer;
            board.observe(answer, prev, k, weights, i);
        }
    }
    return board;
}

}  // namespace madlab
