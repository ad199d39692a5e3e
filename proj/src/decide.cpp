#include "madlab/decide.hpp"

#include "madlab/errors.hpp"

namespace madlab {

namespace {

// Argmax set plus uniform tie-break over the sorted set. The map iterates in
// ascending key order, so the pick depends only on (seed, sorted set).
Decision finalize(std::map<NormalizedAnswer, double> scores, Mechanism mechanism,
                  SplitMix64& rng) {
    if (scores.empty()) throw AllAnswersNone();

    double best = scores.begin()->second;
    for (const auto& [answer, score] : scores)
        if (score > best) best = score;

    Decision decision;
    decision.mechanism = mechanism;
    for (const auto& [answer, score] : scores)
        if (score == best) decision.max_set.push_back(answer);

    if (decision.max_set.size() > 1) {
        decision.tie_broken = true;
        decision.final_answer = decision.max_set[rng.below(decision.max_set.size())];
    } else {
        decision.final_answer = decision.max_set.front();
    }
    decision.scores = std::move(scores);
    return decision;
}

}  // namespace

const char* to_string(Mechanism mechanism) {
    return mechanism == Mechanism::Score ? "score" : "majority_final_round";
}

std::optional<Mechanism> mechanism_from_string(std::string_view s) {
    if (s == "score") return Mechanism::Score;
    if (s == "majority_final_round" || s == "majority") return Mechanism::MajorityFinalRound;
    return std::nullopt;
}

Decision score_decide(const Transcript& transcript, const Weights& weights, SplitMix64& rng,
                      ScoreBoard& board_out) {
    board_out = accumulate_scores(transcript, weights);
    board_out.strip_none();
    return finalize(board_out.scores(), Mechanism::Score, rng);
}

Decision score_decide(const Transcript& transcript, const Weights& weights, SplitMix64& rng) {
    ScoreBoard board;
    return score_decide(transcript, weights, rng, board);
}

Decision majority_final_round(const Transcript& transcript, SplitMix64& rng) {
    std::map<NormalizedAnswer, double> counts;
    const int last = transcript.n_rounds();
    for (int i = 1; i <= transcript.n_agents(); ++i) {
        const NormalizedAnswer& answer = transcript.cell(i, last).answer;
        if (!answer.is_none()) counts[answer] += 1.0;
    }
    return finalize(std::move(counts), Mechanism::MajorityFinalRound, rng);
}

Decision decide(Mechanism mechanism, const Transcript& transcript, const Weights& weights,
                SplitMix64& rng) {
    if (mechanism == Mechanism::Score) return score_decide(transcript, weights, rng);
    return majority_final_round(transcript, rng);
}

}  // namespace madlab
