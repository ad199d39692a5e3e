#pragma once

#include <map>
#include <vector>

#include "madlab/rng.hpp"
#include "madlab/scoreboard.hpp"
#include "madlab/types.hpp"

namespace madlab {

enum class Mechanism { Score, MajorityFinalRound };

const char* to_string(Mechanism mechanism);
std::optional<Mechanism> mechanism_from_string(std::string_view s);

struct Decision {
    NormalizedAnswer final_answer;               // always a member of max_set
    std::map<NormalizedAnswer, double> scores;   // finalized snapshot (None stripped)
    std::vector<NormalizedAnswer> max_set;       // top scorers, ascending order
    bool tie_broken = false;                     // true iff |max_set| > 1
    Mechanism mechanism = Mechanism::Score;
    std::uint64_t seed = 0;                      // seed of the tie-break stream

    friend bool operator==(const Decision&, const Decision&) = default;
};

/// Score-based decision over the full N x (R+1) trajectory: accumulate,
/// strip None, take the argmax set, break ties uniformly at random over the
/// lexicographically sorted set. Throws AllAnswersNone when nothing remains.
Decision score_decide(const Transcript& transcript, const Weights& weights, SplitMix64& rng);

// Same, but also hands back the accumulated board so callers can audit the log.
Decision score_decide(const Transcript& transcript, const Weights& weights, SplitMix64& rng,
                      ScoreBoard& board_out);

/// Baseline: plurality over the final round only (None excluded), ties broken
/// uniformly at random. Decision.scores holds the vote counts.
Decision majority_final_round(const Transcript& transcript, SplitMix64& rng);

Decision decide(Mechanism mechanism, const Transcript& transcript, const Weights& weights,
                SplitMix64& rng);

}  // namespace madlab
