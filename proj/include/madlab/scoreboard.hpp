#pragma once

#include <map>
#include <optional>
#include <vector>

#include "madlab/types.hpp"

namespace madlab {

// Round correction factor f = 1/(k+1); downweights later-round opinion shifts.
double round_factor(int round);

enum class ScoreBranch { Initial, TransferOut, TransferIn, Maintain };

const char* to_string(ScoreBranch branch);

struct ScoreUpdate {
    int agent = 0;
    int round = 0;
    ScoreBranch branch = ScoreBranch::Initial;
    NormalizedAnswer key;  // the score entry the delta applied to
    double delta = 0.0;
};

/// Score dictionary S plus its complete update log. None participates as an
/// ordinary key during accumulation and is stripped only at finalization;
/// replaying the log reproduces the score map exactly.
class ScoreBoard {
public:
    const std::map<NormalizedAnswer, double>& scores() const { return scores_; }
    const std::vector<ScoreUpdate>& update_log() const { return log_; }

    // One agent observation. prev is absent exactly at round 0.
    //   round 0:                scores[answer] += w1 * f(0)
    //   changed answer:         scores[prev] -= w2 * f(k) if prev is a key,
    //                           then scores[answer] += w3 * f(k)
    //   maintained answer:      scores[answer] += w4 * f(k)
    void observe(const NormalizedAnswer& answer, const std::optional<NormalizedAnswer>& prev,
                 int round, const Weights& w, int agent = 0);

    // Removes the None key (the post-accumulation cleanup step).
    void strip_none();

private:
    void apply(int agent, int round, ScoreBranch branch, const NormalizedAnswer& key,
               double delta);

    std::map<NormalizedAnswer, double> scores_;
    std::vector<ScoreUpdate> log_;
};

// Full-trajectory accumulation: rounds outer, agents inner by ascending index.
// The order never changes the totals but fixes the update log for audit.
ScoreBoard accumulate_scores(const Transcript& transcript, const Weights& weights);

}  // namespace madlab
