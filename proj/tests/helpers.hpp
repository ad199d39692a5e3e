// Shared test fixtures: grid <-> transcript conversion and random grids.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "madlab/rng.hpp"
#include "madlab/types.hpp"
#include "oracle.hpp"

namespace testutil {

using Grid = oracle::Grid;  // [agent][round] of optional<string>

// Build a transcript directly from normalized answers; raw text and token
// counts are synthesized (None cells become empty failed cells).
inline madlab::Transcript transcript_from_grid(
    const Grid& grid, const std::vector<std::vector<std::size_t>>* tokens = nullptr) {
    const int n = static_cast<int>(grid.size());
    const int cols = static_cast<int>(grid.at(0).size());
    madlab::Transcript t(n, cols - 1);
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < cols; ++k) {
            madlab::Response r;
            r.agent_index = i + 1;
            r.round = k;
            const auto& ans = grid[i][k];
            if (ans.has_value()) {
                r.raw_text = "My answer is \\boxed{" + *ans + "}.";
                r.answer = madlab::NormalizedAnswer(*ans);
                r.token_count = 1;
            }
            if (tokens != nullptr) r.token_count = (*tokens)[i][k];
            t.set(std::move(r));
        }
    }
    return t;
}

// Random grid over a small alphabet with a None rate, for oracle fuzzing.
inline Grid random_grid(madlab::SplitMix64& rng, int max_agents = 5, int max_rounds = 4,
                        int alphabet = 4, double none_rate = 0.1) {
    const int n = 1 + static_cast<int>(rng.below(max_agents));
    const int r = static_cast<int>(rng.below(max_rounds + 1));
    Grid grid(n, std::vector<std::optional<std::string>>(r + 1));
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k <= r; ++k) {
            if (rng.uniform01() < none_rate) continue;  // stays None
            grid[i][k] = std::string(1, static_cast<char>('A' + rng.below(alphabet)));
        }
    }
    return grid;
}

inline std::optional<std::string> to_opt(const madlab::NormalizedAnswer& a) {
    if (a.is_none()) return std::nullopt;
    return a.value();
}

}  // namespace testutil
