#pragma once

// Small synthetic inputs shared by the unit tests.

#include <vector>

#include "qpass/events.hpp"
#include "qpass/synth.hpp"

namespace qpass::testing {

inline std::vector<MatchEventLog> augmented(const std::vector<MatchEventLog>& logs) {
    std::vector<MatchEventLog> out;
    out.reserve(logs.size());
    for (const auto& m : logs) out.push_back(augment(m));
    return out;
}

/// Two-team league with `possessions` per match, augmented.
inline std::vector<MatchEventLog> small_league(std::size_t possessions = 400, std::uint64_t seed = 42,
                                               std::size_t matches = 2) {
    SyntheticLeagueSpec spec;
    spec.teams = 2;
    spec.matches_per_pairing = matches;
    spec.possessions_per_match = possessions;
    spec.seed = seed;
    return augmented(generate_synthetic_league(spec).matches);
}

}  // namespace qpass::testing
