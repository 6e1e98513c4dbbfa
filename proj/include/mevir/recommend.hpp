#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mevir/types.hpp"

namespace mevir {

inline constexpr std::size_t kDefaultRecommendK = 3;
inline constexpr double kDefaultMinReputation = 0.5;

/// Diverse, credible authorities for `topic`. Candidates are sources expert in
/// the topic with reputation >= min_reputation. The most reputable comes first;
/// each later pick maximizes its minimum leaning distance to the picks so far
/// (ties: reputation desc, id asc). At most k ids; empty when no candidate.
std::vector<std::string> recommend_authorities(const std::string& topic, const SourceTable& sources, std::size_t k,
                                               double min_reputation);

}  // namespace mevir
