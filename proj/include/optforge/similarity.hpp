#pragma once

#include "optforge/error.hpp"

#include <cstddef>
#include <string_view>
#include <vector>

namespace optforge {

/// Inputs longer than this are refused instead of risking quadratic blowup.
inline constexpr std::size_t kMaxSimilarityInput = 1'000'000;

class SimilarityInputTooLarge : public Error {
public:
    using Error::Error;
};

struct MatchingBlock {
    std::size_t a = 0;
    std::size_t b = 0;
    std::size_t size = 0;

    friend bool operator==(const MatchingBlock&, const MatchingBlock&) = default;
};

/// Ratcliff/Obershelp matching blocks over characters: the longest common
/// block (earliest in `a`, then earliest in `b`), then the same recursively on
/// the unmatched left and right remainders. No junk heuristic is applied.
/// Blocks are returned in increasing position order.
std::vector<MatchingBlock> matching_blocks(std::string_view a, std::string_view b);

/// 2M / (|a| + |b|) with M the total size of the matching blocks; 1.0 when
/// both inputs are empty. Callers pass (original, candidate) in that order.
double ratio(std::string_view a, std::string_view b);

bool passes_threshold(std::string_view a, std::string_view b, double threshold);

} // namespace optforge
