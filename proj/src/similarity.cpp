#include "optforge/similarity.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>

namespace optforge {

namespace {

class BlockMatcher {
public:
    BlockMatcher(std::string_view a, std::string_view b)
        : a_(a), b_(b), run_length_{std::vector<Cell>(b.size()), std::vector<Cell>(b.size())}
    {
        for (std::size_t j = 0; j < b.size(); ++j)
            positions_[static_cast<unsigned char>(b[j])].push_back(j);
    }

    /// Longest block with a_lo <= i < a_hi, b_lo <= j < b_hi; ties resolve to
    /// the smallest i, then the smallest j.
    MatchingBlock longest(std::size_t a_lo, std::size_t a_hi, std::size_t b_lo, std::size_t b_hi)
    {
        MatchingBlock best{a_lo, b_lo, 0};
        // Rows of earlier calls must never be read as the previous row.
        row_ += 2;
        for (std::size_t i = a_lo; i < a_hi; ++i) {
            ++row_;
            auto& current = run_length_[row_ & 1];
            const auto& previous = run_length_[(row_ - 1) & 1];
            const auto& candidates = positions_[static_cast<unsigned char>(a_[i])];
            auto it = std::lower_bound(candidates.begin(), candidates.end(), b_lo);
            for (; it != candidates.end() && *it < b_hi; ++it) {
                std::size_t j = *it;
                std::size_t k = 1;
                if (j > b_lo && previous[j - 1].row == row_ - 1)
                    k = previous[j - 1].length + 1;
                current[j] = Cell{row_, k};
                if (k > best.size)
                    best = MatchingBlock{i + 1 - k, j + 1 - k, k};
            }
        }
        return best;
    }

private:
    struct Cell {
        std::uint64_t row = 0;
        std::size_t length = 0;
    };

    std::string_view a_;
    std::string_view b_;
    std::array<std::vector<std::size_t>, 256> positions_;
    std::array<std::vector<Cell>, 2> run_length_;
    std::uint64_t row_ = 0;
};

void check_size(std::string_view text)
{
    if (text.size() > kMaxSimilarityInput)
        throw SimilarityInputTooLarge("similarity input of " + std::to_string(text.size()) +
                                      " characters exceeds the limit of " +
                                      std::to_string(kMaxSimilarityInput));
}

} // namespace

std::vector<MatchingBlock> matching_blocks(std::string_view a, std::string_view b)
{
    check_size(a);
    check_size(b);

    BlockMatcher matcher(a, b);
    std::vector<MatchingBlock> blocks;
    struct Range {
        std::size_t a_lo, a_hi, b_lo, b_hi;
    };
    std::vector<Range> pending{{0, a.size(), 0, b.size()}};
    while (!pending.empty()) {
        Range r = pending.back();
        pending.pop_back();
        MatchingBlock block = matcher.longest(r.a_lo, r.a_hi, r.b_lo, r.b_hi);
        if (block.size == 0)
            continue;
        blocks.push_back(block);
        if (r.a_lo < block.a && r.b_lo < block.b)
            pending.push_back({r.a_lo, block.a, r.b_lo, block.b});
        if (block.a + block.size < r.a_hi && block.b + block.size < r.b_hi)
            pending.push_back({block.a + block.size, r.a_hi, block.b + block.size, r.b_hi});
    }
    std::sort(blocks.begin(), blocks.end(),
              [](const MatchingBlock& x, const MatchingBlock& y) { return x.a < y.a; });
    return blocks;
}

double ratio(std::string_view a, std::string_view b)
{
    const std::size_t total = a.size() + b.size();
    if (total == 0) {
        check_size(a);
        return 1.0;
    }
    std::size_t matched = 0;
    for (const auto& block : matching_blocks(a, b))
        matched += block.size;
    return 2.0 * static_cast<double>(matched) / static_cast<double>(total);
}

bool passes_threshold(std::string_view a, std::string_view b, double threshold)
{
    if (threshold < 0.0 || threshold > 1.0)
        throw Error("similarity threshold must lie in [0, 1]");
    return ratio(a, b) >= threshold;
}

} // namespace optforge
