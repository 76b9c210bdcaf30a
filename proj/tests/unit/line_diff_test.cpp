#include "optforge/line_diff.hpp"

#include "random_pairs.hpp"

#include <doctest.h>

#include <string>

using namespace optforge;

namespace {

// Textbook LCS table; the minimal edit distance is n + m - 2 * LCS.
std::size_t lcs_distance(const std::vector<std::string_view>& a, const std::vector<std::string_view>& b)
{
    std::vector<std::vector<std::size_t>> t(a.size() + 1, std::vector<std::size_t>(b.size() + 1, 0));
    for (std::size_t i = 1; i <= a.size(); ++i)
        for (std::size_t j = 1; j <= b.size(); ++j)
            t[i][j] = a[i - 1] == b[j - 1] ? t[i - 1][j - 1] + 1 : std::max(t[i - 1][j], t[i][j - 1]);
    return a.size() + b.size() - 2 * t[a.size()][b.size()];
}

std::string random_lines(testsupport::SplitMix64& rng)
{
    std::string text;
    std::size_t n = rng.below(14);
    for (std::size_t i = 0; i < n; ++i)
        text += std::string(1, static_cast<char>('a' + rng.below(4))) + "\n";
    return text;
}

} // namespace

TEST_CASE("split_lines")
{
    CHECK(split_lines("").empty());
    CHECK(split_lines("a") == std::vector<std::string_view>{"a"});
    CHECK(split_lines("a\n") == std::vector<std::string_view>{"a"});
    CHECK(split_lines("a\n\nb\n") == std::vector<std::string_view>{"a", "", "b"});
    CHECK(split_lines("\n") == std::vector<std::string_view>{""});
}

TEST_CASE("edit script replays both sides, is minimal, and deletes first")
{
    for (std::uint64_t i = 0; i < 3000; ++i) {
        testsupport::SplitMix64 rng(77 + i);
        std::string x = random_lines(rng), y = random_lines(rng);
        auto a = split_lines(x);
        auto b = split_lines(y);
        auto ops = diff_lines(a, b);
        CAPTURE(x);
        CAPTURE(y);

        std::vector<std::string_view> from_a, to_b;
        std::size_t ia = 0, ib = 0, changes = 0;
        bool inserted_in_block = false;
        for (EditOp op : ops) {
            switch (op) {
            case EditOp::Equal:
                REQUIRE(a.at(ia) == b.at(ib));
                ++ia;
                ++ib;
                inserted_in_block = false;
                break;
            case EditOp::Delete:
                CHECK_FALSE(inserted_in_block);
                ++ia;
                ++changes;
                break;
            case EditOp::Insert:
                ++ib;
                ++changes;
                inserted_in_block = true;
                break;
            }
        }
        CHECK(ia == a.size());
        CHECK(ib == b.size());
        const std::size_t want = lcs_distance(a, b);
        CHECK(changes == want);
        CHECK(line_edit_distance(a, b, 1000) == want);
        if (want > 0)
            CHECK_FALSE(line_edit_distance(a, b, want - 1).has_value());
        CHECK(line_edit_distance(a, b, want) == want);
    }
}

TEST_CASE("empty sides")
{
    std::vector<std::string_view> none, two{"x", "y"};
    CHECK(diff_lines(none, none).empty());
    CHECK(diff_lines(none, two) == std::vector<EditOp>{EditOp::Insert, EditOp::Insert});
    CHECK(diff_lines(two, none) == std::vector<EditOp>{EditOp::Delete, EditOp::Delete});
}
