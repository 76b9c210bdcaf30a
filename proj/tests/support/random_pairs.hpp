#pragma once

// Mirror of the pair generator in tests/oracles/similarity_reference.py. Any
// change here must be made there too and the reference file regenerated.

#include <algorithm>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>

namespace testsupport {

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next()
    {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t below(std::uint64_t bound) { return next() % bound; }

private:
    std::uint64_t state_;
};

inline constexpr std::string_view kAlphabet = "abcdefghijklmnopqrstuvwxyz0123456789 (){};=+-*<>\n\t\"'#";
inline constexpr std::string_view kSmallAlphabet = "ab";
inline constexpr std::size_t kReferencePairCount = 1000;

inline std::string random_text(SplitMix64& rng, std::size_t length, std::string_view alphabet)
{
    std::string text;
    text.reserve(length);
    for (std::size_t i = 0; i < length; ++i)
        text.push_back(alphabet[rng.below(alphabet.size())]);
    return text;
}

inline std::pair<std::string, std::string> make_pair(std::uint64_t index)
{
    SplitMix64 rng(SplitMix64(index).next());
    const std::uint64_t kind = rng.below(3);
    if (kind == 0) {
        std::size_t la = rng.below(5001);
        std::size_t lb = rng.below(5001);
        std::string a = random_text(rng, la, kAlphabet);
        std::string b = random_text(rng, lb, kAlphabet);
        return {std::move(a), std::move(b)};
    }
    if (kind == 1) {
        std::string a = random_text(rng, rng.below(5001), kAlphabet);
        std::string b = a;
        std::uint64_t edits = 1 + rng.below(20);
        for (std::uint64_t e = 0; e < edits; ++e) {
            std::uint64_t op = rng.below(3);
            std::size_t pos = rng.below(b.size() + 1);
            std::size_t span = 1 + rng.below(50);
            std::size_t end = std::min(b.size(), pos + span);
            if (op == 0)
                b.erase(pos, end - pos);
            else if (op == 1)
                b.insert(pos, random_text(rng, span, kAlphabet));
            else
                b.replace(pos, end - pos, random_text(rng, span, kAlphabet));
        }
        return {std::move(a), std::move(b)};
    }
    std::size_t la = rng.below(201);
    std::size_t lb = rng.below(201);
    std::string a = random_text(rng, la, kSmallAlphabet);
    std::string b = random_text(rng, lb, kSmallAlphabet);
    return {std::move(a), std::move(b)};
}

} // namespace testsupport
