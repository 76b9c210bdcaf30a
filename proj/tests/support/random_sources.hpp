#pragma once

// Random C/C++-like sources for canonicalizer properties. Every comment
// contains the sentinel "CMT"; no literal or code token does. Every literal
// emitted is remembered so its survival can be checked byte for byte.

#include "random_pairs.hpp"

#include <string>
#include <vector>

namespace testsupport {

inline constexpr std::string_view kCommentSentinel = "CMT";

struct RandomSource {
    std::string text;
    std::vector<std::string> literals;
    std::size_t comments = 0;
};

inline std::string pick(SplitMix64& rng, std::initializer_list<const char*> options)
{
    return *(options.begin() + rng.below(options.size()));
}

inline std::string random_string_literal(SplitMix64& rng)
{
    std::string body = pick(rng, {"// not a comment", "/* nor this */", "a \\\" quote", "back\\\\", "*/ stray",
                                  "url http://x.y/z", "'", "%d\\n", "", "/", "*", "\\\\\\\""});
    body += pick(rng, {"", " tail", "//", "/*x*/"});
    std::string prefix = pick(rng, {"", "", "", "u8", "L", "u", "U"});
    if (rng.below(8) == 0)
        body += "\\\nspliced";
    return prefix + "\"" + body + "\"";
}

inline std::string random_char_literal(SplitMix64& rng)
{
    return pick(rng, {"'a'", "'\\''", "'\"'", "'/'", "'*'", "'\\\\'", "'\\n'"});
}

inline std::string random_raw_literal(SplitMix64& rng)
{
    std::string delim = pick(rng, {"", "x", "abc", "_1"});
    std::string body = pick(rng, {"// inside raw", "/* inside */ raw", "\"quotes\" and \\", ")\" not end",
                                  "line one\nline two // still raw", "a\n  b /* c\nd */"});
    if (delim.empty() && body.find(")\"") != std::string::npos)
        body = "plain";
    std::string prefix = pick(rng, {"R", "R", "u8R", "LR"});
    return prefix + "\"" + delim + "(" + body + ")" + delim + "\"";
}

inline std::string random_comment(SplitMix64& rng, std::string_view newline)
{
    // A splice joins exactly one line break, optionally after blanks.
    const std::string splice = pick(rng, {"\\\n", "\\\r\n", "\\ \n"});
    switch (rng.below(6)) {
    case 0:
        return "// CMT line " + std::to_string(rng.below(100)) + std::string(newline);
    case 1:
        return "/* CMT block */";
    case 2:
        return "/* CMT multi" + std::string(newline) + " * CMT line" + std::string(newline) + " */";
    case 3:
        return "// CMT continued " + splice + "CMT still comment" + std::string(newline);
    case 4:
        return "/" + splice + "/ CMT spliced opener" + std::string(newline);
    default:
        return "/* CMT \"quote\" 'q' // inner */";
    }
}

inline std::string random_code_token(SplitMix64& rng)
{
    return pick(rng, {"int", "x", "y1", "=", "+", ";", "{", "}", "(", ")", "a / b", "p->q", "*ptr", "1'000'000",
                      "0x1'F", "3.14", "v[2]", "return", "#include <vector>", "#define M(x) ((x) \\\n + 1)",
                      "if", "&&", "<<", "template<class T>", "x /= 2", "c ? d : e"});
}

/// One random source. `index` selects the stream.
inline RandomSource make_random_source(std::uint64_t index)
{
    SplitMix64 rng(SplitMix64(0xC0FFEEULL + index).next());
    RandomSource src;
    const std::size_t tokens = 5 + rng.below(80);
    for (std::size_t t = 0; t < tokens; ++t) {
        const std::string newline = pick(rng, {"\n", "\n", "\n", "\r\n", "  \n", "\t\n", "\n\n\n"});
        switch (rng.below(8)) {
        case 0:
        case 1: {
            src.literals.push_back(random_string_literal(rng));
            src.text += src.literals.back();
            break;
        }
        case 2:
            src.literals.push_back(random_char_literal(rng));
            src.text += src.literals.back();
            break;
        case 3:
            src.literals.push_back(random_raw_literal(rng));
            src.text += src.literals.back();
            break;
        case 4:
            src.text += random_comment(rng, newline);
            ++src.comments;
            break;
        default:
            src.text += random_code_token(rng);
            break;
        }
        switch (rng.below(4)) {
        case 0:
            src.text += newline;
            break;
        case 1:
            src.text += "\t";
            break;
        default:
            src.text += " ";
            break;
        }
    }
    return src;
}

} // namespace testsupport
