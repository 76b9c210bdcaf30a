#include "optforge/patcher.hpp"

#include "optforge/canonicalizer.hpp"
#include "optforge/line_diff.hpp"

#include <algorithm>

namespace optforge {

PatchResult apply(const DiffScript& script, std::string_view original)
{
    const auto lines = split_lines(original);
    std::vector<std::string_view> output;
    output.reserve(lines.size());
    std::size_t cursor = 0;

    for (std::size_t h = 0; h < script.hunks.size(); ++h) {
        const Hunk& hunk = script.hunks[h];
        std::vector<std::string_view> anchor;
        std::vector<std::string_view> replacement;
        for (const auto& line : hunk.lines) {
            if (line.marker != LineMarker::Added)
                anchor.push_back(line.content);
            if (line.marker != LineMarker::Removed)
                replacement.push_back(line.content);
        }

        std::size_t match = 0;
        if (anchor.empty()) {
            if (h != 0)
                return PatchResult::unmatched(h);
            match = 0;
        } else {
            auto from = lines.begin() + static_cast<std::ptrdiff_t>(cursor);
            auto found = std::search(from, lines.end(), anchor.begin(), anchor.end());
            if (found == lines.end())
                return PatchResult::unmatched(h);
            match = static_cast<std::size_t>(found - lines.begin());
        }

        output.insert(output.end(), lines.begin() + static_cast<std::ptrdiff_t>(cursor),
                      lines.begin() + static_cast<std::ptrdiff_t>(match));
        output.insert(output.end(), replacement.begin(), replacement.end());
        cursor = match + anchor.size();
    }
    output.insert(output.end(), lines.begin() + static_cast<std::ptrdiff_t>(cursor), lines.end());

    std::string text;
    for (std::string_view line : output) {
        text.append(line);
        text.push_back('\n');
    }
    return PatchResult::applied_with(std::move(text));
}

PatchResult apply(const DiffScript& script, const SourceUnit& original)
{
    return optforge::apply(script, original.text);
}

} // namespace optforge
