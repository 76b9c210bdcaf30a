#include "optforge/diffrep.hpp"

#include "optforge/canonicalizer.hpp"
#include "optforge/line_diff.hpp"

#include <algorithm>

namespace optforge {

std::string_view to_string(MalformedReason reason)
{
    switch (reason) {
    case MalformedReason::UnknownMarker:
        return "UnknownMarker";
    case MalformedReason::EmptyScript:
        return "EmptyScript";
    case MalformedReason::HunkWithoutChange:
        return "HunkWithoutChange";
    case MalformedReason::ExcessContext:
        return "ExcessContext";
    }
    return "Unknown";
}

MalformedDiff::MalformedDiff(MalformedReason reason, std::string detail)
    : Error("malformed diff (" + std::string(to_string(reason)) + "): " + detail), reason_(reason)
{
}

DiffScript synthesize(std::string_view original, std::string_view improved)
{
    const auto before = split_lines(original);
    const auto after = split_lines(improved);
    const auto ops = diff_lines(before, after);

    // Position of each op in both inputs.
    struct Step {
        EditOp op;
        std::size_t a;
        std::size_t b;
    };
    std::vector<Step> steps;
    steps.reserve(ops.size());
    std::size_t a = 0;
    std::size_t b = 0;
    for (EditOp op : ops) {
        steps.push_back({op, a, b});
        if (op != EditOp::Insert)
            ++a;
        if (op != EditOp::Delete)
            ++b;
    }

    // [first, last) ranges of steps covering each change block.
    std::vector<std::pair<std::size_t, std::size_t>> blocks;
    for (std::size_t i = 0; i < steps.size();) {
        if (steps[i].op == EditOp::Equal) {
            ++i;
            continue;
        }
        std::size_t end = i;
        while (end < steps.size() && steps[end].op != EditOp::Equal)
            ++end;
        blocks.emplace_back(i, end);
        i = end;
    }
    if (blocks.empty())
        throw IdenticalInputs("inputs have identical lines; there is no diff to synthesize");

    // Hunks as [lo, hi) step ranges, blocks grouped while the equal gap is
    // covered by the two context windows.
    std::vector<std::pair<std::size_t, std::size_t>> ranges;
    for (std::size_t g = 0; g < blocks.size();) {
        std::size_t first = blocks[g].first;
        std::size_t last = blocks[g].second;
        while (g + 1 < blocks.size() && blocks[g + 1].first - last <= 2 * kContextLines) {
            ++g;
            last = blocks[g].second;
        }
        ++g;
        std::size_t lead = 0;
        while (lead < kContextLines && first > lead && steps[first - lead - 1].op == EditOp::Equal)
            ++lead;
        std::size_t trail = 0;
        while (trail < kContextLines && last + trail < steps.size() &&
               steps[last + trail].op == EditOp::Equal)
            ++trail;
        ranges.emplace_back(first - lead, last + trail);
    }

    // The patcher takes the first forward match of each anchor. Where that
    // would land before the true position, widen the leading context until it
    // does not, merging into the previous hunk if the two meet.
    auto anchor_of = [&](std::size_t lo, std::size_t hi) {
        std::vector<std::string_view> anchor;
        for (std::size_t i = lo; i < hi; ++i)
            if (steps[i].op != EditOp::Insert)
                anchor.push_back(before[steps[i].a]);
        return anchor;
    };
    std::size_t cursor = 0;
    for (std::size_t h = 0; h < ranges.size(); ++h) {
        const std::size_t floor = h == 0 ? 0 : ranges[h - 1].second;
        while (true) {
            auto [lo, hi] = ranges[h];
            auto anchor = anchor_of(lo, hi);
            if (anchor.empty())
                break;
            auto found = std::search(before.begin() + static_cast<std::ptrdiff_t>(cursor), before.end(),
                                     anchor.begin(), anchor.end());
            if (static_cast<std::size_t>(found - before.begin()) == steps[lo].a)
                break;
            if (lo > floor) {
                --ranges[h].first;
                continue;
            }
            // Reaching the previous hunk: its anchor is a prefix of the merged
            // one and already matched first, so the merged hunk does too.
            ranges[h - 1].second = hi;
            ranges.erase(ranges.begin() + static_cast<std::ptrdiff_t>(h));
            --h;
            break;
        }
        auto [lo, hi] = ranges[h];
        cursor = steps[lo].a + anchor_of(lo, hi).size();
    }

    DiffScript script;
    for (auto [lo, hi] : ranges) {
        Hunk hunk;
        for (std::size_t i = lo; i < hi; ++i) {
            const Step& s = steps[i];
            switch (s.op) {
            case EditOp::Equal:
                hunk.lines.push_back({LineMarker::Context, std::string(before[s.a])});
                break;
            case EditOp::Delete:
                hunk.lines.push_back({LineMarker::Removed, std::string(before[s.a])});
                break;
            case EditOp::Insert:
                hunk.lines.push_back({LineMarker::Added, std::string(after[s.b])});
                break;
            }
        }
        script.hunks.push_back(std::move(hunk));
    }
    return script;
}

DiffScript synthesize(const SourceUnit& original, const SourceUnit& improved)
{
    return synthesize(original.text, improved.text);
}

std::string render(const DiffScript& script)
{
    std::string out;
    for (std::size_t h = 0; h < script.hunks.size(); ++h) {
        if (h > 0)
            out.push_back('\n');
        for (const auto& line : script.hunks[h].lines) {
            out.push_back(static_cast<char>(line.marker));
            out.append(line.content);
            out.push_back('\n');
        }
    }
    return out;
}

namespace {

void validate_hunk(const Hunk& hunk, std::size_t index)
{
    const auto where = "hunk " + std::to_string(index);
    bool any_change = false;
    std::size_t run = 0;
    for (const auto& line : hunk.lines) {
        if (line.content.find('\n') != std::string::npos)
            throw MalformedDiff(MalformedReason::UnknownMarker, where + " has a line containing LF");
        if (line.marker == LineMarker::Context) {
            ++run;
            continue;
        }
        run = 0;
        any_change = true;
    }
    if (!any_change)
        throw MalformedDiff(MalformedReason::HunkWithoutChange, where + " has no changed line");
    if (run > kContextLines)
        throw MalformedDiff(MalformedReason::ExcessContext,
                            where + " has " + std::to_string(run) + " trailing context lines");
}

} // namespace

void validate(const DiffScript& script)
{
    if (script.hunks.empty())
        throw MalformedDiff(MalformedReason::EmptyScript, "no hunks");
    for (std::size_t i = 0; i < script.hunks.size(); ++i)
        validate_hunk(script.hunks[i], i);
}

DiffScript parse(std::string_view raw)
{
    DiffScript script;
    Hunk current;
    std::size_t line_number = 0;
    auto close_hunk = [&] {
        if (!current.lines.empty())
            script.hunks.push_back(std::move(current));
        current = Hunk{};
    };

    for (std::string_view line : split_lines(raw)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        if (line.empty()) {
            close_hunk();
            continue;
        }
        LineMarker marker;
        switch (line.front()) {
        case ' ':
            marker = LineMarker::Context;
            break;
        case '-':
            marker = LineMarker::Removed;
            break;
        case '+':
            marker = LineMarker::Added;
            break;
        default:
            throw MalformedDiff(MalformedReason::UnknownMarker,
                                "line " + std::to_string(line_number) + " starts with '" +
                                    std::string(1, line.front()) + "'");
        }
        current.lines.push_back({marker, std::string(line.substr(1))});
    }
    close_hunk();
    validate(script);
    return script;
}

std::size_t changed_line_count(const DiffScript& script)
{
    std::size_t count = 0;
    for (const auto& hunk : script.hunks)
        for (const auto& line : hunk.lines)
            if (line.marker != LineMarker::Context)
                ++count;
    return count;
}

} // namespace optforge
