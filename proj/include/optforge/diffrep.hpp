#pragma once

#include "optforge/error.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace optforge {

struct SourceUnit;

enum class LineMarker : char { Context = ' ', Removed = '-', Added = '+' };

struct DiffLine {
    LineMarker marker = LineMarker::Context;
    std::string content;

    friend bool operator==(const DiffLine&, const DiffLine&) = default;
};

/// One or more change blocks with their context. Trailing context is at most
/// one line; leading context is one line unless synthesize had to widen it.
struct Hunk {
    std::vector<DiffLine> lines;

    friend bool operator==(const Hunk&, const Hunk&) = default;
};

/// Headerless unified diff: hunks in source order, rendered with one empty
/// line between consecutive hunks.
struct DiffScript {
    std::vector<Hunk> hunks;

    friend bool operator==(const DiffScript&, const DiffScript&) = default;
};

enum class MalformedReason { UnknownMarker, EmptyScript, HunkWithoutChange, ExcessContext };

std::string_view to_string(MalformedReason reason);

class MalformedDiff : public Error {
public:
    MalformedDiff(MalformedReason reason, std::string detail);
    MalformedReason reason() const { return reason_; }

private:
    MalformedReason reason_;
};

class IdenticalInputs : public Error {
public:
    using Error::Error;
};

/// Lines of context kept on each side of a change block.
inline constexpr std::size_t kContextLines = 1;

/// Minimal line diff of two canonical texts grouped into one-context hunks.
/// Change blocks whose context would touch or overlap share a hunk. When a
/// hunk's anchor would first match earlier in the original than where it
/// belongs, its leading context grows until it does not, and it is merged into
/// the previous hunk if the two meet, so apply() always reproduces `improved`.
/// Throws IdenticalInputs when the texts have the same lines.
DiffScript synthesize(std::string_view original, std::string_view improved);
DiffScript synthesize(const SourceUnit& original, const SourceUnit& improved);

std::string render(const DiffScript& script);

/// Parses untrusted text. Empty lines separate hunks; every other line must
/// start with ' ', '-' or '+'. A trailing CR on a line is ignored. A hunk must
/// change something and end with at most one context line. Throws
/// MalformedDiff.
DiffScript parse(std::string_view raw);

/// Checks the structural invariants parse enforces. Throws MalformedDiff.
void validate(const DiffScript& script);

/// Counts of Removed and Added lines across the script.
std::size_t changed_line_count(const DiffScript& script);

} // namespace optforge
