#pragma once

#include "optforge/diffrep.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace optforge {

struct SourceUnit;

struct PatchResult {
    enum class Status { Applied, Unmatched };

    Status status = Status::Applied;
    /// Present iff status == Applied.
    std::optional<std::string> output;
    /// First hunk whose anchor was not found; meaningful iff Unmatched.
    std::size_t hunk_index = 0;

    bool applied() const { return status == Status::Applied; }

    static PatchResult applied_with(std::string text) { return {Status::Applied, std::move(text), 0}; }
    static PatchResult unmatched(std::size_t hunk) { return {Status::Unmatched, std::nullopt, hunk}; }
};

/// Applies hunks in order. Each hunk's anchor (its context and removed lines,
/// in order) must match consecutive lines of `original` exactly, searching
/// forward from the end of the previous hunk's match; the first match wins and
/// is replaced by the hunk's context and added lines. A hunk with an empty
/// anchor only applies as the first hunk, at the start of the file.
PatchResult apply(const DiffScript& script, std::string_view original);
PatchResult apply(const DiffScript& script, const SourceUnit& original);

} // namespace optforge
