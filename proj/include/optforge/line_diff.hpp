#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace optforge {

/// Splits on LF. A final LF does not start an extra line; "" has no lines.
std::vector<std::string_view> split_lines(std::string_view text);

enum class EditOp { Equal, Delete, Insert };

/// Minimal line edit script (Myers). Within every change block all deletions
/// precede all insertions.
std::vector<EditOp> diff_lines(std::span<const std::string_view> before,
                               std::span<const std::string_view> after);

/// Number of deleted plus inserted lines in a minimal edit script, or nullopt
/// once it is known to exceed `limit`.
std::optional<std::size_t> line_edit_distance(std::span<const std::string_view> before,
                                              std::span<const std::string_view> after,
                                              std::size_t limit);

} // namespace optforge
