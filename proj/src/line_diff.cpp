#include "optforge/line_diff.hpp"

#include <algorithm>
#include <cstdint>

namespace optforge {

std::vector<std::string_view> split_lines(std::string_view text)
{
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) {
            lines.push_back(text.substr(start));
            break;
        }
        lines.push_back(text.substr(start, end - start));
        start = end + 1;
    }
    return lines;
}

namespace {

using Lines = std::span<const std::string_view>;

struct Trimmed {
    std::size_t prefix = 0;
    std::size_t suffix = 0;
};

Trimmed trim_common(Lines a, Lines b)
{
    Trimmed t;
    std::size_t limit = std::min(a.size(), b.size());
    while (t.prefix < limit && a[t.prefix] == b[t.prefix])
        ++t.prefix;
    while (t.suffix < limit - t.prefix &&
           a[a.size() - 1 - t.suffix] == b[b.size() - 1 - t.suffix])
        ++t.suffix;
    return t;
}

/// Furthest-reaching D-paths, indexed by diagonal k = x - y.
class Frontier {
public:
    explicit Frontier(std::size_t max_d) : offset_(static_cast<std::int64_t>(max_d) + 1),
                                           v_(2 * max_d + 3, 0) {}

    std::int64_t& operator[](std::int64_t k) { return v_[static_cast<std::size_t>(k + offset_)]; }

    std::vector<std::int64_t> window(std::int64_t d) const
    {
        auto first = v_.begin() + (offset_ - d);
        return {first, first + (2 * d + 1)};
    }

private:
    std::int64_t offset_;
    std::vector<std::int64_t> v_;
};

/// Extends every diagonal for edit cost d. Returns true once (n, m) is reached.
bool advance(Frontier& v, std::int64_t d, Lines a, Lines b)
{
    const auto n = static_cast<std::int64_t>(a.size());
    const auto m = static_cast<std::int64_t>(b.size());
    for (std::int64_t k = -d; k <= d; k += 2) {
        std::int64_t x = 0;
        if (d == 0)
            x = 0;
        else if (k == -d || (k != d && v[k - 1] < v[k + 1]))
            x = v[k + 1];
        else
            x = v[k - 1] + 1;
        std::int64_t y = x - k;
        while (x < n && y < m && a[static_cast<std::size_t>(x)] == b[static_cast<std::size_t>(y)]) {
            ++x;
            ++y;
        }
        v[k] = x;
        if (x >= n && y >= m)
            return true;
    }
    return false;
}

std::vector<EditOp> myers(Lines a, Lines b)
{
    const auto n = static_cast<std::int64_t>(a.size());
    const auto m = static_cast<std::int64_t>(b.size());
    const std::size_t max_d = a.size() + b.size();
    Frontier v(max_d);
    std::vector<std::vector<std::int64_t>> trace;

    std::int64_t final_d = 0;
    for (std::int64_t d = 0; d <= static_cast<std::int64_t>(max_d); ++d) {
        bool done = advance(v, d, a, b);
        trace.push_back(v.window(d));
        if (done) {
            final_d = d;
            break;
        }
    }

    std::vector<EditOp> reversed;
    std::int64_t x = n;
    std::int64_t y = m;
    for (std::int64_t d = final_d; d > 0; --d) {
        const auto& prev = trace[static_cast<std::size_t>(d - 1)];
        auto at = [&](std::int64_t k) { return prev[static_cast<std::size_t>(k + d - 1)]; };
        std::int64_t k = x - y;
        std::int64_t prev_k = (k == -d || (k != d && at(k - 1) < at(k + 1))) ? k + 1 : k - 1;
        std::int64_t prev_x = at(prev_k);
        std::int64_t prev_y = prev_x - prev_k;
        while (x > prev_x && y > prev_y) {
            reversed.push_back(EditOp::Equal);
            --x;
            --y;
        }
        if (x == prev_x) {
            reversed.push_back(EditOp::Insert);
            --y;
        } else {
            reversed.push_back(EditOp::Delete);
            --x;
        }
    }
    while (x > 0 && y > 0) {
        reversed.push_back(EditOp::Equal);
        --x;
        --y;
    }
    return {reversed.rbegin(), reversed.rend()};
}

/// Rewrites each maximal change block as its deletions followed by its insertions.
void order_change_blocks(std::vector<EditOp>& ops)
{
    std::size_t i = 0;
    while (i < ops.size()) {
        if (ops[i] == EditOp::Equal) {
            ++i;
            continue;
        }
        std::size_t end = i;
        std::size_t deletes = 0;
        while (end < ops.size() && ops[end] != EditOp::Equal) {
            if (ops[end] == EditOp::Delete)
                ++deletes;
            ++end;
        }
        std::fill(ops.begin() + static_cast<std::ptrdiff_t>(i),
                  ops.begin() + static_cast<std::ptrdiff_t>(i + deletes), EditOp::Delete);
        std::fill(ops.begin() + static_cast<std::ptrdiff_t>(i + deletes),
                  ops.begin() + static_cast<std::ptrdiff_t>(end), EditOp::Insert);
        i = end;
    }
}

} // namespace

std::vector<EditOp> diff_lines(Lines before, Lines after)
{
    Trimmed t = trim_common(before, after);
    Lines a = before.subspan(t.prefix, before.size() - t.prefix - t.suffix);
    Lines b = after.subspan(t.prefix, after.size() - t.prefix - t.suffix);

    std::vector<EditOp> ops(t.prefix, EditOp::Equal);
    std::vector<EditOp> middle = myers(a, b);
    ops.insert(ops.end(), middle.begin(), middle.end());
    ops.insert(ops.end(), t.suffix, EditOp::Equal);
    order_change_blocks(ops);
    return ops;
}

std::optional<std::size_t> line_edit_distance(Lines before, Lines after, std::size_t limit)
{
    Trimmed t = trim_common(before, after);
    Lines a = before.subspan(t.prefix, before.size() - t.prefix - t.suffix);
    Lines b = after.subspan(t.prefix, after.size() - t.prefix - t.suffix);

    const std::size_t lower_bound = a.size() > b.size() ? a.size() - b.size() : b.size() - a.size();
    if (lower_bound > limit)
        return std::nullopt;
    const std::size_t max_d = std::min(limit, a.size() + b.size());
    Frontier v(max_d);
    for (std::size_t d = 0; d <= max_d; ++d) {
        if (advance(v, static_cast<std::int64_t>(d), a, b))
            return d;
    }
    return std::nullopt;
}

} // namespace optforge
