#include "optforge/curator.hpp"

#include "optforge/diffrep.hpp"
#include "optforge/line_diff.hpp"
#include "optforge/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <tuple>
#include <unordered_map>

namespace optforge {

std::string_view to_string(Origin origin)
{
    switch (origin) {
    case Origin::AIZU:
        return "AIZU";
    case Origin::AtCoder:
        return "AtCoder";
    case Origin::Codeforces:
        return "Codeforces";
    }
    return "Unknown";
}

Origin parse_origin(std::string_view text)
{
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "aizu")
        return Origin::AIZU;
    if (lower == "atcoder")
        return Origin::AtCoder;
    if (lower == "codeforces")
        return Origin::Codeforces;
    throw Error("unknown origin '" + std::string(text) + "'");
}

namespace {

using nlohmann::json;

std::string text_field(const json& object, const char* key)
{
    auto it = object.find(key);
    if (it == object.end() || it->is_null())
        throw RecordInvalid(std::string("missing field '") + key + "'");
    if (it->is_string())
        return it->get<std::string>();
    if (it->is_number_integer())
        return std::to_string(it->get<std::int64_t>());
    throw RecordInvalid(std::string("field '") + key + "' must be a string");
}

std::int64_t integer_field(const json& object, const char* key)
{
    auto it = object.find(key);
    if (it == object.end() || it->is_null())
        throw RecordInvalid(std::string("missing field '") + key + "'");
    if (it->is_number_integer())
        return it->get<std::int64_t>();
    if (it->is_number_float()) {
        double value = it->get<double>();
        if (value != std::floor(value))
            throw RecordInvalid(std::string("field '") + key + "' must be an integer");
        return static_cast<std::int64_t>(value);
    }
    throw RecordInvalid(std::string("field '") + key + "' must be an integer");
}

} // namespace

SubmissionRecord record_from_json(const json& object)
{
    if (!object.is_object())
        throw RecordInvalid("record is not a JSON object");

    SubmissionRecord r;
    try {
        r.origin = parse_origin(text_field(object, "origin"));
        r.programming_language = parse_language(text_field(object, "programming_language"));
    } catch (const RecordInvalid&) {
        throw;
    } catch (const Error& e) {
        throw RecordInvalid(e.what());
    }
    r.author = text_field(object, "author");
    r.contest_id = text_field(object, "contest_id");
    r.submission_id = text_field(object, "submission_id");
    r.creation_time = integer_field(object, "creation_time");
    r.problem = text_field(object, "problem");
    r.cpu_time = integer_field(object, "cpu_time");
    if (object.contains("memory"))
        r.memory = integer_field(object, "memory");
    else if (object.contains("memory_bytes")) {
        std::int64_t bytes = integer_field(object, "memory_bytes");
        if (bytes < 0)
            throw RecordInvalid("memory_bytes must be non-negative");
        r.memory = bytes / 1024;
    } else
        throw RecordInvalid("missing field 'memory'");
    r.source_code = text_field(object, "source_code");

    if (r.cpu_time < 0)
        throw RecordInvalid("cpu_time must be non-negative");
    if (r.memory < 0)
        throw RecordInvalid("memory must be non-negative");
    if (r.submission_id.empty())
        throw RecordInvalid("submission_id must not be empty");
    return r;
}

json to_json(const SubmissionRecord& r)
{
    return json{{"origin", to_string(r.origin)},
                {"author", r.author},
                {"contest_id", r.contest_id},
                {"submission_id", r.submission_id},
                {"creation_time", r.creation_time},
                {"problem", r.problem},
                {"programming_language", to_string(r.programming_language)},
                {"cpu_time", r.cpu_time},
                {"memory", r.memory},
                {"source_code", r.source_code}};
}

IngestResult ingest(std::istream& input, const FormatterConfig& formatter)
{
    IngestResult result;
    std::set<std::pair<Origin, std::string>> seen;
    std::string line;
    std::size_t number = 0;
    while (std::getline(input, line)) {
        ++number;
        ++result.report.lines_read;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        try {
            Utf8Repair decoded = repair_utf8(line);
            SubmissionRecord record = record_from_json(json::parse(decoded.text));
            if (!seen.emplace(record.origin, record.submission_id).second) {
                ++result.report.duplicates;
                continue;
            }
            CanonicalizeDiagnostics diagnostics;
            SourceUnit unit{record.submission_id, record.programming_language, record.source_code};
            record.source_code = canonicalize(unit, formatter, &diagnostics).text;
            record.lossy_utf8 = decoded.lossy || diagnostics.lossy_utf8;
            result.report.lossy_utf8 += record.lossy_utf8 ? 1 : 0;
            result.report.unterminated_comments += diagnostics.unterminated_block_comment ? 1 : 0;
            result.records.push_back(std::move(record));
        } catch (const json::exception& e) {
            result.report.invalid.push_back({number, std::string("invalid JSON: ") + e.what()});
        } catch (const RecordInvalid& e) {
            result.report.invalid.push_back({number, e.what()});
        }
    }
    result.report.records_accepted = result.records.size();
    return result;
}

IngestResult ingest(const std::filesystem::path& path, const FormatterConfig& formatter)
{
    std::ifstream input(path, std::ios::binary);
    if (!input)
        throw CorpusUnreadable("cannot read corpus '" + path.string() + "'");
    return ingest(input, formatter);
}

ChangeCount count_changes(std::string_view before, std::string_view after)
{
    const auto a = split_lines(before);
    const auto b = split_lines(after);
    const std::size_t changed = *line_edit_distance(a, b, a.size() + b.size());
    const std::size_t denominator = std::max<std::size_t>(a.size(), 1);
    return {changed, static_cast<double>(changed) / static_cast<double>(denominator)};
}

std::string OptimizationPair::program_id() const
{
    return std::string(to_string(before.origin)) + ":" + before.submission_id;
}

MiningResult mine_pairs(std::vector<SubmissionRecord> records, const CurationFilters& filters)
{
    MiningResult result;
    result.report.records = records.size();

    using GroupKey = std::tuple<Origin, std::string, std::string>;
    std::map<GroupKey, std::vector<SubmissionRecord>> groups;
    for (auto& r : records)
        groups[{r.origin, r.author, r.problem}].push_back(std::move(r));
    result.report.groups = groups.size();

    // Fractions are compared with a tolerance so 2/10 passes a 0.20 limit.
    constexpr double fraction_slack = 1e-12;

    for (auto& [key, group] : groups) {
        std::sort(group.begin(), group.end(), [](const SubmissionRecord& x, const SubmissionRecord& y) {
            return std::tie(x.creation_time, x.submission_id) <
                   std::tie(y.creation_time, y.submission_id);
        });
        for (std::size_t i = 0; i + 1 < group.size(); ++i) {
            const SubmissionRecord& before = group[i];
            const SubmissionRecord& after = group[i + 1];
            auto& report = result.report;
            ++report.consecutive_pairs;

            if (before.creation_time == after.creation_time) {
                ++report.same_timestamp;
                continue;
            }
            OptimizationPair pair;
            pair.improves_time = after.cpu_time < before.cpu_time;
            pair.improves_memory = after.memory < before.memory;
            if (!pair.improves_time && !pair.improves_memory) {
                ++report.not_improving;
                continue;
            }
            const auto a = split_lines(before.source_code);
            const auto b = split_lines(after.source_code);
            if (a == b) {
                ++report.identical_text;
                continue;
            }
            auto changed = line_edit_distance(a, b, filters.max_changed_lines);
            if (!changed) {
                ++report.too_many_lines;
                continue;
            }
            pair.changed_lines = *changed;
            pair.changed_fraction = static_cast<double>(*changed) /
                                    static_cast<double>(std::max<std::size_t>(a.size(), 1));
            if (pair.changed_fraction > filters.max_changed_fraction + fraction_slack) {
                ++report.too_large_fraction;
                continue;
            }
            pair.similarity = ratio(before.source_code, after.source_code);
            if (pair.similarity < filters.min_similarity) {
                ++report.low_similarity;
                continue;
            }
            pair.before = before;
            pair.after = after;
            result.pairs.push_back(std::move(pair));
            ++report.kept;
        }
    }
    return result;
}

SplitSizes default_split_sizes(std::size_t pair_count)
{
    constexpr double reference_total = 312876.0 + 1000.0 + 559.0;
    auto share = [&](double part) {
        return static_cast<std::size_t>(std::llround(static_cast<double>(pair_count) * part / reference_total));
    };
    SplitSizes sizes;
    sizes.valid = share(1000.0);
    sizes.test = share(559.0);
    sizes.train = pair_count - sizes.valid - sizes.test;
    return sizes;
}

namespace {

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t find(std::size_t x)
    {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(std::size_t x, std::size_t y)
    {
        x = find(x);
        y = find(y);
        if (x != y)
            parent_[std::max(x, y)] = std::min(x, y);
    }

private:
    std::vector<std::size_t> parent_;
};

/// Uniform integer in [0, bound) by rejection; identical on every platform,
/// unlike std::uniform_int_distribution.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound)
{
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t value = 0;
    do {
        value = rng();
    } while (value >= limit);
    return value % bound;
}

} // namespace

DatasetSplit split(std::vector<OptimizationPair> pairs, std::uint64_t seed, SplitSizes sizes)
{
    if (sizes.total() > pairs.size())
        throw InsufficientPairs("requested " + std::to_string(sizes.total()) + " pairs but only " +
                                std::to_string(pairs.size()) + " are available");

    DisjointSets sets(pairs.size());
    std::map<std::tuple<Origin, std::string, std::string>, std::size_t> group_owner;
    std::unordered_map<std::string_view, std::size_t> text_owner;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto& before = pairs[i].before;
        auto [g, g_new] = group_owner.try_emplace({before.origin, before.author, before.problem}, i);
        if (!g_new)
            sets.unite(g->second, i);
        auto [t, t_new] = text_owner.try_emplace(before.source_code, i);
        if (!t_new)
            sets.unite(t->second, i);
    }

    // Components in order of their first member, then shuffled.
    std::vector<std::vector<std::size_t>> components;
    std::unordered_map<std::size_t, std::size_t> component_of_root;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        auto [it, inserted] = component_of_root.try_emplace(sets.find(i), components.size());
        if (inserted)
            components.emplace_back();
        components[it->second].push_back(i);
    }
    std::mt19937_64 rng(seed);
    for (std::size_t i = components.size(); i > 1; --i)
        std::swap(components[i - 1], components[bounded(rng, i)]);

    DatasetSplit result;
    result.seed = seed;
    struct Slot {
        std::vector<OptimizationPair>* target;
        std::size_t room;
    };
    Slot slots[] = {{&result.test, sizes.test}, {&result.valid, sizes.valid}, {&result.train, sizes.train}};
    for (const auto& component : components) {
        Slot* slot = nullptr;
        for (auto& candidate : slots) {
            if (candidate.room >= component.size()) {
                slot = &candidate;
                break;
            }
        }
        if (!slot) {
            result.unused += component.size();
            continue;
        }
        slot->room -= component.size();
        for (std::size_t index : component)
            slot->target->push_back(std::move(pairs[index]));
    }
    return result;
}

json to_json(const OptimizationPair& pair)
{
    json improved = json::array();
    if (pair.improves_time)
        improved.push_back("time");
    if (pair.improves_memory)
        improved.push_back("memory");
    return json{{"program_id", pair.program_id()},
                {"origin", to_string(pair.before.origin)},
                {"author", pair.before.author},
                {"problem", pair.before.problem},
                {"contest_id", pair.before.contest_id},
                {"programming_language", to_string(pair.before.programming_language)},
                {"before_submission_id", pair.before.submission_id},
                {"after_submission_id", pair.after.submission_id},
                {"before_creation_time", pair.before.creation_time},
                {"after_creation_time", pair.after.creation_time},
                {"before_cpu_time", pair.before.cpu_time},
                {"after_cpu_time", pair.after.cpu_time},
                {"before_memory", pair.before.memory},
                {"after_memory", pair.after.memory},
                {"improved_dimension", improved},
                {"changed_lines", pair.changed_lines},
                {"changed_fraction", pair.changed_fraction},
                {"similarity", pair.similarity},
                {"before_text", pair.before.source_code},
                {"after_text", pair.after.source_code},
                {"diff", render(synthesize(pair.before.source_code, pair.after.source_code))}};
}

json to_json(const IngestReport& report)
{
    json invalid = json::array();
    for (const auto& d : report.invalid)
        invalid.push_back({{"line", d.line}, {"message", d.message}});
    return json{{"lines_read", report.lines_read},
                {"records_accepted", report.records_accepted},
                {"duplicates", report.duplicates},
                {"lossy_utf8", report.lossy_utf8},
                {"unterminated_comments", report.unterminated_comments},
                {"invalid_count", report.invalid.size()},
                {"invalid", invalid}};
}

json to_json(const MiningReport& report)
{
    return json{{"records", report.records},
                {"groups", report.groups},
                {"consecutive_pairs", report.consecutive_pairs},
                {"same_timestamp", report.same_timestamp},
                {"not_improving", report.not_improving},
                {"identical_text", report.identical_text},
                {"too_many_lines", report.too_many_lines},
                {"too_large_fraction", report.too_large_fraction},
                {"low_similarity", report.low_similarity},
                {"kept", report.kept}};
}

} // namespace optforge
