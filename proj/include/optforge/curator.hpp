#pragma once

#include "optforge/canonicalizer.hpp"
#include "optforge/error.hpp"

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace optforge {

enum class Origin { AIZU, AtCoder, Codeforces };

std::string_view to_string(Origin origin);
Origin parse_origin(std::string_view text);

/// One accepted judge submission. cpu_time is in milliseconds, memory in
/// kilobytes.
struct SubmissionRecord {
    Origin origin = Origin::Codeforces;
    std::string author;
    std::string contest_id;
    std::string submission_id;
    std::int64_t creation_time = 0;
    std::string problem;
    Language programming_language = Language::Cpp;
    std::int64_t cpu_time = 0;
    std::int64_t memory = 0;
    std::string source_code;
    /// Source was not valid UTF-8 and was decoded with replacement characters.
    bool lossy_utf8 = false;
};

class RecordInvalid : public Error {
public:
    using Error::Error;
};

class CorpusUnreadable : public Error {
public:
    using Error::Error;
};

/// Builds a record from one corpus object. `memory_bytes` is accepted in
/// place of `memory` and floored to kilobytes. Throws RecordInvalid. The
/// source is not canonicalized here.
SubmissionRecord record_from_json(const nlohmann::json& object);
nlohmann::json to_json(const SubmissionRecord& record);

struct LineDiagnostic {
    std::size_t line = 0;
    std::string message;
};

struct IngestReport {
    std::size_t lines_read = 0;
    std::size_t records_accepted = 0;
    std::size_t duplicates = 0;
    std::size_t lossy_utf8 = 0;
    std::size_t unterminated_comments = 0;
    std::vector<LineDiagnostic> invalid;
};

struct IngestResult {
    std::vector<SubmissionRecord> records;
    IngestReport report;
};

/// Reads a JSONL corpus, canonicalizes every source and drops repeated
/// (origin, submission_id) keys after their first occurrence. Bad lines are
/// reported, never fatal. Throws CorpusUnreadable when the file cannot be read.
IngestResult ingest(const std::filesystem::path& path, const FormatterConfig& formatter = {});
IngestResult ingest(std::istream& input, const FormatterConfig& formatter = {});

struct ChangeCount {
    std::size_t changed_lines = 0;
    double changed_fraction = 0.0;
};

/// Removed plus added lines of the minimal line diff, and that count over the
/// line count of `before` (at least 1).
ChangeCount count_changes(std::string_view before, std::string_view after);

struct CurationFilters {
    std::size_t max_changed_lines = 20;
    double max_changed_fraction = 0.20;
    double min_similarity = 0.8;
};

struct OptimizationPair {
    SubmissionRecord before;
    SubmissionRecord after;
    bool improves_time = false;
    bool improves_memory = false;
    std::size_t changed_lines = 0;
    double changed_fraction = 0.0;
    double similarity = 0.0;

    /// Key for evaluation stages: "<origin>:<before submission id>".
    std::string program_id() const;
};

/// Counts at each stage of the mining funnel. Every consecutive pair is
/// counted under the first stage it fails, or as kept.
struct MiningReport {
    std::size_t records = 0;
    std::size_t groups = 0;
    std::size_t consecutive_pairs = 0;
    std::size_t same_timestamp = 0;
    std::size_t not_improving = 0;
    std::size_t identical_text = 0;
    std::size_t too_many_lines = 0;
    std::size_t too_large_fraction = 0;
    std::size_t low_similarity = 0;
    std::size_t kept = 0;
};

struct MiningResult {
    std::vector<OptimizationPair> pairs;
    MiningReport report;
};

/// Groups by (origin, author, problem), orders each group by creation time
/// (ties by submission id), and keeps consecutive pairs whose later program
/// strictly improves time or memory and passes the change and similarity
/// filters. Output order is deterministic and independent of input order.
MiningResult mine_pairs(std::vector<SubmissionRecord> records, const CurationFilters& filters = {});

struct SplitSizes {
    std::size_t train = 0;
    std::size_t valid = 0;
    std::size_t test = 0;

    std::size_t total() const { return train + valid + test; }
};

class InsufficientPairs : public Error {
public:
    using Error::Error;
};

struct DatasetSplit {
    std::vector<OptimizationPair> train;
    std::vector<OptimizationPair> valid;
    std::vector<OptimizationPair> test;
    std::uint64_t seed = 0;
    /// Pairs left out because their leakage component did not fit.
    std::size_t unused = 0;
};

/// Proportions 312876 / 1000 / 559 of the reference dataset, applied to
/// `pair_count` with rounding; train takes the remainder.
SplitSizes default_split_sizes(std::size_t pair_count);

/// Seeded, platform-independent shuffle. Pairs sharing an (origin, author,
/// problem) group or an identical `before` text form one component, and
/// components are never divided between splits. Components are taken in
/// shuffled order and placed into the first of test, valid, train with room.
/// Throws InsufficientPairs when the sizes exceed the pair count.
DatasetSplit split(std::vector<OptimizationPair> pairs, std::uint64_t seed, SplitSizes sizes);

nlohmann::json to_json(const OptimizationPair& pair);
nlohmann::json to_json(const IngestReport& report);
nlohmann::json to_json(const MiningReport& report);

} // namespace optforge
