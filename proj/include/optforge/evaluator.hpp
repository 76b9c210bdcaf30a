#pragma once

#include "optforge/curator.hpp"
#include "optforge/error.hpp"
#include "optforge/generator.hpp"

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace optforge {

enum class Verdict { Accepted, CompileError, WrongAnswer, TimeLimit, MemoryLimit, RuntimeError };

std::string_view to_string(Verdict verdict);
Verdict parse_verdict(std::string_view text);

enum class Dimension { Time, Memory };

std::string_view to_string(Dimension dimension);

/// Judge result for one submitted candidate. Measurements of non-accepted
/// candidates are ignored.
struct EvalOutcome {
    std::string program_id;
    std::size_t candidate_index = 0;
    Verdict verdict = Verdict::Accepted;
    std::int64_t cpu_time = 0;
    std::int64_t memory = 0;
    Origin origin = Origin::Codeforces;
};

/// Accepts `memory_bytes` in place of `memory`, floored to kilobytes. The
/// origin is optional; scoring uses the baseline's origin.
EvalOutcome outcome_from_json(const nlohmann::json& object);
nlohmann::json to_json(const EvalOutcome& outcome);

/// Measurements of the original submission a candidate is compared against.
struct Baseline {
    Origin origin = Origin::Codeforces;
    std::int64_t cpu_time = 0;
    std::int64_t memory = 0;
};

using Baselines = std::map<std::string, Baseline, std::less<>>;

/// Width of the judge's timing granularity in milliseconds.
inline constexpr std::int64_t kTimeBlockMs = 16;

/// floor(t / 16) + 1: 0..15 ms is block 1, 16..31 ms block 2.
std::int64_t time_block(std::int64_t t_ms);

/// old / new, with times on Codeforces compared by block number. 0/0 is 1.0
/// and x/0 for x > 0 is +infinity.
double performance_improvement(std::int64_t old_value, std::int64_t new_value, Dimension dimension,
                               Origin origin);

struct ScoreConfig {
    double pi_threshold = 1.2;
    /// Infinite improvements enter means as this value.
    double pi_ceiling = 100.0;
};

class UnknownProgram : public Error {
public:
    using Error::Error;
};

class DanglingOutcome : public Error {
public:
    using Error::Error;
};

struct DimensionMetrics {
    std::size_t program_count = 0;
    std::size_t opt_count = 0;
    /// Percentage in [0, 100].
    double opt_percent = 0.0;
    /// Mean best improvement over optimized programs only; 0 when none.
    double mean_pi = 0.0;
};

struct OriginMetrics {
    DimensionMetrics time;
    DimensionMetrics memory;
};

struct ProgramBest {
    std::string program_id;
    Origin origin = Origin::Codeforces;
    std::optional<double> time_pi;
    std::optional<std::size_t> time_candidate;
    bool time_optimized = false;
    std::optional<double> memory_pi;
    std::optional<std::size_t> memory_candidate;
    bool memory_optimized = false;
};

/// Candidate accounting past the similarity gate.
struct OutcomeBreakdown {
    std::size_t submitted = 0;
    std::size_t accepted = 0;
    /// Accepted and strictly better in time or memory.
    std::size_t improved = 0;
    /// Accepted and at or above the threshold in time or memory.
    std::size_t optimized = 0;
};

struct MetricsReport {
    double pi_threshold = 1.2;
    /// One entry per origin present in the baselines, plus "all".
    std::map<std::string, OriginMetrics> by_origin;
    std::vector<ProgramBest> programs;
    OutcomeBreakdown breakdown;
};

/// The baselines define the test set. For every program and dimension the
/// best improvement over its accepted, eligible candidates is kept; the
/// program is optimized when that best value reaches the threshold. Programs
/// without an accepted candidate count as not optimized. Throws UnknownProgram
/// when a candidate or outcome names a program outside the baselines, and
/// DanglingOutcome when an outcome has no eligible candidate or repeats one.
MetricsReport score(std::span<const EvalOutcome> outcomes, std::span<const Candidate> candidates,
                    const Baselines& baselines, const ScoreConfig& config = {});

struct SweepPoint {
    double threshold = 0.0;
    double opt_percent_time = 0.0;
    double opt_percent_memory = 0.0;
};

/// Re-gates candidates at each similarity threshold and recomputes %OPT over
/// all test programs. A candidate is eligible at t when it has a patched text
/// and similarity >= t. Outcomes of candidates that are not eligible at t are
/// left out for that threshold.
std::vector<SweepPoint> sweep_similarity(std::span<const EvalOutcome> outcomes,
                                         std::span<const Candidate> candidates,
                                         const Baselines& baselines, std::span<const double> thresholds,
                                         const ScoreConfig& config = {});

nlohmann::json to_json(const MetricsReport& report);
std::string sweep_csv(std::span<const SweepPoint> points);

} // namespace optforge
