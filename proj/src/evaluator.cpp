#include "optforge/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

namespace optforge {

using nlohmann::json;

std::string_view to_string(Verdict verdict)
{
    switch (verdict) {
    case Verdict::Accepted:
        return "Accepted";
    case Verdict::CompileError:
        return "CompileError";
    case Verdict::WrongAnswer:
        return "WrongAnswer";
    case Verdict::TimeLimit:
        return "TimeLimit";
    case Verdict::MemoryLimit:
        return "MemoryLimit";
    case Verdict::RuntimeError:
        return "RuntimeError";
    }
    return "Unknown";
}

Verdict parse_verdict(std::string_view text)
{
    for (auto v : {Verdict::Accepted, Verdict::CompileError, Verdict::WrongAnswer, Verdict::TimeLimit,
                   Verdict::MemoryLimit, Verdict::RuntimeError})
        if (to_string(v) == text)
            return v;
    throw Error("unknown verdict '" + std::string(text) + "'");
}

std::string_view to_string(Dimension dimension)
{
    return dimension == Dimension::Time ? "time" : "memory";
}

EvalOutcome outcome_from_json(const json& object)
{
    EvalOutcome o;
    o.program_id = object.at("program_id").get<std::string>();
    o.candidate_index = object.at("candidate_index").get<std::size_t>();
    o.verdict = parse_verdict(object.at("verdict").get<std::string>());
    if (object.contains("origin"))
        o.origin = parse_origin(object.at("origin").get<std::string>());
    o.cpu_time = object.value("cpu_time", std::int64_t{0});
    if (object.contains("memory"))
        o.memory = object.at("memory").get<std::int64_t>();
    else
        o.memory = object.value("memory_bytes", std::int64_t{0}) / 1024;
    if (o.cpu_time < 0 || o.memory < 0)
        throw Error("outcome measurements must be non-negative");
    return o;
}

json to_json(const EvalOutcome& o)
{
    return json{{"program_id", o.program_id}, {"candidate_index", o.candidate_index},
                {"verdict", to_string(o.verdict)}, {"cpu_time", o.cpu_time},
                {"memory", o.memory},         {"origin", to_string(o.origin)}};
}

std::int64_t time_block(std::int64_t t_ms)
{
    if (t_ms < 0)
        throw Error("time must be non-negative");
    return t_ms / kTimeBlockMs + 1;
}

double performance_improvement(std::int64_t old_value, std::int64_t new_value, Dimension dimension,
                               Origin origin)
{
    if (old_value < 0 || new_value < 0)
        throw Error("measurements must be non-negative");
    if (dimension == Dimension::Time && origin == Origin::Codeforces) {
        old_value = time_block(old_value);
        new_value = time_block(new_value);
    }
    if (new_value == 0)
        return old_value == 0 ? 1.0 : std::numeric_limits<double>::infinity();
    return static_cast<double>(old_value) / static_cast<double>(new_value);
}

namespace {

struct CandidateKey {
    std::string program_id;
    std::size_t index;
    auto operator<=>(const CandidateKey&) const = default;
};

struct Best {
    std::optional<double> pi;
    std::optional<std::size_t> candidate;

    void offer(double value, std::size_t index)
    {
        // Lowest index wins ties so the table does not depend on input order.
        if (!pi || value > *pi || (value == *pi && index < *candidate)) {
            pi = value;
            candidate = index;
        }
    }
};

void finish(DimensionMetrics& m, double pi_sum)
{
    m.opt_percent = m.program_count == 0
                        ? 0.0
                        : 100.0 * static_cast<double>(m.opt_count) / static_cast<double>(m.program_count);
    m.mean_pi = m.opt_count == 0 ? 0.0 : pi_sum / static_cast<double>(m.opt_count);
}

} // namespace

MetricsReport score(std::span<const EvalOutcome> outcomes, std::span<const Candidate> candidates,
                    const Baselines& baselines, const ScoreConfig& config)
{
    std::set<CandidateKey> eligible;
    for (const auto& c : candidates) {
        if (!baselines.contains(c.program_id))
            throw UnknownProgram("candidate for unknown program '" + c.program_id + "'");
        if (c.status == CandidateStatus::Eligible)
            eligible.insert({c.program_id, c.index});
    }

    std::map<std::string, std::pair<Best, Best>, std::less<>> best;
    std::set<CandidateKey> seen;
    MetricsReport report;
    report.pi_threshold = config.pi_threshold;

    for (const auto& o : outcomes) {
        auto baseline = baselines.find(o.program_id);
        if (baseline == baselines.end())
            throw UnknownProgram("outcome for unknown program '" + o.program_id + "'");
        CandidateKey key{o.program_id, o.candidate_index};
        if (!eligible.contains(key))
            throw DanglingOutcome("outcome for candidate " + std::to_string(o.candidate_index) +
                                  " of '" + o.program_id + "' has no eligible candidate");
        if (!seen.insert(key).second)
            throw DanglingOutcome("duplicate outcome for candidate " + std::to_string(o.candidate_index) +
                                  " of '" + o.program_id + "'");

        ++report.breakdown.submitted;
        if (o.verdict != Verdict::Accepted)
            continue;
        ++report.breakdown.accepted;

        const Baseline& base = baseline->second;
        double time_pi = performance_improvement(base.cpu_time, o.cpu_time, Dimension::Time, base.origin);
        double memory_pi = performance_improvement(base.memory, o.memory, Dimension::Memory, base.origin);
        if (time_pi > 1.0 || memory_pi > 1.0)
            ++report.breakdown.improved;
        if (time_pi >= config.pi_threshold || memory_pi >= config.pi_threshold)
            ++report.breakdown.optimized;

        auto& [time_best, memory_best] = best[o.program_id];
        time_best.offer(time_pi, o.candidate_index);
        memory_best.offer(memory_pi, o.candidate_index);
    }

    struct Sums {
        double time = 0.0;
        double memory = 0.0;
    };
    std::map<std::string, Sums> sums;
    auto capped = [&](double pi) { return std::min(pi, config.pi_ceiling); };

    for (const auto& [id, base] : baselines) {
        ProgramBest row;
        row.program_id = id;
        row.origin = base.origin;
        if (auto it = best.find(id); it != best.end()) {
            row.time_pi = it->second.first.pi;
            row.time_candidate = it->second.first.candidate;
            row.memory_pi = it->second.second.pi;
            row.memory_candidate = it->second.second.candidate;
        }
        row.time_optimized = row.time_pi && *row.time_pi >= config.pi_threshold;
        row.memory_optimized = row.memory_pi && *row.memory_pi >= config.pi_threshold;

        for (const std::string& bucket : {std::string(to_string(base.origin)), std::string("all")}) {
            OriginMetrics& m = report.by_origin[bucket];
            Sums& s = sums[bucket];
            ++m.time.program_count;
            ++m.memory.program_count;
            if (row.time_optimized) {
                ++m.time.opt_count;
                s.time += capped(*row.time_pi);
            }
            if (row.memory_optimized) {
                ++m.memory.opt_count;
                s.memory += capped(*row.memory_pi);
            }
        }
        report.programs.push_back(std::move(row));
    }
    report.by_origin.try_emplace("all");
    for (auto& [bucket, m] : report.by_origin) {
        finish(m.time, sums[bucket].time);
        finish(m.memory, sums[bucket].memory);
    }
    return report;
}

std::vector<SweepPoint> sweep_similarity(std::span<const EvalOutcome> outcomes,
                                         std::span<const Candidate> candidates,
                                         const Baselines& baselines, std::span<const double> thresholds,
                                         const ScoreConfig& config)
{
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
        if (thresholds[i] < 0.0 || thresholds[i] > 1.0)
            throw Error("sweep thresholds must lie in [0, 1]");
        if (i > 0 && thresholds[i] < thresholds[i - 1])
            throw Error("sweep thresholds must be sorted ascending");
    }

    std::vector<SweepPoint> curve;
    std::vector<Candidate> regated(candidates.begin(), candidates.end());
    for (double t : thresholds) {
        std::set<CandidateKey> eligible;
        for (auto& c : regated) {
            bool passes = c.patched_text && c.similarity && *c.similarity >= t;
            if (c.status == CandidateStatus::Eligible || c.status == CandidateStatus::RejectedSimilarity)
                c.status = passes ? CandidateStatus::Eligible : CandidateStatus::RejectedSimilarity;
            if (c.status == CandidateStatus::Eligible)
                eligible.insert({c.program_id, c.index});
        }
        std::vector<EvalOutcome> kept;
        for (const auto& o : outcomes)
            if (eligible.contains({o.program_id, o.candidate_index}))
                kept.push_back(o);
        MetricsReport report = score(kept, regated, baselines, config);
        const OriginMetrics& all = report.by_origin.at("all");
        curve.push_back({t, all.time.opt_percent, all.memory.opt_percent});
    }
    return curve;
}

namespace {

json pi_value(const std::optional<double>& pi)
{
    if (!pi)
        return nullptr;
    if (std::isinf(*pi))
        return "inf";
    return *pi;
}

json to_json(const DimensionMetrics& m)
{
    return json{{"program_count", m.program_count},
                {"opt_count", m.opt_count},
                {"opt_percent", m.opt_percent},
                {"mean_pi", m.mean_pi}};
}

} // namespace

json to_json(const MetricsReport& report)
{
    json origins = json::object();
    for (const auto& [bucket, m] : report.by_origin)
        origins[bucket] = json{{"time", to_json(m.time)}, {"memory", to_json(m.memory)}};

    json programs = json::array();
    for (const auto& row : report.programs) {
        auto index = [](const std::optional<std::size_t>& i) { return i ? json(*i) : json(nullptr); };
        programs.push_back(json{{"program_id", row.program_id},
                                {"origin", to_string(row.origin)},
                                {"time_pi", pi_value(row.time_pi)},
                                {"time_candidate", index(row.time_candidate)},
                                {"time_optimized", row.time_optimized},
                                {"memory_pi", pi_value(row.memory_pi)},
                                {"memory_candidate", index(row.memory_candidate)},
                                {"memory_optimized", row.memory_optimized}});
    }
    return json{{"pi_threshold", report.pi_threshold},
                {"by_origin", origins},
                {"programs", programs},
                {"breakdown",
                 {{"submitted", report.breakdown.submitted},
                  {"accepted", report.breakdown.accepted},
                  {"improved", report.breakdown.improved},
                  {"optimized", report.breakdown.optimized}}}};
}

std::string sweep_csv(std::span<const SweepPoint> points)
{
    std::ostringstream out;
    out << "threshold,opt_percent_time,opt_percent_memory\n";
    char line[128];
    for (const auto& p : points) {
        std::snprintf(line, sizeof line, "%.6g,%.6f,%.6f\n", p.threshold, p.opt_percent_time,
                      p.opt_percent_memory);
        out << line;
    }
    return out.str();
}

} // namespace optforge
