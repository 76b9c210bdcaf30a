// Runs the eight acceptance checks and prints one PASS/FAIL line for each.

#include "optforge/canonicalizer.hpp"
#include "optforge/curator.hpp"
#include "optforge/diffrep.hpp"
#include "optforge/evaluator.hpp"
#include "optforge/generator.hpp"
#include "optforge/patcher.hpp"
#include "optforge/programs.hpp"
#include "optforge/similarity.hpp"

#include "fixtures.hpp"
#include "random_pairs.hpp"
#include "random_programs.hpp"
#include "random_sources.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

using namespace optforge;
using nlohmann::json;
using testsupport::fixture;
using testsupport::read_file;

namespace {

struct Failure {
    std::string what;
};

void expect(bool ok, const std::string& what)
{
    if (!ok)
        throw Failure{what};
}

struct Criterion {
    const char* name;
    double budget_seconds;
    std::function<void()> body;
};

std::vector<TestProgram> programs_from(const std::string& name)
{
    std::ifstream in(fixture(name));
    auto programs = read_programs(in, name);
    for (auto& p : programs)
        p.unit = canonicalize(p.unit);
    return programs;
}

void listings_end_to_end()
{
    auto load = [](const char* name) {
        return canonicalize(SourceUnit{name, Language::Cpp, read_file(fixture(std::string("listings/") + name))});
    };
    SourceUnit original = load("original.cpp");
    SourceUnit improved = load("improved.cpp");
    auto script = synthesize(original, improved);
    expect(render(script) == read_file(fixture("listings/optimization.diff")), "rendered diff differs");
    auto patched = optforge::apply(parse(render(script)), original);
    expect(patched.applied(), "diff did not apply");
    expect(*patched.output == improved.text, "patched program differs");
    expect(*patched.output == read_file(fixture("listings/improved.cpp")), "improved listing is not canonical");
}

void round_trip()
{
    for (std::uint64_t i = 0; i < 1000; ++i) {
        auto [before, after] = testsupport::make_program_pair(i);
        auto result = optforge::apply(synthesize(before, after), before);
        expect(result.applied() && *result.output == after, "pair " + std::to_string(i) + " failed");
    }
}

void similarity_oracle()
{
    expect(ratio("abcd", "bcde") == 0.75, "ratio(abcd, bcde) != 0.75");
    std::istringstream lines(read_file(fixture("similarity_reference.txt")));
    std::uint64_t index = 0;
    std::size_t la = 0, lb = 0;
    double want = 0.0;
    std::size_t checked = 0;
    while (lines >> index >> la >> lb >> want) {
        auto [a, b] = testsupport::make_pair(index);
        expect(a.size() == la && b.size() == lb, "pair " + std::to_string(index) + " generated differently");
        expect(std::abs(ratio(a, b) - want) <= 1e-9, "pair " + std::to_string(index) + " disagrees");
        ++checked;
    }
    expect(checked == testsupport::kReferencePairCount, "reference has " + std::to_string(checked) + " pairs");
}

void curation_filters()
{
    auto want = json::parse(read_file(fixture("curation/expected.json")));
    auto ingested = ingest(fixture("curation/submissions.jsonl"));
    expect(ingested.report.lines_read == 50, "fixture is not 50 records");
    expect(ingested.report.duplicates == want["duplicates"].get<std::size_t>(), "duplicate count");
    auto mined = mine_pairs(std::move(ingested.records));
    expect(to_json(mined.report) == want["funnel"], "funnel " + to_json(mined.report).dump());
    expect(mined.pairs.size() == want["kept"].size(), "kept pair count");
    for (std::size_t i = 0; i < mined.pairs.size(); ++i) {
        const auto& row = want["kept"][i];
        const auto& got = mined.pairs[i];
        expect(got.before.submission_id == row["before"] && got.after.submission_id == row["after"],
               "kept pair " + std::to_string(i));
        expect(got.changed_lines == row["changed_lines"].get<std::size_t>(), "changed lines " + std::to_string(i));
        expect(std::abs(got.similarity - row["similarity"].get<double>()) <= 1e-12, "similarity " + std::to_string(i));
    }
}

void metrics_fixture()
{
    auto want = json::parse(read_file(fixture("metrics/expected.json")));
    auto programs = programs_from("metrics/programs.jsonl");
    GeneratorBackend backend;
    backend.replay_path = fixture("metrics/replay.jsonl");
    backend.samples_per_program = want["samples"];
    CandidateGenerator generator(backend);
    std::vector<Candidate> candidates;
    for (const auto& p : programs) {
        auto raw = generator.generate(p.unit);
        for (std::size_t k = 0; k < raw.size(); ++k) {
            candidates.push_back(gate(p.unit, raw[k].text, CandidateKind::DiffOutput, 0.8, k));
            candidates.back().program_id = p.unit.id;
        }
    }
    expect(candidates.size() == want["candidates"].size(), "candidate count");
    for (std::size_t i = 0; i < candidates.size(); ++i)
        expect(to_string(candidates[i].status) == want["candidates"][i]["status"].get<std::string>(),
               "status of candidate " + std::to_string(i));

    std::ifstream in(fixture("metrics/outcomes.jsonl"));
    std::vector<EvalOutcome> outcomes;
    for (const auto& j : read_jsonl(in, "outcomes.jsonl"))
        outcomes.push_back(outcome_from_json(j));
    auto report = score(outcomes, candidates, baselines_of(programs));
    expect(to_json(report) == want["metrics"], "report differs");

    auto row = [&](const std::string& id) {
        for (const auto& p : report.programs)
            if (p.program_id == id)
                return p;
        throw Failure{"no row for " + id};
    };
    expect(*row("P01").time_pi == 10.0 / 7.0, "144 -> 97 ms is not 10/7");
    expect(*row("P02").time_pi == 1.0, "15 -> 0 ms is not 1.0");
    expect(!row("P03").memory_optimized, "11136 B -> 10660 B counted as optimized");
}

void candidate_ledger()
{
    auto want = json::parse(read_file(fixture("ledger/expected.json")));
    auto programs = programs_from("ledger/programs.jsonl");
    GeneratorBackend backend;
    backend.replay_path = fixture("ledger/replay.jsonl");
    backend.samples_per_program = want["samples"];
    CandidateGenerator generator(backend);
    std::vector<SourceUnit> units;
    for (const auto& p : programs)
        units.push_back(p.unit);
    auto raw = generator.generate_all(units);
    std::vector<Candidate> candidates;
    for (std::size_t i = 0; i < units.size(); ++i)
        for (std::size_t k = 0; k < raw[i].size(); ++k)
            candidates.push_back(gate(units[i], raw[i][k].text, CandidateKind::DiffOutput, 0.8, k));
    auto report = ledger(candidates);
    auto got = to_json(report);
    for (const char* key : {"malformed", "apply_failed", "rejected_similarity", "eligible", "total"})
        expect(got[key] == want[key], std::string(key) + " = " + got[key].dump());
    expect(report.malformed + report.apply_failed + report.rejected_similarity + report.eligible == report.total,
           "statuses do not partition the input");
    expect(report.postprocess_discarded() == want["postprocess_discarded"].get<std::size_t>(), "discarded");
    expect(report.gated_onward() == want["gated_onward"].get<std::size_t>(), "onward");
}

void similarity_sweep()
{
    std::ifstream programs_in(fixture("sweep/programs.jsonl"));
    auto baselines = baselines_of(read_programs(programs_in, "programs.jsonl"));
    std::ifstream candidates_in(fixture("sweep/candidates.jsonl"));
    std::vector<Candidate> candidates;
    for (const auto& j : read_jsonl(candidates_in, "candidates.jsonl"))
        candidates.push_back(candidate_from_json(j));
    std::ifstream outcomes_in(fixture("sweep/outcomes.jsonl"));
    std::vector<EvalOutcome> outcomes;
    for (const auto& j : read_jsonl(outcomes_in, "outcomes.jsonl"))
        outcomes.push_back(outcome_from_json(j));

    std::vector<double> thresholds;
    for (int i = 0; i <= 100; ++i)
        thresholds.push_back(i / 100.0);
    auto curve = sweep_similarity(outcomes, candidates, baselines, thresholds);
    for (std::size_t i = 1; i < curve.size(); ++i) {
        expect(curve[i].opt_percent_time <= curve[i - 1].opt_percent_time, "time curve rises");
        expect(curve[i].opt_percent_memory <= curve[i - 1].opt_percent_memory, "memory curve rises");
        bool time_step = curve[i].opt_percent_time != curve[i - 1].opt_percent_time;
        bool memory_step = curve[i].opt_percent_memory != curve[i - 1].opt_percent_memory;
        // Steps happen just past a planted similarity: 0.5 for time, 0.9 for both.
        expect(time_step == (i == 51 || i == 91), "unexpected time step at " + std::to_string(curve[i].threshold));
        expect(memory_step == (i == 91), "unexpected memory step at " + std::to_string(curve[i].threshold));
    }
    expect(std::abs(curve.front().opt_percent_time - 200.0 / 3) < 1e-9, "time share at 0");
    expect(curve.back().opt_percent_time == 0.0 && curve.back().opt_percent_memory == 0.0, "shares at 1");
}

void canonicalizer_properties()
{
    for (std::uint64_t i = 0; i < 1000; ++i) {
        auto src = testsupport::make_random_source(i);
        const std::string tag = "source " + std::to_string(i);
        std::string once = canonicalize(SourceUnit{tag, Language::Cpp, src.text}).text;
        expect(canonicalize(SourceUnit{tag, Language::Cpp, once}).text == once, tag + " is not idempotent");
        expect(count_comments(once) == 0, tag + " keeps a comment");
        expect(once.find(testsupport::kCommentSentinel) == std::string::npos, tag + " keeps comment text");
        for (const auto& literal : src.literals)
            expect(once.find(literal) != std::string::npos, tag + " lost a literal");
    }
}

} // namespace

int main()
{
    const std::vector<Criterion> criteria{
        {"1 listings diff end to end", 1.0, listings_end_to_end},
        {"2 diff/patch round trip on 1000 pairs", 30.0, round_trip},
        {"3 similarity matches the reference on 1000 pairs", 60.0, similarity_oracle},
        {"4 curation filters and funnel", 0.0, curation_filters},
        {"5 metrics fixture", 0.0, metrics_fixture},
        {"6 candidate ledger", 0.0, candidate_ledger},
        {"7 similarity sweep", 0.0, similarity_sweep},
        {"8 canonicalizer properties on 1000 sources", 0.0, canonicalizer_properties},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        auto start = std::chrono::steady_clock::now();
        std::string problem;
        try {
            c.body();
        } catch (const Failure& f) {
            problem = f.what;
        } catch (const std::exception& e) {
            problem = std::string("exception: ") + e.what();
        }
        double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (problem.empty() && c.budget_seconds > 0 && seconds >= c.budget_seconds)
            problem = "took longer than " + std::to_string(c.budget_seconds) + " s";
        std::printf("%s AC%s (%.3f s)%s%s\n", problem.empty() ? "PASS" : "FAIL", c.name, seconds,
                    problem.empty() ? "" : ": ", problem.c_str());
        failed += problem.empty() ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
