#include "optforge/cli.hpp"

#include "optforge/canonicalizer.hpp"
#include "optforge/curator.hpp"
#include "optforge/diffrep.hpp"
#include "optforge/evaluator.hpp"
#include "optforge/generator.hpp"
#include "optforge/patcher.hpp"
#include "optforge/programs.hpp"
#include "optforge/similarity.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>

namespace optforge::cli {

using nlohmann::json;
namespace fs = std::filesystem;

ToolConfig load_config(const std::optional<std::string>& config_path, const EnvLookup& env)
{
    ToolConfig config;
    std::optional<std::string> path = config_path;
    if (!path)
        path = env("OPTFORGE_CONFIG");
    if (path && !path->empty())
        apply_config_file(config, fs::path(*path));
    apply_environment(config, env);
    return config;
}

namespace {

struct Flags {
    std::optional<std::string> config;
    std::optional<double> threshold;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> samples;
    std::optional<std::string> backend;
    std::optional<double> pi_threshold;
    std::optional<std::string> replay;
};

ToolConfig resolve(const Flags& flags, const EnvLookup& env)
{
    ToolConfig config = load_config(flags.config, env);
    if (flags.threshold)
        config.similarity_threshold = *flags.threshold;
    if (flags.seed)
        config.seed = *flags.seed;
    if (flags.samples)
        config.backend.samples_per_program = *flags.samples;
    if (flags.backend)
        config.backend.mode = parse_backend_mode(*flags.backend);
    if (flags.pi_threshold)
        config.pi_threshold = *flags.pi_threshold;
    if (flags.replay) {
        config.backend.replay_path = *flags.replay;
        if (!flags.backend)
            config.backend.mode = BackendMode::Replay;
    }
    validate(config);
    return config;
}

std::string dump_line(const json& value)
{
    return value.dump(-1, ' ', false, json::error_handler_t::replace);
}

std::string dump_pretty(const json& value)
{
    return value.dump(2, ' ', false, json::error_handler_t::replace) + "\n";
}

std::string read_text(const std::string& path, std::istream& in)
{
    if (path.empty() || path == "-")
        return std::string(std::istreambuf_iterator<char>(in), {});
    std::ifstream file(path, std::ios::binary);
    if (!file)
        throw Error("cannot read '" + path + "'");
    return std::string(std::istreambuf_iterator<char>(file), {});
}

std::vector<json> read_records(const std::string& path, std::istream& in)
{
    if (path.empty() || path == "-")
        return read_jsonl(in, "<stdin>");
    std::ifstream file(path, std::ios::binary);
    if (!file)
        throw Error("cannot read '" + path + "'");
    return read_jsonl(file, path);
}

/// Writes to the --out file when one was given, otherwise to `out`.
class Sink {
public:
    Sink(const std::string& path, std::ostream& out) : stream_(&out), path_(path)
    {
        if (path.empty() || path == "-")
            return;
        file_.open(path, std::ios::binary | std::ios::trunc);
        if (!file_)
            throw Error("cannot write '" + path + "'");
        stream_ = &file_;
    }

    std::ostream& stream() { return *stream_; }

    void close()
    {
        stream_->flush();
        if (!*stream_)
            throw Error("write failed" + (path_.empty() ? std::string() : " for '" + path_ + "'"));
    }

private:
    std::ofstream file_;
    std::ostream* stream_;
    std::string path_;
};

void write_file(const fs::path& path, const std::string& content)
{
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file)
        throw Error("cannot write '" + path.string() + "'");
    file << content;
    file.flush();
    if (!file)
        throw Error("write failed for '" + path.string() + "'");
}

/// Programs in input order, canonicalized. Canonicalization is idempotent so
/// already canonical input passes through unchanged.
std::vector<TestProgram> load_programs(const std::string& path, std::istream& in, const ToolConfig& config,
                                       std::ostream& err)
{
    std::vector<TestProgram> programs;
    for (const auto& record : read_records(path, in)) {
        TestProgram p = program_from_json(record);
        CanonicalizeDiagnostics diag;
        p.unit = canonicalize(p.unit, config.formatter, &diag);
        if (diag.unterminated_block_comment)
            err << "warning: " << p.unit.id << ": unterminated block comment\n";
        if (diag.lossy_utf8)
            err << "warning: " << p.unit.id << ": invalid UTF-8 replaced\n";
        if (diag.external_formatter_failed)
            err << "warning: " << p.unit.id << ": external formatter failed, builtin used\n";
        programs.push_back(std::move(p));
    }
    baselines_of(programs);
    return programs;
}

std::vector<Candidate> load_candidates(const std::string& path, std::istream& in)
{
    std::vector<Candidate> candidates;
    for (const auto& record : read_records(path, in)) {
        try {
            candidates.push_back(candidate_from_json(record));
        } catch (const json::exception& e) {
            throw Error(std::string("invalid candidate record: ") + e.what());
        }
    }
    return candidates;
}

std::vector<EvalOutcome> load_outcomes(const std::string& path, std::istream& in)
{
    std::vector<EvalOutcome> outcomes;
    for (const auto& record : read_records(path, in)) {
        try {
            outcomes.push_back(outcome_from_json(record));
        } catch (const json::exception& e) {
            throw Error(std::string("invalid outcome record: ") + e.what());
        }
    }
    return outcomes;
}

json raw_record(const std::string& program_id, std::size_t index, CandidateKind kind, const RawOutput& raw)
{
    json record{{"program_id", program_id},
                {"index", index},
                {"kind", to_string(kind)},
                {"raw_output", raw.text},
                {"failed", raw.failed},
                {"fence_missing", raw.fence_missing},
                {"attempts", raw.attempts}};
    if (!raw.error.empty())
        record["error"] = raw.error;
    return record;
}

std::vector<json> generate_records(const std::vector<TestProgram>& programs, const ToolConfig& config)
{
    std::vector<SourceUnit> units;
    units.reserve(programs.size());
    for (const auto& p : programs)
        units.push_back(p.unit);
    CandidateGenerator generator(config.backend);
    auto outputs = generator.generate_all(units);
    std::vector<json> records;
    for (std::size_t i = 0; i < units.size(); ++i)
        for (std::size_t k = 0; k < outputs[i].size(); ++k)
            records.push_back(raw_record(units[i].id, k, config.backend.output_kind, outputs[i][k]));
    return records;
}

std::vector<Candidate> gate_records(const std::vector<TestProgram>& programs, const std::vector<json>& raws,
                                    double threshold)
{
    std::map<std::string, const SourceUnit*, std::less<>> units;
    for (const auto& p : programs)
        units.emplace(p.unit.id, &p.unit);

    std::vector<Candidate> candidates;
    candidates.reserve(raws.size());
    for (const auto& raw : raws) {
        std::string id;
        std::size_t index = 0;
        CandidateKind kind = CandidateKind::DiffOutput;
        std::string text;
        bool failed = false;
        std::string error;
        try {
            id = raw.at("program_id").get<std::string>();
            index = raw.at("index").get<std::size_t>();
            kind = parse_candidate_kind(raw.value("kind", std::string("diff")));
            text = raw.value("raw_output", std::string());
            failed = raw.value("failed", false);
            error = raw.value("error", std::string());
        } catch (const json::exception& e) {
            throw Error(std::string("invalid raw output record: ") + e.what());
        }
        auto unit = units.find(id);
        if (unit == units.end())
            throw UnknownProgram("raw output for unknown program '" + id + "'");
        if (failed) {
            Candidate c;
            c.program_id = id;
            c.index = index;
            c.kind = kind;
            c.status = CandidateStatus::Malformed;
            c.detail = "generation failed" + (error.empty() ? std::string() : ": " + error);
            candidates.push_back(std::move(c));
            continue;
        }
        candidates.push_back(gate(*unit->second, text, kind, threshold, index));
    }
    return candidates;
}

std::string candidates_jsonl(const std::vector<Candidate>& candidates)
{
    std::string text;
    for (const auto& c : candidates)
        text += dump_line(to_json(c)) + "\n";
    return text;
}

std::vector<double> parse_thresholds(const std::string& text)
{
    std::vector<double> values;
    if (text.empty()) {
        for (int i = 0; i <= 20; ++i)
            values.push_back(i / 20.0);
        return values;
    }
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        std::size_t used = 0;
        double value = 0.0;
        try {
            value = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size())
            throw Error("invalid threshold '" + item + "'");
        values.push_back(value);
    }
    return values;
}

SplitSizes parse_sizes(const std::string& text)
{
    std::vector<std::size_t> values;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        std::size_t used = 0;
        std::size_t value = 0;
        try {
            value = std::stoull(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size() || item.front() == '-')
            throw Error("invalid split size '" + item + "'");
        values.push_back(value);
    }
    if (values.size() != 3)
        throw Error("--sizes takes train,valid,test");
    return {values[0], values[1], values[2]};
}

std::string pairs_jsonl(const std::vector<OptimizationPair>& pairs)
{
    std::string text;
    for (const auto& p : pairs)
        text += dump_line(to_json(p)) + "\n";
    return text;
}

} // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err,
        const EnvLookup& env)
{
    CLI::App app{"Source optimization dataset and evaluation tools", "optforge"};
    app.require_subcommand(1);
    app.fallthrough();

    Flags flags;
    app.add_option("--config", flags.config, "JSON config file (default: $OPTFORGE_CONFIG)");
    app.add_option("--threshold", flags.threshold, "Similarity threshold");
    app.add_option("--seed", flags.seed, "Split seed");
    app.add_option("--samples", flags.samples, "Candidates per program");
    app.add_option("--backend", flags.backend, "Generator backend: replay, command or http");
    app.add_option("--pi-threshold", flags.pi_threshold, "Minimum improvement counted as optimized");

    std::string out_path;
    std::string input_path;

    auto* canon = app.add_subcommand("canonicalize", "Strip comments and normalize layout");
    bool jsonl = false;
    std::string language = "C++";
    canon->add_option("input", input_path, "Source file or JSONL programs (default: stdin)");
    canon->add_flag("--jsonl", jsonl, "Input is JSONL program records");
    canon->add_option("--language", language, "C or C++ for a single source");
    canon->add_option("--out", out_path, "Output file");

    auto* sim = app.add_subcommand("similarity", "Similarity of a candidate to an original");
    std::string original_path, candidate_path;
    sim->add_option("original", original_path, "Original source")->required();
    sim->add_option("candidate", candidate_path, "Candidate source")->required();
    sim->add_option("--out", out_path, "Output file");

    auto* diff = app.add_subcommand("diff", "Diff script turning one program into another");
    std::string before_path, after_path;
    bool raw_text = false;
    diff->add_option("--before", before_path, "Original program")->required();
    diff->add_option("--after", after_path, "Improved program")->required();
    diff->add_flag("--no-canonicalize", raw_text, "Diff the files as given");
    diff->add_option("--out", out_path, "Output file");

    auto* apply_cmd = app.add_subcommand("apply", "Apply a diff script to a program");
    std::string diff_path;
    apply_cmd->add_option("--diff", diff_path, "Diff script")->required();
    apply_cmd->add_option("--original", original_path, "Original program")->required();
    apply_cmd->add_flag("--no-canonicalize", raw_text, "Patch the original as given");
    apply_cmd->add_option("--out", out_path, "Output file");

    auto* curate = app.add_subcommand("curate", "Mine optimization pairs and split them");
    std::string sizes_text;
    curate->add_option("--in", input_path, "Submission corpus JSONL")->required();
    curate->add_option("--out", out_path, "Output directory")->required();
    curate->add_option("--sizes", sizes_text, "train,valid,test sizes");

    auto* generate_cmd = app.add_subcommand("generate", "Produce raw candidates for programs");
    generate_cmd->add_option("--programs", input_path, "Program JSONL (default: stdin)");
    generate_cmd->add_option("--replay", flags.replay, "Replay file; implies --backend replay");
    generate_cmd->add_option("--out", out_path, "Output file");

    auto* gate_cmd = app.add_subcommand("gate", "Parse, apply and similarity-gate raw candidates");
    std::string programs_path, ledger_path;
    gate_cmd->add_option("--programs", programs_path, "Program JSONL")->required();
    gate_cmd->add_option("--raw", input_path, "Raw output JSONL (default: stdin)");
    gate_cmd->add_option("--ledger", ledger_path, "Write the status breakdown here");
    gate_cmd->add_option("--out", out_path, "Output file");

    auto* score_cmd = app.add_subcommand("score", "Compute metrics from judge outcomes");
    std::string outcomes_path;
    score_cmd->add_option("--programs", programs_path, "Program JSONL")->required();
    score_cmd->add_option("--candidates", input_path, "Candidate JSONL (default: stdin)");
    score_cmd->add_option("--outcomes", outcomes_path, "Outcome JSONL")->required();
    score_cmd->add_option("--out", out_path, "Output file");

    auto* sweep_cmd = app.add_subcommand("sweep", "Optimized share across similarity thresholds");
    std::string thresholds_text;
    sweep_cmd->add_option("--programs", programs_path, "Program JSONL")->required();
    sweep_cmd->add_option("--candidates", input_path, "Candidate JSONL (default: stdin)");
    sweep_cmd->add_option("--outcomes", outcomes_path, "Outcome JSONL")->required();
    sweep_cmd->add_option("--thresholds", thresholds_text, "Comma-separated thresholds (default 0,0.05,...,1)");
    sweep_cmd->add_option("--out", out_path, "Output file");

    auto* evaluate_cmd = app.add_subcommand("evaluate", "canonicalize, generate, gate and score in one run");
    evaluate_cmd->add_option("--programs", programs_path, "Program JSONL")->required();
    evaluate_cmd->add_option("--outcomes", outcomes_path, "Outcome JSONL");
    evaluate_cmd->add_option("--replay", flags.replay, "Replay file; implies --backend replay");
    evaluate_cmd->add_option("--out", out_path, "Output directory")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        auto chosen = app.get_subcommands();
        err << (chosen.empty() ? app.help() : chosen.front()->help());
        return kExitUsage;
    }

    try {
        ToolConfig config = resolve(flags, env);

        if (canon->parsed()) {
            Sink sink(out_path, out);
            if (jsonl) {
                std::istringstream copy(read_text(input_path, in));
                for (const auto& p : load_programs("-", copy, config, err))
                    sink.stream() << dump_line(to_json(p)) << "\n";
            } else {
                SourceUnit unit{input_path, parse_language(language), read_text(input_path, in)};
                CanonicalizeDiagnostics diag;
                unit = canonicalize(unit, config.formatter, &diag);
                if (diag.unterminated_block_comment)
                    err << "warning: unterminated block comment\n";
                if (diag.lossy_utf8)
                    err << "warning: invalid UTF-8 replaced\n";
                if (diag.external_formatter_failed)
                    err << "warning: external formatter failed, builtin used\n";
                sink.stream() << unit.text;
            }
            sink.close();
        } else if (sim->parsed()) {
            std::string a = read_text(original_path, in);
            std::string b = read_text(candidate_path, in);
            double r = ratio(a, b);
            Sink sink(out_path, out);
            sink.stream() << dump_line(json{{"ratio", r},
                                            {"threshold", config.similarity_threshold},
                                            {"passes", r >= config.similarity_threshold}})
                          << "\n";
            sink.close();
        } else if (diff->parsed()) {
            SourceUnit before{before_path, Language::Cpp, read_text(before_path, in)};
            SourceUnit after{after_path, Language::Cpp, read_text(after_path, in)};
            if (!raw_text) {
                before = canonicalize(before, config.formatter);
                after = canonicalize(after, config.formatter);
            }
            std::string rendered = render(synthesize(before, after));
            Sink sink(out_path, out);
            sink.stream() << rendered;
            sink.close();
        } else if (apply_cmd->parsed()) {
            DiffScript script = parse(read_text(diff_path, in));
            SourceUnit original{original_path, Language::Cpp, read_text(original_path, in)};
            if (!raw_text)
                original = canonicalize(original, config.formatter);
            PatchResult result = optforge::apply(script, original);
            if (!result.applied()) {
                err << "error: hunk " << result.hunk_index << " did not match the original\n";
                return kExitFatal;
            }
            Sink sink(out_path, out);
            sink.stream() << *result.output;
            sink.close();
        } else if (curate->parsed()) {
            IngestResult ingested = ingest(fs::path(input_path), config.formatter);
            for (const auto& d : ingested.report.invalid)
                err << "warning: " << input_path << ":" << d.line << ": " << d.message << "\n";
            MiningResult mined = mine_pairs(std::move(ingested.records), config.filters());
            SplitSizes sizes = !sizes_text.empty()  ? parse_sizes(sizes_text)
                               : config.split_sizes ? *config.split_sizes
                                                    : default_split_sizes(mined.pairs.size());
            DatasetSplit parts = split(std::move(mined.pairs), config.seed, sizes);

            fs::path dir(out_path);
            std::error_code ec;
            fs::create_directories(dir, ec);
            if (ec)
                throw Error("cannot create '" + dir.string() + "': " + ec.message());
            write_file(dir / "train.jsonl", pairs_jsonl(parts.train));
            write_file(dir / "valid.jsonl", pairs_jsonl(parts.valid));
            write_file(dir / "test.jsonl", pairs_jsonl(parts.test));
            json report{{"ingest", to_json(ingested.report)},
                        {"funnel", to_json(mined.report)},
                        {"seed", parts.seed},
                        {"split",
                         {{"train", parts.train.size()},
                          {"valid", parts.valid.size()},
                          {"test", parts.test.size()},
                          {"unused", parts.unused}}},
                        {"filters",
                         {{"max_changed_lines", config.max_changed_lines},
                          {"max_changed_fraction", config.max_changed_fraction},
                          {"min_similarity", config.similarity_threshold}}}};
            write_file(dir / "mining_report.json", dump_pretty(report));
            err << "seed " << parts.seed << ": " << parts.train.size() << " train, " << parts.valid.size()
                << " valid, " << parts.test.size() << " test\n";
        } else if (generate_cmd->parsed()) {
            auto programs = load_programs(input_path, in, config, err);
            auto records = generate_records(programs, config);
            Sink sink(out_path, out);
            for (const auto& record : records)
                sink.stream() << dump_line(record) << "\n";
            sink.close();
        } else if (gate_cmd->parsed()) {
            auto programs = load_programs(programs_path, in, config, err);
            auto candidates = gate_records(programs, read_records(input_path, in), config.similarity_threshold);
            Sink sink(out_path, out);
            sink.stream() << candidates_jsonl(candidates);
            sink.close();
            BreakdownReport report = ledger(candidates);
            if (!ledger_path.empty())
                write_file(ledger_path, dump_pretty(to_json(report)));
            err << report.total << " candidates: " << report.malformed << " malformed, " << report.apply_failed
                << " apply failed, " << report.rejected_similarity << " below similarity, " << report.eligible
                << " eligible\n";
        } else if (score_cmd->parsed()) {
            auto programs = load_programs(programs_path, in, config, err);
            auto candidates = load_candidates(input_path, in);
            auto outcomes = load_outcomes(outcomes_path, in);
            MetricsReport report = score(outcomes, candidates, baselines_of(programs), config.score_config());
            Sink sink(out_path, out);
            sink.stream() << dump_pretty(to_json(report));
            sink.close();
        } else if (sweep_cmd->parsed()) {
            auto programs = load_programs(programs_path, in, config, err);
            auto candidates = load_candidates(input_path, in);
            auto outcomes = load_outcomes(outcomes_path, in);
            auto thresholds = parse_thresholds(thresholds_text);
            auto curve =
                sweep_similarity(outcomes, candidates, baselines_of(programs), thresholds, config.score_config());
            Sink sink(out_path, out);
            sink.stream() << sweep_csv(curve);
            sink.close();
        } else if (evaluate_cmd->parsed()) {
            auto programs = load_programs(programs_path, in, config, err);
            auto raws = generate_records(programs, config);
            auto candidates = gate_records(programs, raws, config.similarity_threshold);

            fs::path dir(out_path);
            std::error_code ec;
            fs::create_directories(dir, ec);
            if (ec)
                throw Error("cannot create '" + dir.string() + "': " + ec.message());
            std::string raw_text_out;
            for (const auto& record : raws)
                raw_text_out += dump_line(record) + "\n";
            write_file(dir / "raw.jsonl", raw_text_out);
            write_file(dir / "candidates.jsonl", candidates_jsonl(candidates));
            write_file(dir / "ledger.json", dump_pretty(to_json(ledger(candidates))));
            if (!outcomes_path.empty()) {
                auto outcomes = load_outcomes(outcomes_path, in);
                MetricsReport report =
                    score(outcomes, candidates, baselines_of(programs), config.score_config());
                write_file(dir / "metrics.json", dump_pretty(to_json(report)));
            }
        }
    } catch (const MalformedDiff& e) {
        err << "error: malformed diff (" << to_string(e.reason()) << "): " << e.what() << "\n";
        return kExitFatal;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFatal;
    }
    return kExitOk;
}

} // namespace optforge::cli
