#include "optforge/generator.hpp"

#include "optforge/diffrep.hpp"
#include "optforge/patcher.hpp"
#include "optforge/similarity.hpp"
#include "optforge/subprocess.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <thread>

namespace optforge {

using nlohmann::json;

std::string_view to_string(CandidateKind kind)
{
    return kind == CandidateKind::DiffOutput ? "diff" : "full";
}

std::string_view to_string(CandidateStatus status)
{
    switch (status) {
    case CandidateStatus::Malformed:
        return "Malformed";
    case CandidateStatus::ApplyFailed:
        return "ApplyFailed";
    case CandidateStatus::RejectedSimilarity:
        return "RejectedSimilarity";
    case CandidateStatus::Eligible:
        return "Eligible";
    }
    return "Unknown";
}

CandidateKind parse_candidate_kind(std::string_view text)
{
    if (text == "diff" || text == "DiffOutput")
        return CandidateKind::DiffOutput;
    if (text == "full" || text == "FullProgram")
        return CandidateKind::FullProgram;
    throw Error("unknown candidate kind '" + std::string(text) + "'");
}

CandidateStatus parse_candidate_status(std::string_view text)
{
    for (auto status : {CandidateStatus::Malformed, CandidateStatus::ApplyFailed,
                        CandidateStatus::RejectedSimilarity, CandidateStatus::Eligible})
        if (to_string(status) == text)
            return status;
    throw Error("unknown candidate status '" + std::string(text) + "'");
}

json to_json(const Candidate& c)
{
    json out{{"program_id", c.program_id},
             {"index", c.index},
             {"kind", to_string(c.kind)},
             {"status", to_string(c.status)},
             {"raw_output", c.raw_output}};
    if (c.patched_text)
        out["patched_text"] = *c.patched_text;
    if (c.similarity)
        out["similarity"] = *c.similarity;
    if (!c.detail.empty())
        out["detail"] = c.detail;
    return out;
}

Candidate candidate_from_json(const json& object)
{
    Candidate c;
    c.program_id = object.at("program_id").get<std::string>();
    c.index = object.at("index").get<std::size_t>();
    c.kind = parse_candidate_kind(object.value("kind", std::string("diff")));
    c.status = parse_candidate_status(object.at("status").get<std::string>());
    c.raw_output = object.value("raw_output", std::string());
    if (auto it = object.find("patched_text"); it != object.end() && !it->is_null())
        c.patched_text = it->get<std::string>();
    if (auto it = object.find("similarity"); it != object.end() && !it->is_null())
        c.similarity = it->get<double>();
    c.detail = object.value("detail", std::string());
    return c;
}

std::string_view to_string(BackendMode mode)
{
    switch (mode) {
    case BackendMode::Replay:
        return "replay";
    case BackendMode::Command:
        return "command";
    case BackendMode::HttpChat:
        return "http";
    }
    return "unknown";
}

BackendMode parse_backend_mode(std::string_view text)
{
    if (text == "replay")
        return BackendMode::Replay;
    if (text == "command")
        return BackendMode::Command;
    if (text == "http" || text == "httpchat" || text == "http_chat")
        return BackendMode::HttpChat;
    throw Error("unknown backend mode '" + std::string(text) + "'");
}

void validate(const GeneratorBackend& backend)
{
    if (backend.samples_per_program < 1)
        throw Error("samples_per_program must be at least 1");
    if (backend.max_attempts < 1)
        throw Error("max_attempts must be at least 1");
    if (backend.concurrency < 1)
        throw Error("concurrency must be at least 1");
    if (backend.mode == BackendMode::Command && backend.command.empty())
        throw Error("command backend needs a command");
    if (backend.mode == BackendMode::HttpChat && backend.endpoint.empty())
        throw Error("http backend needs an endpoint");
    if (!backend.request_params.is_object())
        throw Error("request_params must be a JSON object");
}

FenceExtraction extract_code_block(std::string_view response)
{
    FenceExtraction result;
    std::optional<std::string> first;
    std::size_t pos = 0;
    while (true) {
        std::size_t open = response.find("```", pos);
        if (open == std::string_view::npos)
            break;
        std::size_t body = response.find('\n', open);
        if (body == std::string_view::npos)
            break;
        ++body;
        std::size_t close = response.find("```", body);
        ++result.fence_count;
        std::string_view content = close == std::string_view::npos
                                       ? response.substr(body)
                                       : response.substr(body, close - body);
        if (!first)
            first = std::string(content);
        if (close == std::string_view::npos)
            break;
        pos = close + 3;
    }
    result.code = first ? std::move(*first) : std::string(response);
    return result;
}

json build_chat_request(const GeneratorBackend& backend, std::string_view program_text)
{
    json body = backend.request_params.is_object() ? backend.request_params : json::object();
    body["model"] = backend.model;
    body["messages"] = json::array({
        json{{"role", "system"}, {"content", kOptimizationSystemPrompt}},
        json{{"role", "user"}, {"content", program_text}},
    });
    return body;
}

CandidateGenerator::CandidateGenerator(GeneratorBackend backend)
    : CandidateGenerator(std::move(backend), http_transport())
{
}

CandidateGenerator::CandidateGenerator(GeneratorBackend backend, HttpPost transport)
    : backend_(std::move(backend)), transport_(std::move(transport))
{
    validate(backend_);
    if (backend_.mode != BackendMode::Replay)
        return;
    std::ifstream input(backend_.replay_path, std::ios::binary);
    if (!input)
        throw BackendUnavailable("cannot read replay file '" + backend_.replay_path.string() + "'");
    std::string line;
    std::size_t number = 0;
    while (std::getline(input, line)) {
        ++number;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        try {
            json record = json::parse(line);
            auto& outputs = replay_[record.at("program_id").get<std::string>()];
            for (const auto& output : record.at("outputs"))
                outputs.push_back(output.get<std::string>());
        } catch (const json::exception& e) {
            throw BackendUnavailable("replay file line " + std::to_string(number) + ": " + e.what());
        }
    }
}

namespace {

void backoff(const GeneratorBackend& backend, std::size_t attempt)
{
    auto delay = backend.initial_backoff * (1LL << std::min<std::size_t>(attempt - 1, 16));
    std::this_thread::sleep_for(delay);
}

} // namespace

RawOutput CandidateGenerator::replay_sample(const std::vector<std::string>* outputs,
                                            std::size_t index) const
{
    RawOutput out;
    out.attempts = 1;
    if (index < outputs->size()) {
        out.text = (*outputs)[index];
    } else {
        out.failed = true;
        out.error = "replay file has only " + std::to_string(outputs->size()) + " outputs";
    }
    return out;
}

RawOutput CandidateGenerator::command_sample(const SourceUnit& unit) const
{
    RawOutput out;
    for (std::size_t attempt = 1; attempt <= backend_.max_attempts; ++attempt) {
        out.attempts = attempt;
        try {
            ProcessResult run = run_process(backend_.command, unit.text, backend_.timeout);
            if (run.exit_code == 0 && !run.timed_out) {
                out.text = std::move(run.out);
                out.error.clear();
                return out;
            }
            out.error = run.timed_out ? "command timed out"
                                      : "command exited with status " + std::to_string(run.exit_code);
        } catch (const ProcessError& e) {
            out.error = e.what();
        }
        if (attempt < backend_.max_attempts)
            backoff(backend_, attempt);
    }
    out.failed = true;
    return out;
}

RawOutput CandidateGenerator::chat_sample(const SourceUnit& unit) const
{
    RawOutput out;
    const std::string body = build_chat_request(backend_, unit.text).dump();
    std::string token;
    if (const char* value = std::getenv(backend_.api_key_env.c_str()))
        token = value;

    for (std::size_t attempt = 1; attempt <= backend_.max_attempts; ++attempt) {
        out.attempts = attempt;
        bool retryable = true;
        try {
            auto [status, response] = transport_(backend_.endpoint, body, token, backend_.timeout);
            if (status == 200) {
                json parsed = json::parse(response);
                std::string content = parsed.at("choices").at(0).at("message").at("content").get<std::string>();
                FenceExtraction code = extract_code_block(content);
                out.text = std::move(code.code);
                out.fence_missing = code.fence_count == 0;
                out.error.clear();
                return out;
            }
            out.error = "HTTP status " + std::to_string(status);
            retryable = status == 408 || status == 429 || status >= 500;
        } catch (const json::exception& e) {
            out.error = std::string("unexpected response: ") + e.what();
        } catch (const std::exception& e) {
            out.error = e.what();
        }
        if (!retryable)
            break;
        if (attempt < backend_.max_attempts)
            backoff(backend_, attempt);
    }
    out.failed = true;
    return out;
}

std::vector<RawOutput> CandidateGenerator::generate(const SourceUnit& unit) const
{
    const std::vector<std::string>* replayed = nullptr;
    if (backend_.mode == BackendMode::Replay) {
        auto it = replay_.find(unit.id);
        if (it == replay_.end())
            throw MissingReplayKey("replay file has no outputs for program '" + unit.id + "'");
        replayed = &it->second;
    }

    std::vector<RawOutput> outputs;
    outputs.reserve(backend_.samples_per_program);
    for (std::size_t i = 0; i < backend_.samples_per_program; ++i) {
        switch (backend_.mode) {
        case BackendMode::Replay:
            outputs.push_back(replay_sample(replayed, i));
            break;
        case BackendMode::Command:
            outputs.push_back(command_sample(unit));
            break;
        case BackendMode::HttpChat:
            outputs.push_back(chat_sample(unit));
            break;
        }
    }
    if (backend_.mode != BackendMode::Replay &&
        std::all_of(outputs.begin(), outputs.end(), [](const RawOutput& o) { return o.failed; }))
        throw BackendUnavailable("every sample failed for program '" + unit.id +
                                 "': " + outputs.back().error);
    return outputs;
}

std::vector<std::vector<RawOutput>> CandidateGenerator::generate_all(std::span<const SourceUnit> units) const
{
    std::vector<std::vector<RawOutput>> results(units.size());
    std::vector<std::exception_ptr> errors(units.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < units.size(); i = next++) {
            try {
                results[i] = generate(units[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };

    const std::size_t workers = std::min(backend_.concurrency, units.size());
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back(work);
    }
    for (const auto& error : errors)
        if (error)
            std::rethrow_exception(error);
    return results;
}

std::vector<RawOutput> generate(const SourceUnit& unit, const GeneratorBackend& backend)
{
    return CandidateGenerator(backend).generate(unit);
}

Candidate gate(const SourceUnit& unit, std::string_view raw, CandidateKind kind, double threshold,
               std::size_t index)
{
    Candidate c;
    c.program_id = unit.id;
    c.index = index;
    c.raw_output = std::string(raw);
    c.kind = kind;

    if (kind == CandidateKind::DiffOutput) {
        DiffScript script;
        try {
            script = parse(raw);
        } catch (const MalformedDiff& e) {
            c.status = CandidateStatus::Malformed;
            c.detail = std::string(to_string(e.reason()));
            return c;
        }
        PatchResult patched = optforge::apply(script, unit.text);
        if (!patched.applied()) {
            c.status = CandidateStatus::ApplyFailed;
            c.detail = "hunk " + std::to_string(patched.hunk_index) + " not matched";
            return c;
        }
        c.patched_text = std::move(*patched.output);
    } else {
        SourceUnit full = canonicalize(SourceUnit{unit.id, unit.language, std::string(raw)});
        if (full.text.empty()) {
            c.status = CandidateStatus::Malformed;
            c.detail = "no code after canonicalization";
            return c;
        }
        c.patched_text = std::move(full.text);
    }

    try {
        c.similarity = ratio(unit.text, *c.patched_text);
    } catch (const SimilarityInputTooLarge& e) {
        c.status = CandidateStatus::RejectedSimilarity;
        c.detail = e.what();
        return c;
    }
    if (*c.similarity < threshold) {
        c.status = CandidateStatus::RejectedSimilarity;
        c.detail = "similarity below threshold";
        return c;
    }
    c.status = CandidateStatus::Eligible;
    return c;
}

BreakdownReport ledger(std::span<const Candidate> candidates)
{
    BreakdownReport report;
    for (const auto& c : candidates) {
        switch (c.status) {
        case CandidateStatus::Malformed:
            ++report.malformed;
            break;
        case CandidateStatus::ApplyFailed:
            ++report.apply_failed;
            break;
        case CandidateStatus::RejectedSimilarity:
            ++report.rejected_similarity;
            break;
        case CandidateStatus::Eligible:
            ++report.eligible;
            break;
        }
        ++report.total;
    }
    return report;
}

json to_json(const BreakdownReport& report)
{
    return json{{"malformed", report.malformed},
                {"apply_failed", report.apply_failed},
                {"rejected_similarity", report.rejected_similarity},
                {"eligible", report.eligible},
                {"total", report.total},
                {"postprocess_discarded", report.postprocess_discarded()},
                {"gated_onward", report.gated_onward()}};
}

} // namespace optforge
