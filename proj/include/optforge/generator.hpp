#pragma once

#include "optforge/canonicalizer.hpp"
#include "optforge/error.hpp"

#include <json.hpp>

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace optforge {

/// System prompt sent with every chat request; the program text is the user
/// message.
inline constexpr std::string_view kOptimizationSystemPrompt =
    "I want you to act as an experienced C and C++ developer and your task is to optimize my "
    "written C or C++ programs. I want you to optimize my program for running time and memory "
    "usage. I will type my C or C++ program and you will optimize the program and return the "
    "optimized program. I want you to only reply with the fixed program inside one unique code "
    "block, and nothing else. Do not write explanations.";

enum class CandidateKind { DiffOutput, FullProgram };
enum class CandidateStatus { Malformed, ApplyFailed, RejectedSimilarity, Eligible };

std::string_view to_string(CandidateKind kind);
std::string_view to_string(CandidateStatus status);
CandidateKind parse_candidate_kind(std::string_view text);
CandidateStatus parse_candidate_status(std::string_view text);

struct Candidate {
    std::string program_id;
    std::size_t index = 0;
    std::string raw_output;
    CandidateKind kind = CandidateKind::DiffOutput;
    CandidateStatus status = CandidateStatus::Malformed;
    std::optional<std::string> patched_text;
    std::optional<double> similarity;
    /// Why a candidate was discarded, empty when Eligible.
    std::string detail;
};

nlohmann::json to_json(const Candidate& candidate);
Candidate candidate_from_json(const nlohmann::json& object);

enum class BackendMode { Replay, Command, HttpChat };

std::string_view to_string(BackendMode mode);
BackendMode parse_backend_mode(std::string_view text);

struct GeneratorBackend {
    BackendMode mode = BackendMode::Replay;
    /// Replay: JSONL of {program_id, outputs: [text]}.
    std::filesystem::path replay_path;
    /// Command: argv; program text on stdin, one candidate on stdout.
    std::vector<std::string> command;
    /// HttpChat: full chat-completions URL.
    std::string endpoint = "https://api.openai.com/v1/chat/completions";
    std::string model = "gpt-3.5-turbo";
    /// Name of the environment variable holding the bearer token.
    std::string api_key_env = "OPENAI_API_KEY";
    /// Merged into the request body unchanged (temperature and the like).
    nlohmann::json request_params = nlohmann::json::object();
    std::size_t samples_per_program = 10;
    /// What the backend emits; chat models return full programs.
    CandidateKind output_kind = CandidateKind::DiffOutput;
    std::size_t max_attempts = 3;
    std::chrono::milliseconds initial_backoff{500};
    std::chrono::milliseconds timeout{120'000};
    std::size_t concurrency = 4;
};

/// Throws Error when an invariant such as samples_per_program >= 1 fails.
void validate(const GeneratorBackend& backend);

class BackendUnavailable : public Error {
public:
    using Error::Error;
};

class MissingReplayKey : public Error {
public:
    using Error::Error;
};

struct RawOutput {
    std::string text;
    /// The sample could not be produced; text is empty.
    bool failed = false;
    /// The response had no fenced code block and was used whole.
    bool fence_missing = false;
    std::size_t attempts = 0;
    std::string error;
};

struct FenceExtraction {
    std::string code;
    std::size_t fence_count = 0;
};

/// Content of the first ``` fenced block (the info string line is dropped),
/// or the whole response when there is none.
FenceExtraction extract_code_block(std::string_view response);

/// OpenAI-style chat-completions body for one sample.
nlohmann::json build_chat_request(const GeneratorBackend& backend, std::string_view program_text);

/// Produces raw candidate outputs for programs. Replay data is loaded once.
class CandidateGenerator {
public:
    /// Sends one chat request body to an endpoint and returns the HTTP status
    /// and response body; throws on transport failure.
    using HttpPost = std::function<std::pair<int, std::string>(
        const std::string& url, const std::string& body, const std::string& bearer_token,
        std::chrono::milliseconds timeout)>;

    explicit CandidateGenerator(GeneratorBackend backend);
    CandidateGenerator(GeneratorBackend backend, HttpPost transport);

    const GeneratorBackend& backend() const { return backend_; }

    /// Exactly samples_per_program outputs. Samples that fail after every
    /// attempt are returned empty and marked failed; BackendUnavailable is
    /// thrown only when every sample of the program failed.
    std::vector<RawOutput> generate(const SourceUnit& unit) const;

    /// generate() over many programs with at most `concurrency` in flight.
    std::vector<std::vector<RawOutput>> generate_all(std::span<const SourceUnit> units) const;

private:
    RawOutput replay_sample(const std::vector<std::string>* outputs, std::size_t index) const;
    RawOutput command_sample(const SourceUnit& unit) const;
    RawOutput chat_sample(const SourceUnit& unit) const;

    GeneratorBackend backend_;
    HttpPost transport_;
    std::map<std::string, std::vector<std::string>, std::less<>> replay_;
};

/// Default transport built on cpp-httplib.
CandidateGenerator::HttpPost http_transport();

std::vector<RawOutput> generate(const SourceUnit& unit, const GeneratorBackend& backend);

/// Parse, apply and similarity gate for one raw output. `unit` must already be
/// canonical; full-program outputs are canonicalized before comparison. Never
/// throws for bad model output; every failure is a status.
Candidate gate(const SourceUnit& unit, std::string_view raw, CandidateKind kind, double threshold,
               std::size_t index = 0);

struct BreakdownReport {
    std::size_t malformed = 0;
    std::size_t apply_failed = 0;
    std::size_t rejected_similarity = 0;
    std::size_t eligible = 0;
    std::size_t total = 0;

    /// Discarded by post-processing: unparsable or unappliable.
    std::size_t postprocess_discarded() const { return malformed + apply_failed; }
    /// Everything that survived post-processing.
    std::size_t gated_onward() const { return total - postprocess_discarded(); }
};

BreakdownReport ledger(std::span<const Candidate> candidates);
nlohmann::json to_json(const BreakdownReport& report);

} // namespace optforge
