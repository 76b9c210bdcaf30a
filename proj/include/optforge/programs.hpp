#pragma once

#include "optforge/canonicalizer.hpp"
#include "optforge/evaluator.hpp"

#include <json.hpp>

#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

namespace optforge {

/// Parses one JSON value per non-blank line. Throws Error naming the line.
std::vector<nlohmann::json> read_jsonl(std::istream& input, std::string_view source_name);

/// A program under test and the measurements of its original submission.
struct TestProgram {
    SourceUnit unit;
    Baseline baseline;
};

/// Accepts either {program_id, origin, language, text, cpu_time, memory}
/// or a curated pair record (before_text, before_cpu_time, ...).
TestProgram program_from_json(const nlohmann::json& object);
nlohmann::json to_json(const TestProgram& program);

std::vector<TestProgram> read_programs(std::istream& input, std::string_view source_name);
Baselines baselines_of(std::span<const TestProgram> programs);

} // namespace optforge
