#pragma once

#include "optforge/canonicalizer.hpp"
#include "optforge/curator.hpp"
#include "optforge/evaluator.hpp"
#include "optforge/generator.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>

namespace optforge {

/// Settings shared by every subcommand. Defaults are the standard constants.
struct ToolConfig {
    FormatterConfig formatter;
    double similarity_threshold = 0.8;
    std::size_t max_changed_lines = 20;
    double max_changed_fraction = 0.20;
    double pi_threshold = 1.2;
    double pi_ceiling = 100.0;
    std::uint64_t seed = 0;
    std::optional<SplitSizes> split_sizes;
    GeneratorBackend backend;

    CurationFilters filters() const { return {max_changed_lines, max_changed_fraction, similarity_threshold}; }
    ScoreConfig score_config() const { return {pi_threshold, pi_ceiling}; }
};

/// Throws Error when a value is outside its documented range.
void validate(const ToolConfig& config);

/// Overlays the keys present in a config document; unknown keys are errors.
void apply_config_file(ToolConfig& config, const nlohmann::json& document);
void apply_config_file(ToolConfig& config, const std::filesystem::path& path);

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

/// The process environment.
EnvLookup process_environment();

/// Environment overrides: OPTFORGE_THRESHOLD, OPTFORGE_SEED, OPTFORGE_SAMPLES,
/// OPTFORGE_BACKEND, OPTFORGE_PI_THRESHOLD.
void apply_environment(ToolConfig& config, const EnvLookup& env);

nlohmann::json to_json(const ToolConfig& config);

} // namespace optforge
