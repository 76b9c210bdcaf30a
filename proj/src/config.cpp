#include "optforge/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>

namespace optforge {

using nlohmann::json;

void validate(const ToolConfig& config)
{
    auto unit_range = [](double value, const char* name) {
        if (!(value >= 0.0 && value <= 1.0))
            throw Error(std::string(name) + " must lie in [0, 1]");
    };
    unit_range(config.similarity_threshold, "similarity threshold");
    unit_range(config.max_changed_fraction, "max_changed_fraction");
    if (!(config.pi_threshold >= 1.0))
        throw Error("pi_threshold must be at least 1");
    if (!(config.pi_ceiling >= config.pi_threshold))
        throw Error("pi_ceiling must not be below pi_threshold");
    validate(config.backend);
}

namespace {

void reject_unknown(const json& object, std::initializer_list<const char*> known, const std::string& where)
{
    if (!object.is_object())
        throw Error("config section '" + where + "' must be an object");
    std::set<std::string> names(known.begin(), known.end());
    for (const auto& [key, value] : object.items())
        if (!names.contains(key))
            throw Error("unknown config key '" + where + "." + key + "'");
}

std::vector<std::string> string_list(const json& value, const char* name)
{
    if (!value.is_array())
        throw Error(std::string(name) + " must be a list of strings");
    return value.get<std::vector<std::string>>();
}

} // namespace

void apply_config_file(ToolConfig& config, const json& document)
{
    reject_unknown(document, {"formatter", "similarity", "curation", "generator", "evaluation"}, "config");
    try {
        if (auto it = document.find("formatter"); it != document.end()) {
            reject_unknown(*it, {"external_command", "on_failure"}, "formatter");
            if (it->contains("external_command"))
                config.formatter.external_command = string_list(it->at("external_command"), "external_command");
            if (it->contains("on_failure")) {
                auto policy = it->at("on_failure").get<std::string>();
                if (policy == "fallback_builtin")
                    config.formatter.on_failure = FormatterFailurePolicy::FallbackBuiltin;
                else if (policy == "abort")
                    config.formatter.on_failure = FormatterFailurePolicy::Abort;
                else
                    throw Error("formatter.on_failure must be fallback_builtin or abort");
            }
        }
        if (auto it = document.find("similarity"); it != document.end()) {
            reject_unknown(*it, {"threshold"}, "similarity");
            config.similarity_threshold = it->value("threshold", config.similarity_threshold);
        }
        if (auto it = document.find("curation"); it != document.end()) {
            reject_unknown(*it, {"max_changed_lines", "max_changed_fraction", "seed", "sizes"}, "curation");
            config.max_changed_lines = it->value("max_changed_lines", config.max_changed_lines);
            config.max_changed_fraction = it->value("max_changed_fraction", config.max_changed_fraction);
            config.seed = it->value("seed", config.seed);
            if (it->contains("sizes")) {
                auto sizes = it->at("sizes").get<std::vector<std::size_t>>();
                if (sizes.size() != 3)
                    throw Error("curation.sizes must list train, valid and test sizes");
                config.split_sizes = SplitSizes{sizes[0], sizes[1], sizes[2]};
            }
        }
        if (auto it = document.find("generator"); it != document.end()) {
            reject_unknown(*it,
                           {"mode", "replay_path", "command", "endpoint", "model", "api_key_env",
                            "request_params", "samples_per_program", "output_kind", "max_attempts",
                            "initial_backoff_ms", "timeout_ms", "concurrency"},
                           "generator");
            GeneratorBackend& b = config.backend;
            if (it->contains("mode"))
                b.mode = parse_backend_mode(it->at("mode").get<std::string>());
            if (it->contains("replay_path"))
                b.replay_path = it->at("replay_path").get<std::string>();
            if (it->contains("command"))
                b.command = string_list(it->at("command"), "generator.command");
            b.endpoint = it->value("endpoint", b.endpoint);
            b.model = it->value("model", b.model);
            b.api_key_env = it->value("api_key_env", b.api_key_env);
            if (it->contains("request_params"))
                b.request_params = it->at("request_params");
            b.samples_per_program = it->value("samples_per_program", b.samples_per_program);
            if (it->contains("output_kind"))
                b.output_kind = parse_candidate_kind(it->at("output_kind").get<std::string>());
            b.max_attempts = it->value("max_attempts", b.max_attempts);
            if (it->contains("initial_backoff_ms"))
                b.initial_backoff = std::chrono::milliseconds(it->at("initial_backoff_ms").get<std::int64_t>());
            if (it->contains("timeout_ms"))
                b.timeout = std::chrono::milliseconds(it->at("timeout_ms").get<std::int64_t>());
            b.concurrency = it->value("concurrency", b.concurrency);
        }
        if (auto it = document.find("evaluation"); it != document.end()) {
            reject_unknown(*it, {"pi_threshold", "pi_ceiling"}, "evaluation");
            config.pi_threshold = it->value("pi_threshold", config.pi_threshold);
            config.pi_ceiling = it->value("pi_ceiling", config.pi_ceiling);
        }
    } catch (const json::exception& e) {
        throw Error(std::string("invalid config value: ") + e.what());
    }
}

void apply_config_file(ToolConfig& config, const std::filesystem::path& path)
{
    std::ifstream input(path);
    if (!input)
        throw Error("cannot read config file '" + path.string() + "'");
    json document;
    try {
        document = json::parse(input);
    } catch (const json::exception& e) {
        throw Error("config file '" + path.string() + "' is not valid JSON: " + e.what());
    }
    apply_config_file(config, document);
}

EnvLookup process_environment()
{
    return [](const std::string& name) -> std::optional<std::string> {
        if (const char* value = std::getenv(name.c_str()))
            return std::string(value);
        return std::nullopt;
    };
}

namespace {

double parse_double(const std::string& text, const std::string& name)
{
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size())
        throw Error(name + " is not a number: '" + text + "'");
    return value;
}

std::uint64_t parse_unsigned(const std::string& text, const std::string& name)
{
    std::size_t used = 0;
    std::uint64_t value = 0;
    try {
        value = std::stoull(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size() || text.front() == '-')
        throw Error(name + " is not a non-negative integer: '" + text + "'");
    return value;
}

} // namespace

void apply_environment(ToolConfig& config, const EnvLookup& env)
{
    if (auto v = env("OPTFORGE_THRESHOLD"))
        config.similarity_threshold = parse_double(*v, "OPTFORGE_THRESHOLD");
    if (auto v = env("OPTFORGE_SEED"))
        config.seed = parse_unsigned(*v, "OPTFORGE_SEED");
    if (auto v = env("OPTFORGE_SAMPLES"))
        config.backend.samples_per_program = parse_unsigned(*v, "OPTFORGE_SAMPLES");
    if (auto v = env("OPTFORGE_BACKEND"))
        config.backend.mode = parse_backend_mode(*v);
    if (auto v = env("OPTFORGE_PI_THRESHOLD"))
        config.pi_threshold = parse_double(*v, "OPTFORGE_PI_THRESHOLD");
}

json to_json(const ToolConfig& config)
{
    json sizes = nullptr;
    if (config.split_sizes)
        sizes = json::array({config.split_sizes->train, config.split_sizes->valid, config.split_sizes->test});
    const auto& b = config.backend;
    return json{
        {"formatter",
         {{"external_command", config.formatter.external_command},
          {"on_failure", config.formatter.on_failure == FormatterFailurePolicy::Abort ? "abort"
                                                                                       : "fallback_builtin"}}},
        {"similarity", {{"threshold", config.similarity_threshold}}},
        {"curation",
         {{"max_changed_lines", config.max_changed_lines},
          {"max_changed_fraction", config.max_changed_fraction},
          {"seed", config.seed},
          {"sizes", sizes}}},
        {"generator",
         {{"mode", to_string(b.mode)},
          {"replay_path", b.replay_path.string()},
          {"command", b.command},
          {"endpoint", b.endpoint},
          {"model", b.model},
          {"api_key_env", b.api_key_env},
          {"request_params", b.request_params},
          {"samples_per_program", b.samples_per_program},
          {"output_kind", to_string(b.output_kind)},
          {"max_attempts", b.max_attempts},
          {"initial_backoff_ms", b.initial_backoff.count()},
          {"timeout_ms", b.timeout.count()},
          {"concurrency", b.concurrency}}},
        {"evaluation", {{"pi_threshold", config.pi_threshold}, {"pi_ceiling", config.pi_ceiling}}}};
}

} // namespace optforge
