#include "optforge/programs.hpp"

#include <istream>

namespace optforge {

using nlohmann::json;

std::vector<json> read_jsonl(std::istream& input, std::string_view source_name)
{
    std::vector<json> values;
    std::string line;
    std::size_t number = 0;
    while (std::getline(input, line)) {
        ++number;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        try {
            values.push_back(json::parse(line));
        } catch (const json::exception& e) {
            throw Error(std::string(source_name) + ":" + std::to_string(number) + ": " + e.what());
        }
    }
    return values;
}

TestProgram program_from_json(const json& object)
{
    TestProgram p;
    try {
        const bool curated = object.contains("before_text");
        p.unit.id = object.at("program_id").get<std::string>();
        p.unit.text = object.at(curated ? "before_text" : "text").get<std::string>();
        const char* language_key = object.contains("language") ? "language" : "programming_language";
        p.unit.language = object.contains(language_key)
                              ? parse_language(object.at(language_key).get<std::string>())
                              : Language::Cpp;
        p.baseline.origin = parse_origin(object.at("origin").get<std::string>());
        p.baseline.cpu_time = object.at(curated ? "before_cpu_time" : "cpu_time").get<std::int64_t>();
        const char* memory_key = curated ? "before_memory" : "memory";
        if (object.contains(memory_key))
            p.baseline.memory = object.at(memory_key).get<std::int64_t>();
        else
            p.baseline.memory = object.at("memory_bytes").get<std::int64_t>() / 1024;
    } catch (const json::exception& e) {
        throw Error(std::string("invalid program record: ") + e.what());
    }
    if (p.baseline.cpu_time < 0 || p.baseline.memory < 0)
        throw Error("program '" + p.unit.id + "' has negative measurements");
    return p;
}

json to_json(const TestProgram& p)
{
    return json{{"program_id", p.unit.id},
                {"origin", to_string(p.baseline.origin)},
                {"language", to_string(p.unit.language)},
                {"cpu_time", p.baseline.cpu_time},
                {"memory", p.baseline.memory},
                {"text", p.unit.text}};
}

std::vector<TestProgram> read_programs(std::istream& input, std::string_view source_name)
{
    std::vector<TestProgram> programs;
    for (const auto& value : read_jsonl(input, source_name))
        programs.push_back(program_from_json(value));
    return programs;
}

Baselines baselines_of(std::span<const TestProgram> programs)
{
    Baselines baselines;
    for (const auto& p : programs)
        if (!baselines.emplace(p.unit.id, p.baseline).second)
            throw Error("duplicate program id '" + p.unit.id + "'");
    return baselines;
}

} // namespace optforge
