#include "optforge/diffrep.hpp"

#include "optforge/canonicalizer.hpp"
#include "optforge/patcher.hpp"

#include "fixtures.hpp"
#include "random_programs.hpp"

#include <doctest.h>

using namespace optforge;

namespace {

MalformedReason reason_of(std::string_view raw)
{
    try {
        parse(raw);
    } catch (const MalformedDiff& e) {
        return e.reason();
    }
    FAIL("parse accepted " << raw);
    return MalformedReason::EmptyScript;
}

std::string numbered(std::initializer_list<const char*> lines)
{
    std::string text;
    for (const char* line : lines)
        text += std::string(line) + "\n";
    return text;
}

} // namespace

TEST_CASE("the reference listings produce the reference diff")
{
    std::string original = testsupport::read_file(testsupport::fixture("listings/original.cpp"));
    std::string improved = testsupport::read_file(testsupport::fixture("listings/improved.cpp"));
    std::string expected = testsupport::read_file(testsupport::fixture("listings/optimization.diff"));
    auto script = synthesize(original, improved);
    CHECK(render(script) == expected);
    CHECK(script.hunks.size() == 2);
    CHECK(changed_line_count(script) == 4);
    CHECK(*optforge::apply(parse(expected), original).output == improved);
}

TEST_CASE("malformed scripts")
{
    CHECK(reason_of("hello world\n") == MalformedReason::UnknownMarker);
    CHECK(reason_of(" ctx\n ctx2\n") == MalformedReason::HunkWithoutChange);
    CHECK(reason_of("") == MalformedReason::EmptyScript);
    CHECK(reason_of("\n\n") == MalformedReason::EmptyScript);
    CHECK(reason_of(" a\n-b\n c\n d\n") == MalformedReason::ExcessContext);
    CHECK(reason_of("@@ -1 +1 @@\n-a\n+b\n") == MalformedReason::UnknownMarker);
    CHECK(reason_of("-a\n+b\n\n c\n") == MalformedReason::HunkWithoutChange);
}

TEST_CASE("parse details")
{
    auto script = parse(" a\r\n-b\r\n+c\r\n");
    REQUIRE(script.hunks.size() == 1);
    CHECK(script.hunks[0].lines[2] == DiffLine{LineMarker::Added, "c"});
    // Several leading context lines are allowed.
    CHECK_NOTHROW(parse(" a\n b\n-c\n"));
    CHECK(parse("-x").hunks[0].lines[0].content == "x");
    // Blank line runs separate hunks once.
    CHECK(parse("-a\n\n\n+b\n").hunks.size() == 2);
    DiffScript bad;
    bad.hunks.push_back(Hunk{{{LineMarker::Added, "two\nlines"}}});
    CHECK_THROWS_AS(validate(bad), MalformedDiff);
}

TEST_CASE("identical inputs have no diff")
{
    CHECK_THROWS_AS(synthesize("a\nb\n", "a\nb\n"), IdenticalInputs);
    CHECK_THROWS_AS(synthesize("", ""), IdenticalInputs);
}

TEST_CASE("context at the file edges")
{
    CHECK(render(synthesize("a\nb\nc\n", "A\nb\nc\n")) == "-a\n+A\n b\n");
    CHECK(render(synthesize("a\nb\nc\n", "a\nb\nC\n")) == " b\n-c\n+C\n");
    CHECK(render(synthesize("", "x\n")) == "+x\n");
    CHECK(render(synthesize("x\n", "")) == "-x\n");
}

TEST_CASE("nearby changes share a hunk")
{
    const std::string base = numbered({"1", "2", "3", "4", "5", "6", "7", "8"});
    // Two unchanged lines between the changes: one hunk.
    CHECK(render(synthesize(base, numbered({"1", "B", "3", "4", "E", "6", "7", "8"}))) ==
          " 1\n-2\n+B\n 3\n 4\n-5\n+E\n 6\n");
    // Three: two hunks.
    CHECK(render(synthesize(base, numbered({"1", "B", "3", "4", "5", "F", "7", "8"}))) ==
          " 1\n-2\n+B\n 3\n\n 5\n-6\n+F\n 7\n");
}

TEST_CASE("an ambiguous anchor gets more leading context")
{
    const std::string original = numbered({"}", "}", "a", "}", "}"});
    const std::string improved = numbered({"}", "}", "a", "}", "new", "}"});
    auto script = synthesize(original, improved);
    CHECK(render(script) == " a\n }\n+new\n }\n");
    CHECK(*optforge::apply(script, original).output == improved);

    // Widening stops at the end of the previous hunk.
    const std::string o2 = numbered({"x", "}", "}", "}", "}", "}"});
    const std::string i2 = numbered({"X", "}", "}", "}", "}", "+", "}"});
    auto script2 = synthesize(o2, i2);
    CHECK(render(script2) == "-x\n+X\n }\n\n }\n }\n }\n++\n }\n");
    CHECK(*optforge::apply(script2, o2).output == i2);
}

TEST_CASE("random programs round-trip through render, parse and apply")
{
    for (std::uint64_t i = 0; i < 300; ++i) {
        auto [before, after] = testsupport::make_program_pair(i);
        CAPTURE(i);
        auto script = synthesize(before, after);
        auto text = render(script);
        REQUIRE(parse(text) == script);
        auto r = optforge::apply(script, before);
        REQUIRE(r.applied());
        CHECK(*r.output == after);
    }
}

TEST_CASE("source unit overload")
{
    SourceUnit a{"a", Language::Cpp, "int x;\nint y;\n"};
    SourceUnit b{"b", Language::Cpp, "int x;\nint z;\n"};
    CHECK(render(synthesize(a, b)) == " int x;\n-int y;\n+int z;\n");
}
