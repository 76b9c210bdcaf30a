#include "optforge/patcher.hpp"

#include <doctest.h>

using namespace optforge;

TEST_CASE("a repeated anchor patches its first occurrence")
{
    auto script = parse(" x\n-y\n+z\n");
    auto r = optforge::apply(script, "x\ny\nq\nx\ny\n");
    REQUIRE(r.applied());
    CHECK(*r.output == "x\nz\nq\nx\ny\n");
}

TEST_CASE("search continues after the previous match")
{
    auto script = parse(" x\n-y\n+z\n\n x\n-y\n+w\n");
    auto r = optforge::apply(script, "x\ny\nq\nx\ny\n");
    REQUIRE(r.applied());
    CHECK(*r.output == "x\nz\nq\nx\nw\n");

    // Hunks listed out of order cannot match backwards.
    auto backwards = parse(" q\n-x\n+1\n\n a\n-b\n+2\n");
    auto miss = optforge::apply(backwards, "a\nb\nq\nx\n");
    CHECK(miss.status == PatchResult::Status::Unmatched);
    CHECK(miss.hunk_index == 1);
    CHECK_FALSE(miss.output.has_value());
}

TEST_CASE("unmatched anchor reports the hunk")
{
    auto r = optforge::apply(parse(" nope\n-a\n+b\n"), "a\nb\n");
    CHECK_FALSE(r.applied());
    CHECK(r.hunk_index == 0);
}

TEST_CASE("pure insertions")
{
    CHECK(*optforge::apply(parse("+first\n"), "a\n").output == "first\na\n");
    CHECK(*optforge::apply(parse("+only\n"), "").output == "only\n");
    CHECK(*optforge::apply(parse(" a\n+after\n"), "a\nb\n").output == "a\nafter\nb\n");

    DiffScript late;
    late.hunks.push_back(parse(" a\n-b\n+c\n").hunks[0]);
    late.hunks.push_back(Hunk{{{LineMarker::Added, "tail"}}});
    auto r = optforge::apply(late, "a\nb\n");
    CHECK_FALSE(r.applied());
    CHECK(r.hunk_index == 1);
}

TEST_CASE("deleting everything")
{
    CHECK(*optforge::apply(parse("-a\n-b\n"), "a\nb\n").output == "");
}

TEST_CASE("unchanged lines outside hunks are copied")
{
    auto r = optforge::apply(parse(" 2\n-3\n+three\n 4\n"), "1\n2\n3\n4\n5\n");
    CHECK(*r.output == "1\n2\nthree\n4\n5\n");
}
