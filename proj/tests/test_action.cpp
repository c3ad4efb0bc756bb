#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "midnav/action.hpp"
#include "midnav/error.hpp"

using namespace midnav;

namespace {

Action parsed(const std::string& text) { return parse_action(text).action; }

ErrorCode code_of(const std::string& text) {
    try {
        parse_action(text);
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected parse_action to throw for: " << text);
    return ErrorCode::NoActionFound;
}

}  // namespace

TEST_CASE("common phrasings parse to the expected actions") {
    CHECK(parsed("moving forward 75cm") == Action{ActionKind::Forward, 0.75});
    CHECK(parsed("turn right 30 degrees") == Action{ActionKind::TurnRight, 30.0});
    CHECK(parsed("stop") == Action{ActionKind::Stop, 0.0});
    CHECK(parsed("move forward 50 cm") == Action{ActionKind::Forward, 0.5});
}

TEST_CASE("prose around the mention is tolerated") {
    CHECK(parsed("The next action is to turn left 15 degrees.") ==
          Action{ActionKind::TurnLeft, 15.0});
    CHECK(parsed("I think we should be moving forward 75cm now") ==
          Action{ActionKind::Forward, 0.75});
    CHECK(parsed("Sure! STOP.") == Action{ActionKind::Stop, 0.0});
}

TEST_CASE("unit handling") {
    CHECK(parsed("move forward 0.75 m") == parsed("move forward 75 cm"));
    CHECK(parsed("go straight 1 m") == Action{ActionKind::Forward, 1.0});
    CHECK(parsed("walk forward 120 centimeters") ==
          Action{ActionKind::Forward, 1.2});
    CHECK(parsed("rotate left 45 deg") == Action{ActionKind::TurnLeft, 45.0});
}

TEST_CASE("first mention in reading order wins") {
    const ParseReport r =
        parse_action("turn right 30 degrees then move forward 1 m");
    CHECK(r.action == Action{ActionKind::TurnRight, 30.0});
    CHECK(r.span_begin == 0);

    CHECK(parsed("stop after you move forward 50 cm") ==
          Action{ActionKind::Stop, 0.0});
}

TEST_CASE("error cases") {
    CHECK(code_of("walk ahead") == ErrorCode::NoActionFound);
    CHECK(code_of("hello there") == ErrorCode::NoActionFound);
    CHECK(code_of("move forward") == ErrorCode::MissingMagnitude);
    CHECK(code_of("turn left, please") == ErrorCode::MissingMagnitude);
    CHECK(code_of("move forward 600 cm") == ErrorCode::MagnitudeOutOfRange);
    CHECK(code_of("turn right 270 degrees") == ErrorCode::MagnitudeOutOfRange);
    CHECK(code_of("move forward 0 cm") == ErrorCode::MagnitudeOutOfRange);
    CHECK_THROWS_AS(parse_action(""), Error);
}

TEST_CASE("matched span covers the mention") {
    const std::string text = "ok, turn right 30 degrees now";
    const ParseReport r = parse_action(text);
    const std::string span = text.substr(r.span_begin, r.span_end - r.span_begin);
    CHECK(span == "turn right 30 degrees");
    CHECK(r.canonical_text == "turn right 30 degrees");
}

TEST_CASE("parse_all returns non-overlapping mentions in order") {
    const auto reports =
        parse_all("turn left 30 degrees then move forward 1 m");
    REQUIRE(reports.size() == 2);
    CHECK(reports[0].action == Action{ActionKind::TurnLeft, 30.0});
    CHECK(reports[1].action == Action{ActionKind::Forward, 1.0});

    CHECK(parse_all("hello").empty());

    const auto two = parse_all("move forward 25 cm. move forward 25 cm.");
    REQUIRE(two.size() == 2);
    CHECK(two[0].action == Action{ActionKind::Forward, 0.25});
    CHECK(two[1].action == Action{ActionKind::Forward, 0.25});
    CHECK(two[0].span_end <= two[1].span_begin);
}

TEST_CASE("format_action canonical forms") {
    CHECK(format_action({ActionKind::Forward, 0.50}) == "move forward 50 cm");
    CHECK(format_action({ActionKind::TurnLeft, 15.0}) == "turn left 15 degrees");
    CHECK(format_action({ActionKind::TurnRight, 30.0}) ==
          "turn right 30 degrees");
    CHECK(format_action({ActionKind::Stop, 0.0}) == "stop");
}

TEST_CASE("make_action enforces the bounds") {
    CHECK_THROWS_AS(make_action(ActionKind::Forward, 5.01), Error);
    CHECK_THROWS_AS(make_action(ActionKind::TurnLeft, 0.0), Error);
    CHECK_THROWS_AS(make_action(ActionKind::Stop, 1.0), Error);
    CHECK(make_action(ActionKind::Forward, 5.0).magnitude == 5.0);
    CHECK(make_action(ActionKind::TurnRight, 180.0).magnitude == 180.0);
}

TEST_CASE("round-trip property over random valid actions") {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> cm(1, 500);
    std::uniform_real_distribution<double> deg(0.01, 180.0);
    std::uniform_int_distribution<int> kind(0, 2);

    for (int i = 0; i < 2000; ++i) {
        Action a;
        switch (kind(rng)) {
            case 0: a = {ActionKind::Forward, cm(rng) / 100.0}; break;
            case 1: a = {ActionKind::TurnLeft, deg(rng)}; break;
            default: a = {ActionKind::TurnRight, deg(rng)}; break;
        }
        const Action back = parse_action(format_action(a)).action;
        CHECK(back.kind == a.kind);
        if (a.kind == ActionKind::Forward) {
            CHECK(std::llround(back.magnitude * 100) ==
                  std::llround(a.magnitude * 100));
        } else {
            CHECK(back.magnitude == doctest::Approx(a.magnitude).epsilon(1e-12));
        }
    }
}

TEST_CASE("prefix and suffix robustness around canonical strings") {
    const std::vector<std::string> prefixes = {
        "", "Answer: ", "The robot should now be ", "after the doorway, "};
    const std::vector<std::string> suffixes = {"", ".", " and wait there.",
                                               ", then look around"};
    const std::vector<Action> actions = {{ActionKind::Forward, 0.25},
                                         {ActionKind::TurnLeft, 15.0},
                                         {ActionKind::TurnRight, 90.0},
                                         {ActionKind::Stop, 0.0}};
    for (const Action& a : actions) {
        const std::string canonical = format_action(a);
        for (const auto& p : prefixes)
            for (const auto& s : suffixes)
                CHECK(parse_action(p + canonical + s).action == a);
    }
}

TEST_CASE("determinism: identical input gives identical report") {
    const std::string text = "please turn left 22.5 degrees";
    const ParseReport a = parse_action(text);
    const ParseReport b = parse_action(text);
    CHECK(a.action == b.action);
    CHECK(a.span_begin == b.span_begin);
    CHECK(a.span_end == b.span_end);
    CHECK(a.canonical_text == b.canonical_text);
    CHECK(a.action.magnitude == 22.5);
}
