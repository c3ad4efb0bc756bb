#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace midnav {

enum class ActionKind { Forward, TurnLeft, TurnRight, Stop };

const char* to_string(ActionKind kind);

// A mid-level motion primitive. magnitude is meters for Forward, degrees for
// TurnLeft/TurnRight, and exactly 0 for Stop.
struct Action {
    ActionKind kind = ActionKind::Stop;
    double magnitude = 0.0;

    bool operator==(const Action& other) const = default;
};

// Safety bounds enforced on every constructed Action (artifact limits, not
// physical ones). Forward in (0, max_forward_m]; turns in (0, max_turn_deg].
struct ActionBounds {
    double max_forward_m = 5.0;
    double max_turn_deg = 180.0;
};

// Validates and builds an Action; throws MagnitudeOutOfRange.
Action make_action(ActionKind kind, double magnitude,
                   const ActionBounds& bounds = {});

struct ParseReport {
    Action action;
    std::size_t span_begin = 0;  // character offsets into the source text
    std::size_t span_end = 0;
    std::string canonical_text;
};

// Extracts the first action mention in reading order from free-form text.
// Distances in cm or m (normalized to meters), angles in degrees,
// case-insensitive, arbitrary surrounding prose. Throws NoActionFound,
// MissingMagnitude, or MagnitudeOutOfRange.
ParseReport parse_action(const std::string& text,
                         const ActionBounds& bounds = {});

// All non-overlapping action mentions in reading order; mentions whose
// magnitude violates the bounds are skipped. Never throws on unmatched text.
std::vector<ParseReport> parse_all(const std::string& text,
                                   const ActionBounds& bounds = {});

// Canonical lowercase text: "move forward {N} cm" (whole centimeters),
// "turn left {N} degrees", "turn right {N} degrees", "stop".
// parse_action(format_action(a)).action == a up to centimeter rounding.
std::string format_action(const Action& action);

}  // namespace midnav
