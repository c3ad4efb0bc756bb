#include "midnav/action.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <optional>
#include <regex>

#include "midnav/error.hpp"

namespace midnav {

namespace {

// Grammar documented in docs/action-grammar.md. Patterns are applied
// case-insensitively; the earliest match in the text wins.
const std::regex& forward_pattern() {
    static const std::regex re(
        R"((?:\b(?:mov(?:e|es|ing)|go(?:es|ing)?|walk(?:s|ing)?|head(?:s|ing)?|step(?:s|ping)?|proceed(?:s|ing)?|driv(?:e|es|ing))\s+)?)"
        R"(\b(?:forwards?|ahead|straight(?:\s+ahead)?))"
        R"(\s+(?:(?:for|by|about|around)\s+)?)"
        R"((\d+(?:\.\d+)?|\.\d+)\s*)"
        R"((centimeters?|centimetres?|cm|meters?|metres?|m)\b)",
        std::regex::icase | std::regex::optimize);
    return re;
}

const std::regex& turn_pattern() {
    static const std::regex re(
        R"(\b(?:turn(?:s|ing)?|rotat(?:e|es|ing))\s+(?:(?:to\s+the|to)\s+)?)"
        R"((left|right))"
        R"((?:\s+(?:by|about|around|for))?\s+)"
        R"((\d+(?:\.\d+)?|\.\d+)\s*)"
        "(?:degrees?\\b|deg\\b|\xc2\xb0)",
        std::regex::icase | std::regex::optimize);
    return re;
}

const std::regex& stop_pattern() {
    static const std::regex re(R"(\bstop(?:s|ped|ping)?\b)",
                               std::regex::icase | std::regex::optimize);
    return re;
}

// Canonical keyword forms with the magnitude missing. Only these trigger
// MissingMagnitude; looser prose ("walk ahead") reports NoActionFound.
const std::regex& keyword_only_pattern() {
    static const std::regex re(
        R"(\b(?:(?:mov(?:e|es|ing)|go(?:es|ing)?|walk(?:s|ing)?)\s+forwards?)"
        R"(|(?:turn(?:s|ing)?|rotat(?:e|es|ing))\s+(?:(?:to\s+the|to)\s+)?(?:left|right))\b)",
        std::regex::icase | std::regex::optimize);
    return re;
}

bool iequals_left(const std::string& s) {
    return s.size() == 4 && (s[0] == 'l' || s[0] == 'L');
}

struct RawMatch {
    Action action;
    std::size_t begin = 0;
    std::size_t end = 0;
    bool magnitude_in_range = true;
};

double to_meters(double value, const std::string& unit) {
    const char u = static_cast<char>(std::tolower(unit[0]));
    if (u == 'c') return value / 100.0;
    return value;
}

double parse_number(const std::string& digits) {
    try {
        return std::stod(digits);
    } catch (const std::out_of_range&) {
        return std::numeric_limits<double>::infinity();
    }
}

// Earliest match of any full action pattern at or after `from`.
std::optional<RawMatch> find_first(const std::string& text, std::size_t from,
                                   const ActionBounds& bounds) {
    std::optional<RawMatch> best;
    auto consider = [&](RawMatch m) {
        if (!best || m.begin < best->begin) best = m;
    };

    std::smatch sm;
    const auto begin_it = text.cbegin() + static_cast<std::ptrdiff_t>(from);
    auto offset = [&](const std::smatch& m, int group) {
        return from + static_cast<std::size_t>(m.position(group));
    };

    if (std::regex_search(begin_it, text.cend(), sm, forward_pattern())) {
        RawMatch m;
        const double meters = to_meters(parse_number(sm[1].str()), sm[2].str());
        m.begin = offset(sm, 0);
        m.end = m.begin + static_cast<std::size_t>(sm.length(0));
        m.magnitude_in_range = meters > 0.0 && meters <= bounds.max_forward_m;
        m.action = {ActionKind::Forward, meters};
        consider(m);
    }
    if (std::regex_search(begin_it, text.cend(), sm, turn_pattern())) {
        RawMatch m;
        const double degrees = parse_number(sm[2].str());
        m.begin = offset(sm, 0);
        m.end = m.begin + static_cast<std::size_t>(sm.length(0));
        m.magnitude_in_range = degrees > 0.0 && degrees <= bounds.max_turn_deg;
        m.action = {iequals_left(sm[1].str()) ? ActionKind::TurnLeft
                                              : ActionKind::TurnRight,
                    degrees};
        consider(m);
    }
    if (std::regex_search(begin_it, text.cend(), sm, stop_pattern())) {
        RawMatch m;
        m.begin = offset(sm, 0);
        m.end = m.begin + static_cast<std::size_t>(sm.length(0));
        m.action = {ActionKind::Stop, 0.0};
        consider(m);
    }
    return best;
}

// Shortest plain-decimal representation that parses back to exactly `value`.
std::string shortest_round_trip(double value) {
    char buf[64];
    std::string out;
    for (int decimals = 0; decimals <= 17; ++decimals) {
        std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
        out = buf;
        if (out.find('.') != std::string::npos) {
            out.erase(out.find_last_not_of('0') + 1);
            if (out.back() == '.') out.pop_back();
        }
        if (std::strtod(out.c_str(), nullptr) == value) break;
    }
    return out;
}

}  // namespace

const char* to_string(ActionKind kind) {
    switch (kind) {
        case ActionKind::Forward: return "forward";
        case ActionKind::TurnLeft: return "turn_left";
        case ActionKind::TurnRight: return "turn_right";
        case ActionKind::Stop: return "stop";
    }
    return "?";
}

Action make_action(ActionKind kind, double magnitude,
                   const ActionBounds& bounds) {
    if (kind == ActionKind::Stop) {
        if (magnitude != 0.0)
            raise(ErrorCode::MagnitudeOutOfRange,
                  "stop carries magnitude 0, got " + std::to_string(magnitude));
        return {kind, 0.0};
    }
    const bool is_forward = kind == ActionKind::Forward;
    const double limit = is_forward ? bounds.max_forward_m : bounds.max_turn_deg;
    if (!(magnitude > 0.0) || magnitude > limit)
        raise(ErrorCode::MagnitudeOutOfRange,
              std::string(to_string(kind)) + " magnitude " +
                  std::to_string(magnitude) + " outside (0, " +
                  std::to_string(limit) + "]");
    return {kind, magnitude};
}

ParseReport parse_action(const std::string& text, const ActionBounds& bounds) {
    if (text.empty()) raise(ErrorCode::NoActionFound, "empty input text");

    const auto full = find_first(text, 0, bounds);

    std::smatch kw;
    const bool has_keyword =
        std::regex_search(text.cbegin(), text.cend(), kw, keyword_only_pattern());
    const std::size_t keyword_begin =
        has_keyword ? static_cast<std::size_t>(kw.position(0))
                    : std::numeric_limits<std::size_t>::max();

    // A bare keyword form strictly before any complete mention means the
    // first action in reading order lacks its argument.
    if (has_keyword && (!full || keyword_begin < full->begin))
        raise(ErrorCode::MissingMagnitude,
              "action keyword without magnitude: \"" + kw[0].str() + "\"");
    if (!full)
        raise(ErrorCode::NoActionFound, "no action mention in: \"" + text + "\"");
    if (!full->magnitude_in_range)
        raise(ErrorCode::MagnitudeOutOfRange,
              "matched magnitude out of range in: \"" +
                  text.substr(full->begin, full->end - full->begin) + "\"");

    ParseReport report;
    report.action = full->action;
    report.span_begin = full->begin;
    report.span_end = full->end;
    report.canonical_text = format_action(report.action);
    return report;
}

std::vector<ParseReport> parse_all(const std::string& text,
                                   const ActionBounds& bounds) {
    std::vector<ParseReport> out;
    std::size_t from = 0;
    while (from < text.size()) {
        const auto m = find_first(text, from, bounds);
        if (!m) break;
        if (m->magnitude_in_range) {
            ParseReport report;
            report.action = m->action;
            report.span_begin = m->begin;
            report.span_end = m->end;
            report.canonical_text = format_action(report.action);
            out.push_back(std::move(report));
        }
        from = m->end;
    }
    return out;
}

std::string format_action(const Action& action) {
    switch (action.kind) {
        case ActionKind::Stop:
            return "stop";
        case ActionKind::Forward: {
            long long cm = std::llround(action.magnitude * 100.0);
            if (cm < 1) cm = 1;  // canonical text quantizes to whole cm
            return "move forward " + std::to_string(cm) + " cm";
        }
        case ActionKind::TurnLeft:
            return "turn left " + shortest_round_trip(action.magnitude) +
                   " degrees";
        case ActionKind::TurnRight:
            return "turn right " + shortest_round_trip(action.magnitude) +
                   " degrees";
    }
    return {};
}

}  // namespace midnav
