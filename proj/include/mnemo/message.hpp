#pragma once

#include <string>
#include <vector>

#include "mnemo/types.hpp"

namespace mnemo {

struct ParsedMessage {
    UtcSeconds timestamp{};
    std::string speaker;
    std::string text;
};

// Parses one transcript line: "[YYYY-MM-DD HH:MM:SS] <speaker>: <text>".
// The speaker is everything up to the first ": " after the bracket, so the
// text may itself contain colons. Throws MalformedLineError with a reason.
ParsedMessage parse_message_line(const std::string& line);

std::string format_message_line(const ParsedMessage& m);

// Parses a whole transcript; all-or-nothing. The line number (1-based) of the
// first bad line is included in the error message.
std::vector<ParsedMessage> parse_transcript(const std::vector<std::string>& lines);

}  // namespace mnemo
