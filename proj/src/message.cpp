#include "mnemo/message.hpp"

#include "mnemo/errors.hpp"

namespace mnemo {

ParsedMessage parse_message_line(const std::string& line) {
    if (line.size() < 2 || line[0] != '[')
        throw MalformedLineError("line must start with '[': " + line);
    auto close = line.find(']');
    if (close == std::string::npos) throw MalformedLineError("missing ']': " + line);
    auto ts = parse_wall_clock(line.substr(1, close - 1));
    if (!ts) throw MalformedLineError("bad timestamp: " + line);
    if (close + 1 >= line.size() || line[close + 1] != ' ')
        throw MalformedLineError("expected space after ']': " + line);
    auto sep = line.find(": ", close + 2);
    if (sep == std::string::npos) throw MalformedLineError("missing '<speaker>: ': " + line);
    std::string speaker = line.substr(close + 2, sep - close - 2);
    if (speaker.empty()) throw MalformedLineError("empty speaker: " + line);
    std::string text = line.substr(sep + 2);
    if (text.empty()) throw MalformedLineError("empty message text: " + line);
    return ParsedMessage{*ts, std::move(speaker), std::move(text)};
}

std::string format_message_line(const ParsedMessage& m) {
    return "[" + format_wall_clock(m.timestamp) + "] " + m.speaker + ": " + m.text;
}

std::vector<ParsedMessage> parse_transcript(const std::vector<std::string>& lines) {
    std::vector<ParsedMessage> out;
    out.reserve(lines.size());
    for (size_t i = 0; i < lines.size(); ++i) {
        std::string line = lines[i];
        while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
        try {
            out.push_back(parse_message_line(line));
        } catch (const MalformedLineError& e) {
            throw MalformedLineError("line " + std::to_string(i + 1) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace mnemo
