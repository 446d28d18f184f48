#include "mnemo/text_analysis.hpp"

#include <cctype>
#include <unordered_set>

namespace mnemo {

std::vector<std::string> analyze_text(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (unsigned char c : text) {
        if (std::isalnum(c)) {
            cur.push_back(char(std::tolower(c)));
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

std::vector<std::string> analyze_unique(std::string_view text) {
    auto tokens = analyze_text(text);
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    out.reserve(tokens.size());
    for (auto& t : tokens)
        if (seen.insert(t).second) out.push_back(std::move(t));
    return out;
}

}  // namespace mnemo
