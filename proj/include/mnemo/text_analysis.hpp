#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace mnemo {

// Shared analyzer: ASCII-lowercase, split on every non-alphanumeric byte,
// drop empty tokens. Used by the lexical index, the reference embedder and
// the text metrics so all of them agree on what a "term" is.
std::vector<std::string> analyze_text(std::string_view text);

// analyze_text + order-preserving dedup (first occurrence wins).
std::vector<std::string> analyze_unique(std::string_view text);

}  // namespace mnemo
