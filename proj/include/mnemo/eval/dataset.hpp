#pragma once

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace mnemo::eval {

struct EvalSession {
    std::string id;
    std::vector<std::string> lines;  // transcript wire format
};

struct EvalConversation {
    std::string id;  // doubles as the owner id
    std::vector<EvalSession> sessions;
};

struct EvalQuestion {
    std::string id;
    std::string conversation_id;
    std::string text;
    std::string question_type;  // grouping key; "unknown" when absent
    std::string gold_answer;
    std::vector<std::string> evidence_ids;
};

struct EvalDataset {
    std::vector<EvalConversation> conversations;
    std::vector<EvalQuestion> questions;
    std::map<std::string, std::string> evidence;  // evidence id -> text snippet
};

// Accepts the native layout and common aliases from public long-term-memory
// benchmarks: conversations/dialogues, sessions/haystack_sessions,
// lines/messages (strings, or objects with timestamp/speaker/text),
// questions/qa, text/question, gold_answer/answer/expected_answer,
// id/question_id, question_type/type. Questions must reference an existing
// conversation. Evidence ids without a snippet in the top-level map are kept
// as unmatchable relevant items.
EvalDataset dataset_from_json(const nlohmann::json& j);
EvalDataset load_dataset(const std::string& path);

}  // namespace mnemo::eval
