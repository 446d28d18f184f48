#include "mnemo/eval/dataset.hpp"

#include <fstream>
#include <unordered_set>

#include "mnemo/errors.hpp"
#include "mnemo/message.hpp"
#include "mnemo/time.hpp"

namespace mnemo::eval {

namespace {

const nlohmann::json* field(const nlohmann::json& j, std::initializer_list<const char*> names) {
    for (const char* name : names)
        if (j.contains(name) && !j[name].is_null()) return &j[name];
    return nullptr;
}

std::string require_string(const nlohmann::json& j, std::initializer_list<const char*> names,
                           const std::string& what) {
    const auto* v = field(j, names);
    if (!v || !v->is_string()) throw Error("dataset: missing " + what);
    return v->get<std::string>();
}

std::string line_from_json(const nlohmann::json& item) {
    if (item.is_string()) return item.get<std::string>();
    if (item.is_object()) {
        auto ts = parse_iso8601(require_string(item, {"timestamp"}, "message timestamp"));
        if (!ts) {
            ts = parse_wall_clock(item["timestamp"].get<std::string>());
            if (!ts) throw Error("dataset: bad message timestamp");
        }
        return format_message_line(ParsedMessage{
            *ts, require_string(item, {"speaker"}, "message speaker"),
            require_string(item, {"text", "content"}, "message text")});
    }
    throw Error("dataset: each line must be a string or a message object");
}

}  // namespace

EvalDataset dataset_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw Error("dataset root must be a JSON object");
    EvalDataset ds;

    const auto* convs = field(j, {"conversations", "dialogues"});
    if (!convs || !convs->is_array()) throw Error("dataset: conversations array is required");
    std::unordered_set<std::string> conv_ids;
    for (const auto& jc : *convs) {
        EvalConversation conv;
        conv.id = require_string(jc, {"id", "conversation_id", "conv_id"}, "conversation id");
        if (!conv_ids.insert(conv.id).second)
            throw Error("dataset: duplicate conversation id " + conv.id);
        const auto* sessions = field(jc, {"sessions", "haystack_sessions"});
        if (!sessions || !sessions->is_array())
            throw Error("dataset: conversation " + conv.id + " needs a sessions array");
        int auto_sid = 1;
        for (const auto& js : *sessions) {
            EvalSession sess;
            const auto* sid = field(js, {"id", "session_id"});
            sess.id = sid && sid->is_string() ? sid->get<std::string>()
                                              : "s" + std::to_string(auto_sid);
            ++auto_sid;
            const auto* lines = field(js, {"lines", "messages"});
            if (!lines || !lines->is_array())
                throw Error("dataset: session " + sess.id + " needs a lines array");
            for (const auto& item : *lines) sess.lines.push_back(line_from_json(item));
            conv.sessions.push_back(std::move(sess));
        }
        ds.conversations.push_back(std::move(conv));
    }

    if (j.contains("evidence") && j["evidence"].is_object())
        for (const auto& [id, snippet] : j["evidence"].items())
            ds.evidence[id] = snippet.get<std::string>();

    const auto* questions = field(j, {"questions", "qa"});
    if (questions) {
        if (!questions->is_array()) throw Error("dataset: questions must be an array");
        int auto_qid = 1;
        std::unordered_set<std::string> qids;
        for (const auto& jq : *questions) {
            EvalQuestion q;
            const auto* qid = field(jq, {"id", "question_id"});
            q.id = qid && !qid->is_null()
                       ? (qid->is_string() ? qid->get<std::string>() : qid->dump())
                       : "q" + std::to_string(auto_qid);
            ++auto_qid;
            if (!qids.insert(q.id).second) throw Error("dataset: duplicate question id " + q.id);
            q.conversation_id =
                require_string(jq, {"conversation_id", "conv_id"}, "question conversation_id");
            if (!conv_ids.count(q.conversation_id))
                throw Error("dataset: question " + q.id + " references unknown conversation " +
                            q.conversation_id);
            q.text = require_string(jq, {"text", "question"}, "question text");
            q.gold_answer = require_string(jq, {"gold_answer", "answer", "expected_answer"},
                                           "question gold answer");
            const auto* qtype = field(jq, {"question_type", "type"});
            q.question_type =
                qtype && qtype->is_string() ? qtype->get<std::string>() : "unknown";
            const auto* ev = field(jq, {"evidence_ids", "evidence"});
            if (ev && ev->is_array())
                for (const auto& e : *ev)
                    q.evidence_ids.push_back(e.is_string() ? e.get<std::string>() : e.dump());
            ds.questions.push_back(std::move(q));
        }
    }
    return ds;
}

EvalDataset load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open dataset: " + path);
    auto j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw Error("dataset is not valid JSON: " + path);
    return dataset_from_json(j);
}

}  // namespace mnemo::eval
