#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mnemo/embedder.hpp"
#include "mnemo/types.hpp"

namespace mnemo {

enum class OpAction { add, update, del, none };

const char* to_string(OpAction a);
std::optional<OpAction> op_action_from_string(std::string s);

struct ExtractionOp {
    OpAction action = OpAction::none;
    std::string fact;                        // ADD / UPDATE
    std::optional<std::string> replaces_id;  // UPDATE / DELETE; must come from context
    std::optional<Category> category;        // UPDATE inherits from target when absent
    std::optional<UtcDays> event_date;
};

// Turns a batch of unprocessed messages plus the retrieved memory context into
// a list of operations. Implementations must only use replaces_id values that
// appear in the supplied context.
class Extractor {
public:
    virtual ~Extractor() = default;
    virtual std::vector<ExtractionOp> extract(const std::vector<MessageRecord>& batch,
                                              const std::vector<MemoryRecord>& context) = 0;
};

// Deterministic pattern extractor. Splits user messages into sentences,
// normalizes first-person statements into speaker-attributed facts through a
// template table ("I moved to Lisbon" -> "James lives in Lisbon"), assigns a
// category by keyword, and resolves relative dates against the message
// timestamp. Emits UPDATE instead of ADD when a new fact either (a) shares its
// subject/predicate head with a current context memory but changes the object,
// or (b) embeds within cosine > update_threshold of one while differing in
// text. Exact duplicates become NONE; "forget/delete ..." requests become
// DELETE against the best-overlapping context memory.
class RuleBasedExtractor final : public Extractor {
public:
    explicit RuleBasedExtractor(std::shared_ptr<Embedder> embedder = nullptr,
                                double update_threshold = 0.95,
                                std::string assistant_speaker = "Assistant")
        : embedder_(std::move(embedder)),
          update_threshold_(update_threshold),
          assistant_speaker_(std::move(assistant_speaker)) {}

    std::vector<ExtractionOp> extract(const std::vector<MessageRecord>& batch,
                                      const std::vector<MemoryRecord>& context) override;

private:
    std::shared_ptr<Embedder> embedder_;
    double update_threshold_;
    std::string assistant_speaker_;
};

// POST {"messages": [...transcript lines...],
//       "existing_memories": [{"id", "content", "category"}, ...]}
//   -> {"operations": [{"action", "fact"?, "replaces_id"?, "category"?, "event_date"?}, ...]}
class RemoteExtractor final : public Extractor {
public:
    explicit RemoteExtractor(std::string endpoint, int timeout_ms = 5000)
        : endpoint_(std::move(endpoint)), timeout_ms_(timeout_ms) {}

    std::vector<ExtractionOp> extract(const std::vector<MessageRecord>& batch,
                                      const std::vector<MemoryRecord>& context) override;

private:
    std::string endpoint_;
    int timeout_ms_;
};

}  // namespace mnemo
