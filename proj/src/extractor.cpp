#include "mnemo/extractor.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <regex>
#include <unordered_set>

#include "mnemo/errors.hpp"
#include "mnemo/message.hpp"
#include "mnemo/remote.hpp"
#include "mnemo/text_analysis.hpp"

namespace mnemo {

const char* to_string(OpAction a) {
    switch (a) {
        case OpAction::add: return "ADD";
        case OpAction::update: return "UPDATE";
        case OpAction::del: return "DELETE";
        case OpAction::none: return "NONE";
    }
    return "NONE";
}

std::optional<OpAction> op_action_from_string(std::string s) {
    for (auto& c : s) c = char(std::toupper((unsigned char)c));
    if (s == "ADD") return OpAction::add;
    if (s == "UPDATE") return OpAction::update;
    if (s == "DELETE") return OpAction::del;
    if (s == "NONE") return OpAction::none;
    return std::nullopt;
}

namespace {

using namespace std::chrono;

std::string lower(std::string s) {
    for (auto& c : s) c = char(std::tolower((unsigned char)c));
    return s;
}

std::string trim(std::string s) {
    auto issp = [](unsigned char c) { return std::isspace(c) != 0; };
    while (!s.empty() && issp(s.front())) s.erase(s.begin());
    while (!s.empty() && issp(s.back())) s.pop_back();
    return s;
}

std::vector<std::string> split_sentences(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == '.' || c == '!' || c == '?') {
            auto t = trim(cur);
            if (!t.empty()) out.push_back(t);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    auto t = trim(cur);
    if (!t.empty()) out.push_back(t);
    return out;
}

// Discourse fluff that may precede the actual statement.
std::string strip_lead_ins(std::string s) {
    static const std::regex lead(R"(^(actually|but|and|so|well|oh|also|anyway|by the way)[,\s]+)",
                                 std::regex::icase);
    std::smatch m;
    while (std::regex_search(s, m, lead)) s = s.substr(m[0].length());
    return trim(s);
}

const char* kMonths[12] = {"january", "february", "march",     "april",   "may",      "june",
                           "july",    "august",   "september", "october", "november", "december"};

int month_from_name(std::string name) {
    name = lower(std::move(name));
    for (int i = 0; i < 12; ++i) {
        std::string full = kMonths[i];
        if (name == full || name == full.substr(0, 3)) return i + 1;
    }
    return 0;
}

// Most recent occurrence of (month, day) at or before the anchor date.
std::optional<UtcDays> resolve_month_day(int mo, unsigned dy, UtcDays anchor) {
    year_month_day base{anchor};
    for (int back = 0; back < 8; ++back) {
        year_month_day cand{base.year() - years{back}, month{unsigned(mo)}, day{dy}};
        if (cand.ok() && UtcDays{cand} <= anchor) return UtcDays{cand};
    }
    return std::nullopt;
}

std::optional<UtcDays> extract_event_date(const std::string& sentence_lower, UtcSeconds msg_ts) {
    const UtcDays msg_day = to_midnight(msg_ts);
    std::smatch m;

    static const std::regex iso(R"((\d{4})-(\d{2})-(\d{2}))");
    if (std::regex_search(sentence_lower, m, iso)) {
        year_month_day ymd{year{std::stoi(m[1])}, month{unsigned(std::stoi(m[2]))},
                           day{unsigned(std::stoi(m[3]))}};
        if (ymd.ok()) return UtcDays{ymd};
    }
    static const std::regex month_day(
        R"(\bon\s+(january|february|march|april|may|june|july|august|september|october|november|december|jan|feb|mar|apr|jun|jul|aug|sep|oct|nov|dec)\.?\s+(\d{1,2})(st|nd|rd|th)?\b)");
    if (std::regex_search(sentence_lower, m, month_day))
        return resolve_month_day(month_from_name(m[1]), unsigned(std::stoi(m[2])), msg_day);
    static const std::regex yesterday(R"(\byesterday\b)");
    if (std::regex_search(sentence_lower, m, yesterday)) return msg_day - days{1};
    static const std::regex today(R"(\btoday\b|\bthis morning\b|\btonight\b)");
    if (std::regex_search(sentence_lower, m, today)) return msg_day;
    static const std::regex tomorrow(R"(\btomorrow\b)");
    if (std::regex_search(sentence_lower, m, tomorrow)) return msg_day + days{1};
    return std::nullopt;
}

// A normalized candidate fact. head identifies the subject/predicate slot:
// facts sharing a head are mutually exclusive (a person lives in one place),
// so a head collision with a different object means the fact changed.
struct Candidate {
    std::string fact;
    std::string head;  // empty: not exclusive
    Category category = Category::misc;
    bool category_fixed = false;
};

std::string strip_article(std::string s) {
    static const std::regex art(R"(^(a|an|the)\s+)", std::regex::icase);
    std::smatch m;
    if (std::regex_search(s, m, art)) s = s.substr(m[0].length());
    return trim(s);
}

// Keeps original casing for the payload while matching on the lowered form.
struct Template {
    std::regex re;
    // builds (fact, head, category) from speaker + match against original text
    Candidate (*build)(const std::string& speaker, const std::smatch& m);
};

std::string key(const std::string& s) {
    auto toks = analyze_text(s);
    std::string out;
    for (auto& t : toks) {
        if (!out.empty()) out.push_back('_');
        out += t;
    }
    return out;
}

const std::vector<Template>& templates() {
    static const std::vector<Template> table = [] {
        std::vector<Template> t;
        auto add = [&](const char* pattern, Candidate (*fn)(const std::string&, const std::smatch&)) {
            t.push_back(Template{std::regex(pattern, std::regex::icase), fn});
        };
        // new job / place of work
        add(R"(^i\s+(?:just\s+)?(?:got|landed|started|accepted)\s+(?:a\s+)?(?:new\s+)?(?:job|position|role)\s+(?:at|with)\s+(.+)$)",
            +[](const std::string& sp, const std::smatch& m) {
                return Candidate{sp + " works at " + trim(m[1]), lower(sp) + "|works_at",
                                 Category::professional, true};
            });
        add(R"(^i\s+(?:now\s+)?work\s+(?:at|for)\s+(.+)$)",
            +[](const std::string& sp, const std::smatch& m) {
                return Candidate{sp + " works at " + trim(m[1]), lower(sp) + "|works_at",
                                 Category::professional, true};
            });
        add(R"(^i\s+(?:now\s+)?work\s+as\s+(.+)$)",
            +[](const std::string& sp, const std::smatch& m) {
                return Candidate{sp + " works as " + strip_article(trim(m[1])),
                                 lower(sp) + "|works_as", Category::professional, true};
            });
        // home
        add(R"(^i\s*(?:'m|\s+am)?\s*(?:just\s+)?mov(?:ed|ing)\s+to\s+(.+)$)",
            +[](const std::string& sp, const std::smatch& m) {
                std::string place = trim(m[1]);
                // drop a trailing date phrase from the object; it lands in event_date
                static const std::regex when(
                    R"(\s+(on\s+\w+\.?\s+\d{1,2}(st|nd|rd|th)?|yesterday|today|tomorrow|last\s+\w+|\d{4}-\d{2}-\d{2}).*$)",
                    std::regex::icase);
                place = std::regex_replace(place, when, "");
                return Candidate{sp + " lives in " + trim(place), lower(sp) + "|lives_in",
                                 Category::personal_details, true};
            });
        add(R"(^i\s+live\s+in\s+(.+)$)",
            +[](const std::string& sp, const std::smatch& m) {
                return Candidate{sp + " lives in " + trim(m[1]), lower(sp) + "|lives_in",
                                 Category::personal_details, true};
            });
        // favorites
        add(R"(^my\s+favorite\s+(.+?)\s+is\s+(.+)$)",
            +[](const std::string& sp, const std::smatch& m) {
                return Candidate{sp + "'s favorite " + trim(m[1]) + " is " + trim(m[2]),
                                 lower(sp) + "|favorite|" + key(m[1]), Category::preferences, true};
            });
        // allergies
        add(R"(^i\s*(?:'m|\s+am)\s+allergic\s+to\s+(.+)$)",
            +[](const std::string& sp, const std::smatch& m) {
                return Candidate{sp + " is allergic to " + trim(m[1]),
                                 lower(sp) + "|allergic|" + key(m[1]), Category::health, true};
            });
        // likes (non-exclusive)
        add(R"(^i\s+(?:really\s+)?(?:like|love|enjoy)\s+(.+)$)",
            +[](const std::string& sp, const std::smatch& m) {
                return Candidate{sp + " likes " + trim(m[1]), "", Category::preferences, false};
            });
        // goals
        add(R"(^i\s+(?:want|plan|hope|aim)\s+to\s+(.+)$)",
            +[](const std::string& sp, const std::smatch& m) {
                return Candidate{sp + " wants to " + trim(m[1]), "", Category::goals, true};
            });
        add(R"(^my\s+goal\s+is\s+to\s+(.+)$)",
            +[](const std::string& sp, const std::smatch& m) {
                return Candidate{sp + " wants to " + trim(m[1]), "", Category::goals, true};
            });
        // relationships
        add(R"(^my\s+(wife|husband|partner|girlfriend|boyfriend|mother|father|mom|dad|sister|brother|son|daughter)\s*(?:'s name)?\s+is\s+(?:named\s+|called\s+)?(.+)$)",
            +[](const std::string& sp, const std::smatch& m) {
                return Candidate{sp + "'s " + lower(m[1]) + " is " + trim(m[2]),
                                 lower(sp) + "|rel|" + lower(m[1]), Category::relationships, true};
            });
        add(R"(^my\s+name\s+is\s+(.+)$)",
            +[](const std::string& sp, const std::smatch& m) {
                return Candidate{sp + "'s name is " + trim(m[1]), lower(sp) + "|name",
                                 Category::personal_details, true};
            });
        // travel
        add(R"(^i\s+(?:visited|traveled\s+to|travelled\s+to|went\s+to)\s+(.+)$)",
            +[](const std::string& sp, const std::smatch& m) {
                return Candidate{sp + " visited " + trim(m[1]), "", Category::travel, true};
            });
        // generic copula
        add(R"(^i\s*(?:'m|\s+am)\s+(.+)$)",
            +[](const std::string& sp, const std::smatch& m) {
                return Candidate{sp + " is " + strip_article(trim(m[1])), "", Category::misc, false};
            });
        return t;
    }();
    return table;
}

struct CategoryRule {
    Category category;
    std::vector<std::string> words;    // match whole analyzed tokens
    std::vector<std::string> phrases;  // match as substring of the lowered sentence
};

const std::vector<CategoryRule>& category_rules() {
    static const std::vector<CategoryRule> rules = {
        {Category::health,
         {"doctor", "allergic", "allergy", "sick", "ill", "illness", "medication", "diagnosis",
          "surgery", "injury", "migraine", "therapy"},
         {}},
        {Category::relationships,
         {"wife", "husband", "partner", "girlfriend", "boyfriend", "friend", "mother", "father",
          "mom", "dad", "sister", "brother", "son", "daughter", "married"},
         {}},
        {Category::professional,
         {"job", "work", "works", "working", "career", "promotion", "promoted", "company", "boss",
          "office", "colleague", "engineer", "manager", "startup"},
         {}},
        {Category::education,
         {"school", "university", "college", "degree", "course", "studied", "studying", "exam",
          "thesis", "phd"},
         {}},
        {Category::finance,
         {"money", "salary", "invest", "investment", "savings", "loan", "mortgage", "budget",
          "debt", "stocks"},
         {}},
        {Category::travel,
         {"travel", "traveled", "trip", "visited", "visiting", "flight", "vacation", "abroad"},
         {}},
        {Category::hobbies,
         {"hobby", "hiking", "painting", "guitar", "piano", "chess", "photography", "gardening",
          "climbing", "knitting", "cycling", "pottery"},
         {}},
        {Category::goals, {"goal", "goals", "aspire", "ambition"}, {"want to", "plan to", "hope to"}},
        {Category::habits,
         {"habit", "routine", "daily", "usually"},
         {"every day", "every morning", "every week"}},
        {Category::beliefs, {"believe", "belief", "beliefs", "religious", "vegetarian", "vegan"}, {}},
        {Category::events,
         {"birthday", "wedding", "party", "concert", "anniversary", "conference", "festival"},
         {}},
        {Category::emotional,
         {"happy", "sad", "excited", "anxious", "stressed", "nervous", "proud", "angry", "feel",
          "feeling", "thrilled", "worried"},
         {}},
        {Category::preferences,
         {"favorite", "favourite", "prefer", "prefers", "likes", "loves", "enjoys", "hate",
          "hates", "dislike"},
         {}},
        {Category::personal_details,
         {"name", "age", "born", "lives", "address", "moved", "birthday"},
         {}},
    };
    return rules;
}

Category categorize(const std::string& fact) {
    const std::string low = lower(fact);
    auto tokens = analyze_text(low);
    std::unordered_set<std::string> set(tokens.begin(), tokens.end());
    for (const auto& rule : category_rules()) {
        for (const auto& w : rule.words)
            if (set.count(w)) return rule.category;
        for (const auto& p : rule.phrases)
            if (low.find(p) != std::string::npos) return rule.category;
    }
    return Category::misc;
}

// Re-derives the exclusivity head of a normalized fact so structurally
// conflicting statements can be matched against existing memories.
std::string derive_head(const std::string& content) {
    static const std::regex works_at(R"(^(.+?)\s+works\s+at\s+.+$)", std::regex::icase);
    static const std::regex works_as(R"(^(.+?)\s+works\s+as\s+.+$)", std::regex::icase);
    static const std::regex lives_in(R"(^(.+?)\s+lives\s+in\s+.+$)", std::regex::icase);
    static const std::regex favorite(R"(^(.+?)'s\s+favorite\s+(.+?)\s+is\s+.+$)", std::regex::icase);
    static const std::regex rel(
        R"(^(.+?)'s\s+(wife|husband|partner|girlfriend|boyfriend|mother|father|mom|dad|sister|brother|son|daughter)\s+is\s+.+$)",
        std::regex::icase);
    static const std::regex allergic(R"(^(.+?)\s+is\s+allergic\s+to\s+(.+)$)", std::regex::icase);
    static const std::regex name(R"(^(.+?)'s\s+name\s+is\s+.+$)", std::regex::icase);
    std::smatch m;
    if (std::regex_match(content, m, name)) return lower(m[1]) + "|name";
    if (std::regex_match(content, m, works_at)) return lower(m[1]) + "|works_at";
    if (std::regex_match(content, m, works_as)) return lower(m[1]) + "|works_as";
    if (std::regex_match(content, m, lives_in)) return lower(m[1]) + "|lives_in";
    if (std::regex_match(content, m, favorite)) return lower(m[1]) + "|favorite|" + key(m[2]);
    if (std::regex_match(content, m, rel)) return lower(m[1]) + "|rel|" + lower(m[2]);
    if (std::regex_match(content, m, allergic)) return lower(m[1]) + "|allergic|" + key(m[2]);
    return "";
}

// Inflection-tolerant: tokens also match on a shared prefix of length >= 4,
// so "peanut allergy" finds "allergic to peanuts".
bool tokens_match(const std::string& a, const std::string& b) {
    if (a == b) return true;
    std::size_t common = 0;
    while (common < a.size() && common < b.size() && a[common] == b[common]) ++common;
    return common >= 4;
}

int token_overlap(const std::string& a, const std::string& b) {
    auto ta = analyze_text(a);
    auto tb = analyze_text(b);
    int n = 0;
    std::unordered_set<std::string> counted;
    for (auto& t : tb) {
        if (!counted.insert(t).second) continue;
        for (auto& s : ta) {
            if (tokens_match(s, t)) {
                ++n;
                break;
            }
        }
    }
    return n;
}

}  // namespace

std::vector<ExtractionOp> RuleBasedExtractor::extract(const std::vector<MessageRecord>& batch,
                                                      const std::vector<MemoryRecord>& context) {
    std::vector<ExtractionOp> ops;
    // (head or fact) -> index into ops, for batch-internal conflict resolution
    std::unordered_map<std::string, std::size_t> head_slot;
    std::unordered_set<std::string> batch_facts;

    std::vector<const MemoryRecord*> current_context;
    for (const auto& mem : context)
        if (mem.is_current && mem.status == MemoryStatus::active) current_context.push_back(&mem);

    for (const auto& msg : batch) {
        if (lower(msg.speaker) == lower(assistant_speaker_)) continue;
        for (const auto& raw : split_sentences(msg.text)) {
            const std::string sentence = strip_lead_ins(raw);
            const std::string low = lower(sentence);

            // forget/delete requests
            static const std::regex forget(
                R"(^(?:please\s+)?(?:forget|delete|remove)\s+(?:about\s+)?(?:that\s+|my\s+|the\s+)?(.+)$)",
                std::regex::icase);
            std::smatch fm;
            if (std::regex_match(sentence, fm, forget)) {
                const MemoryRecord* best = nullptr;
                int best_overlap = 0;
                for (const auto* mem : current_context) {
                    int ov = token_overlap(mem->content, fm[1]);
                    if (ov > best_overlap ||
                        (ov == best_overlap && best && ov > 0 && mem->id < best->id)) {
                        best = mem;
                        best_overlap = ov;
                    }
                }
                if (best && best_overlap > 0) {
                    ExtractionOp op;
                    op.action = OpAction::del;
                    op.replaces_id = best->id;
                    ops.push_back(std::move(op));
                }
                continue;
            }

            // normalize through the template table
            Candidate cand;
            bool matched = false;
            for (const auto& tpl : templates()) {
                std::smatch m;
                if (std::regex_match(sentence, m, tpl.re)) {
                    cand = tpl.build(msg.speaker, m);
                    matched = true;
                    break;
                }
            }
            if (!matched) {
                // unmatched first-person sentences are attributed verbatim
                if (low.rfind("i ", 0) == 0)
                    cand = Candidate{msg.speaker + sentence.substr(1), "", Category::misc, false};
                else
                    continue;
            }
            // a trailing date phrase stays out of exact-duplicate comparison
            if (!cand.category_fixed || cand.category == Category::misc)
                cand.category = categorize(cand.fact);

            ExtractionOp op;
            op.fact = cand.fact;
            op.category = cand.category;
            op.event_date = extract_event_date(low, msg.timestamp);
            op.action = OpAction::add;

            // exact duplicate of an existing memory -> NONE
            bool duplicate = false;
            for (const auto* mem : current_context) {
                if (mem->content == cand.fact) {
                    duplicate = true;
                    break;
                }
            }
            if (duplicate) {
                op.action = OpAction::none;
                ops.push_back(std::move(op));
                continue;
            }
            // The same statement repeated within one batch adds exactly once.
            if (batch_facts.count(cand.fact)) continue;

            // structural conflict with an existing memory -> UPDATE
            if (!cand.head.empty()) {
                for (const auto* mem : current_context) {
                    if (derive_head(mem->content) == cand.head) {
                        op.action = OpAction::update;
                        op.replaces_id = mem->id;
                        break;
                    }
                }
            }
            // high-similarity conflict -> UPDATE
            if (op.action == OpAction::add && embedder_ && !current_context.empty()) {
                Embedding768 fe = embedder_->embed(cand.fact, EmbedRole::document);
                for (const auto* mem : current_context) {
                    if (mem->content == cand.fact) continue;
                    Embedding768 me = embedder_->embed(mem->content, EmbedRole::document);
                    if (fe.dot(me) > update_threshold_) {
                        op.action = OpAction::update;
                        op.replaces_id = mem->id;
                        break;
                    }
                }
            }

            // batch-internal conflict: the later statement wins the slot
            std::string slot = cand.head.empty() ? "fact|" + cand.fact : cand.head;
            auto it = head_slot.find(slot);
            if (it != head_slot.end()) {
                ops[it->second] = op;
            } else {
                head_slot.emplace(slot, ops.size());
                batch_facts.insert(cand.fact);
                ops.push_back(std::move(op));
            }
        }
    }
    return ops;
}

std::vector<ExtractionOp> RemoteExtractor::extract(const std::vector<MessageRecord>& batch,
                                                   const std::vector<MemoryRecord>& context) {
    nlohmann::json messages = nlohmann::json::array();
    for (const auto& msg : batch)
        messages.push_back(
            format_message_line(ParsedMessage{msg.timestamp, msg.speaker, msg.text}));
    nlohmann::json existing = nlohmann::json::array();
    for (const auto& mem : context)
        existing.push_back({{"id", mem.id},
                            {"content", mem.content},
                            {"category", to_string(mem.category)}});

    auto reply = post_json("extractor", endpoint_,
                           {{"messages", messages}, {"existing_memories", existing}}, timeout_ms_);
    if (!reply.contains("operations") || !reply["operations"].is_array())
        throw RemoteError("extractor", "reply must carry an operations array");

    std::vector<ExtractionOp> ops;
    for (const auto& item : reply["operations"]) {
        if (!item.is_object() || !item.contains("action") || !item["action"].is_string())
            throw RemoteError("extractor", "each operation needs a string action");
        auto action = op_action_from_string(item["action"].get<std::string>());
        if (!action) throw RemoteError("extractor", "unknown action " + item["action"].dump());
        ExtractionOp op;
        op.action = *action;
        if (item.contains("fact") && item["fact"].is_string())
            op.fact = item["fact"].get<std::string>();
        if (item.contains("replaces_id") && !item["replaces_id"].is_null()) {
            if (item["replaces_id"].is_string())
                op.replaces_id = item["replaces_id"].get<std::string>();
            else if (item["replaces_id"].is_number_integer())
                op.replaces_id = std::to_string(item["replaces_id"].get<long long>());
            else
                throw RemoteError("extractor", "replaces_id must be a string or integer");
        }
        if (item.contains("category") && item["category"].is_string())
            op.category = category_from_string(item["category"].get<std::string>())
                              .value_or(Category::misc);
        if (item.contains("event_date") && item["event_date"].is_string()) {
            auto d = parse_date(item["event_date"].get<std::string>());
            if (!d) throw RemoteError("extractor", "bad event_date " + item["event_date"].dump());
            op.event_date = d;
        }
        ops.push_back(std::move(op));
    }
    return ops;
}

}  // namespace mnemo
