#include "mnemo/query_analysis.hpp"

#include <cctype>
#include <chrono>
#include <regex>

namespace mnemo {

namespace {

using namespace std::chrono;

std::string lower(const std::string& s) {
    std::string out(s);
    for (auto& c : out) c = char(std::tolower((unsigned char)c));
    return out;
}

bool search(const std::string& text, const char* pattern, std::smatch* m = nullptr) {
    std::regex re(pattern, std::regex::icase);
    if (m) return std::regex_search(text, *m, re);
    std::smatch tmp;
    return std::regex_search(text, tmp, re);
}

const char* kMonths[12] = {"january", "february", "march",     "april",   "may",      "june",
                           "july",    "august",   "september", "october", "november", "december"};

int month_from_name(std::string name) {
    name = lower(name);
    for (int i = 0; i < 12; ++i) {
        std::string full = kMonths[i];
        if (name == full || name == full.substr(0, 3)) return i + 1;
    }
    return 0;
}

const char* kWeekdays[7] = {"sunday", "monday", "tuesday", "wednesday",
                            "thursday", "friday", "saturday"};

int weekday_from_name(std::string name) {
    name = lower(name);
    for (int i = 0; i < 7; ++i)
        if (name == kWeekdays[i]) return i;  // 0 = Sunday, matching chrono encoding
    return -1;
}

year_month_day clamp_ymd(year_month_day ymd) {
    if (!ymd.ok()) ymd = ymd.year() / ymd.month() / last;
    return ymd;
}

UtcDays minus_months(UtcDays d, int n) {
    year_month_day ymd{d};
    return sys_days{clamp_ymd(ymd - months{n})};
}

UtcDays minus_years(UtcDays d, int n) {
    year_month_day ymd{d};
    return sys_days{clamp_ymd(ymd - years{n})};
}

}  // namespace

QueryAnalysis analyze_query(const std::string& query, UtcSeconds now, const TemporalConfig& cfg) {
    QueryAnalysis out;
    const std::string q = lower(query);
    const UtcDays today = to_midnight(now);

    out.include_historical = search(q, R"(\bprevious\b)") || search(q, R"(\ball\s+my\b)") ||
                             search(q, R"(\bhistory\b)") || search(q, R"(\bjourney\b)") ||
                             search(q, R"(\bover\s+time\b)");

    std::smatch m;
    std::optional<UtcDays> ref;
    std::optional<TemporalClass> cls;

    // ISO date, e.g. "2024-05-08".
    if (search(q, R"((\d{4})-(\d{2})-(\d{2}))", &m)) {
        year_month_day ymd{year{std::stoi(m[1])}, month{unsigned(std::stoi(m[2]))},
                           day{unsigned(std::stoi(m[3]))}};
        if (ymd.ok()) {
            ref = sys_days{ymd};
            cls = TemporalClass::explicit_date;
        }
    }
    // "on May 8th" — most recent such date not after today.
    if (!ref &&
        search(q,
               R"(\bon\s+(january|february|march|april|may|june|july|august|september|october|november|december|jan|feb|mar|apr|jun|jul|aug|sep|oct|nov|dec)\.?\s+(\d{1,2})(st|nd|rd|th)?\b)",
               &m)) {
        int mo = month_from_name(m[1]);
        unsigned dy = unsigned(std::stoi(m[2]));
        year_month_day base{today};
        for (int back = 0; back < 8; ++back) {
            year_month_day cand{base.year() - years{back}, month{unsigned(mo)}, day{dy}};
            if (cand.ok() && sys_days{cand} <= today) {
                ref = sys_days{cand};
                cls = TemporalClass::explicit_date;
                break;
            }
        }
    }
    // "last Tuesday" — most recent such weekday strictly before today.
    if (!ref &&
        search(q, R"(\blast\s+(monday|tuesday|wednesday|thursday|friday|saturday|sunday)\b)", &m)) {
        int target = weekday_from_name(m[1]);
        int cur = int(weekday{today}.c_encoding());
        int delta = (cur - target + 7) % 7;
        if (delta == 0) delta = 7;
        ref = today - days{delta};
        cls = TemporalClass::explicit_date;
    }
    if (!ref && search(q, R"(\byesterday\b)")) {
        ref = today - days{1};
        cls = TemporalClass::day_relative;
    }
    if (!ref && search(q, R"(\btoday\b)")) {
        ref = today;
        cls = TemporalClass::day_relative;
    }
    if (!ref && search(q, R"(\btomorrow\b)")) {
        ref = today + days{1};
        cls = TemporalClass::day_relative;
    }
    if (!ref && search(q, R"(\blast\s+week\b)")) {
        ref = today - days{7};
        cls = TemporalClass::last_week;
    }
    if (!ref && search(q, R"(\blast\s+month\b)")) {
        ref = minus_months(today, 1);
        cls = TemporalClass::last_month;
    }
    if (!ref && search(q, R"(\blast\s+year\b)")) {
        ref = minus_years(today, 1);
        cls = TemporalClass::last_year;
    }
    // "3 days ago", "2 weeks ago", ...
    if (!ref && search(q, R"(\b(\d+)\s+(day|week|month|year)s?\s+ago\b)", &m)) {
        int n = std::stoi(m[1]);
        std::string unit = m[2];
        if (unit == "day")
            ref = today - days{n};
        else if (unit == "week")
            ref = today - days{7 * n};
        else if (unit == "month")
            ref = minus_months(today, n);
        else
            ref = minus_years(today, n);
        cls = TemporalClass::generic;
    }
    // Bare temporal wording without a resolvable phrase anchors to today.
    if (!ref && (search(q, R"(\bwhen\b)") || search(q, R"(\bago\b)") || search(q, R"(\brecently\b)"))) {
        ref = today;
        cls = TemporalClass::generic;
    }

    if (ref) {
        out.temporal_intent = true;
        out.reference_date = *ref;
        out.temporal_class = *cls;
        out.window_days = cfg.window_table.at(*cls);
    }
    return out;
}

}  // namespace mnemo
