#include <doctest.h>

#include "mnemo/query_analysis.hpp"
#include "mnemo/time.hpp"

using namespace mnemo;

namespace {

const TemporalConfig kCfg{};

QueryAnalysis at(const std::string& query, const std::string& now_iso) {
    return analyze_query(query, *parse_iso8601(now_iso), kCfg);
}

std::string ref_of(const QueryAnalysis& a) {
    REQUIRE(a.reference_date.has_value());
    return format_date(*a.reference_date);
}

}  // namespace

TEST_CASE("plain queries carry no temporal or history intent") {
    auto a = at("what is my favorite color", "2024-05-10T15:00:00Z");
    CHECK_FALSE(a.temporal_intent);
    CHECK_FALSE(a.include_historical);
    CHECK_FALSE(a.reference_date.has_value());
    CHECK_FALSE(a.window_days.has_value());
}

TEST_CASE("history keywords flip include_historical") {
    CHECK(at("show my previous jobs", "2024-05-10T15:00:00Z").include_historical);
    CHECK(at("all my addresses", "2024-05-10T15:00:00Z").include_historical);
    CHECK(at("employment history", "2024-05-10T15:00:00Z").include_historical);
    CHECK(at("my career journey", "2024-05-10T15:00:00Z").include_historical);
    CHECK(at("how did this change over time", "2024-05-10T15:00:00Z").include_historical);
    CHECK_FALSE(at("previously I lived in Rome", "2024-05-10T15:00:00Z").include_historical);
}

TEST_CASE("ISO dates resolve with a 3-day window") {
    auto a = at("what happened on 2024-05-08?", "2024-06-01T00:00:00Z");
    CHECK(a.temporal_intent);
    CHECK(a.temporal_class == TemporalClass::explicit_date);
    CHECK(ref_of(a) == "2024-05-08");
    CHECK(*a.window_days == 3.0);
}

TEST_CASE("month-day phrases pick the most recent occurrence not after now") {
    SUBCASE("earlier this year") {
        auto a = at("what did I do on May 8th", "2024-05-10T15:00:00Z");
        CHECK(ref_of(a) == "2024-05-08");
        CHECK(a.temporal_class == TemporalClass::explicit_date);
    }
    SUBCASE("date later in the calendar year falls back to last year") {
        auto a = at("what happened on December 25", "2024-05-10T15:00:00Z");
        CHECK(ref_of(a) == "2023-12-25");
    }
    SUBCASE("abbreviated month") {
        auto a = at("the concert on Mar 3rd", "2024-05-10T15:00:00Z");
        CHECK(ref_of(a) == "2024-03-03");
    }
    SUBCASE("leap day resolves to the last leap year") {
        auto a = at("on February 29", "2025-03-01T00:00:00Z");
        CHECK(ref_of(a) == "2024-02-29");
    }
}

TEST_CASE("last <weekday> is strictly before today") {
    // 2024-05-10 is a Friday; last Tuesday is 2024-05-07.
    auto a = at("what did I do last Tuesday", "2024-05-10T15:00:00Z");
    CHECK(a.temporal_intent);
    CHECK(a.temporal_class == TemporalClass::explicit_date);
    CHECK(ref_of(a) == "2024-05-07");
    CHECK(*a.window_days == 3.0);

    // "last Friday" on a Friday means a week back, not today.
    auto b = at("dinner last Friday", "2024-05-10T15:00:00Z");
    CHECK(ref_of(b) == "2024-05-03");
}

TEST_CASE("day-relative words use a 2-day window") {
    auto y = at("what did I say yesterday", "2024-05-10T15:00:00Z");
    CHECK(ref_of(y) == "2024-05-09");
    CHECK(y.temporal_class == TemporalClass::day_relative);
    CHECK(*y.window_days == 2.0);

    auto t = at("what happened today", "2024-05-10T15:00:00Z");
    CHECK(ref_of(t) == "2024-05-10");

    auto m = at("what is planned for tomorrow", "2024-05-10T15:00:00Z");
    CHECK(ref_of(m) == "2024-05-11");
}

TEST_CASE("coarse ranges resolve to their class windows") {
    auto w = at("what did I do last week", "2024-05-10T15:00:00Z");
    CHECK(ref_of(w) == "2024-05-03");
    CHECK(w.temporal_class == TemporalClass::last_week);
    CHECK(*w.window_days == 10.0);

    auto mo = at("trips last month", "2024-05-10T15:00:00Z");
    CHECK(ref_of(mo) == "2024-04-10");
    CHECK(mo.temporal_class == TemporalClass::last_month);
    CHECK(*mo.window_days == 35.0);

    auto yr = at("where did I live last year", "2024-05-10T15:00:00Z");
    CHECK(ref_of(yr) == "2023-05-10");
    CHECK(yr.temporal_class == TemporalClass::last_year);
    CHECK(*yr.window_days == 370.0);
}

TEST_CASE("month arithmetic clamps to the end of shorter months") {
    auto a = at("bills last month", "2024-03-31T12:00:00Z");
    CHECK(ref_of(a) == "2024-02-29");  // 2024 is a leap year
    auto b = at("bills last month", "2023-03-31T12:00:00Z");
    CHECK(ref_of(b) == "2023-02-28");
}

TEST_CASE("N units ago resolves arithmetically with the generic window") {
    auto d = at("what happened 3 days ago", "2024-05-10T15:00:00Z");
    CHECK(ref_of(d) == "2024-05-07");
    CHECK(d.temporal_class == TemporalClass::generic);
    CHECK(*d.window_days == 30.0);

    auto w = at("the meeting 2 weeks ago", "2024-05-10T15:00:00Z");
    CHECK(ref_of(w) == "2024-04-26");

    auto mo = at("6 months ago I started", "2024-05-10T15:00:00Z");
    CHECK(ref_of(mo) == "2023-11-10");

    auto yr = at("2 years ago", "2024-05-10T15:00:00Z");
    CHECK(ref_of(yr) == "2022-05-10");
}

TEST_CASE("bare temporal wording anchors to today with the generic window") {
    for (const char* q : {"when did I adopt the dog", "how long ago was that",
                          "what did I buy recently"}) {
        auto a = at(q, "2024-05-10T15:00:00Z");
        CHECK(a.temporal_intent);
        CHECK(ref_of(a) == "2024-05-10");
        CHECK(a.temporal_class == TemporalClass::generic);
        CHECK(*a.window_days == 30.0);
    }
}

TEST_CASE("precedence: explicit dates beat day-relative beat coarse ranges") {
    // ISO date wins over "yesterday"
    auto a = at("yesterday I mentioned 2024-01-15", "2024-05-10T15:00:00Z");
    CHECK(ref_of(a) == "2024-01-15");
    CHECK(a.temporal_class == TemporalClass::explicit_date);

    // "on May 8th" wins over "last week"
    auto b = at("last week, specifically on May 8th", "2024-05-10T15:00:00Z");
    CHECK(ref_of(b) == "2024-05-08");

    // "yesterday" wins over "last month"
    auto c = at("yesterday, not last month", "2024-05-10T15:00:00Z");
    CHECK(ref_of(c) == "2024-05-09");
    CHECK(c.temporal_class == TemporalClass::day_relative);

    // "last week" wins over "3 days ago"
    auto d = at("last week or 3 days ago", "2024-05-10T15:00:00Z");
    CHECK(d.temporal_class == TemporalClass::last_week);
}

TEST_CASE("history intent and temporal intent are independent") {
    auto a = at("all my jobs since last year", "2024-05-10T15:00:00Z");
    CHECK(a.include_historical);
    CHECK(a.temporal_intent);

    auto b = at("show my previous addresses", "2024-05-10T15:00:00Z");
    CHECK(b.include_historical);
    CHECK_FALSE(b.temporal_intent);
}
