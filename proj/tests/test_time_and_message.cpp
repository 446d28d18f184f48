#include <doctest.h>

#include <chrono>
#include <random>

#include "mnemo/errors.hpp"
#include "mnemo/message.hpp"
#include "mnemo/time.hpp"

using namespace mnemo;
using namespace std::chrono;

TEST_CASE("wall clock parsing accepts the transcript form") {
    auto t = parse_wall_clock("2024-05-10 14:02:00");
    REQUIRE(t.has_value());
    CHECK(format_wall_clock(*t) == "2024-05-10 14:02:00");
    CHECK(format_iso8601(*t) == "2024-05-10T14:02:00Z");

    // epoch check against a known value: 2024-05-10 is 19853 days after epoch
    auto secs = t->time_since_epoch().count();
    CHECK(secs == 19853LL * 86400 + 14 * 3600 + 2 * 60);
}

TEST_CASE("wall clock parsing rejects malformed input") {
    CHECK_FALSE(parse_wall_clock("").has_value());
    CHECK_FALSE(parse_wall_clock("2024-05-10").has_value());
    CHECK_FALSE(parse_wall_clock("2024-13-01 00:00:00").has_value());
    CHECK_FALSE(parse_wall_clock("2024-02-30 00:00:00").has_value());
    CHECK_FALSE(parse_wall_clock("2024-05-10 24:00:00").has_value());
    CHECK_FALSE(parse_wall_clock("2024-05-10 23:60:00").has_value());
    CHECK_FALSE(parse_wall_clock("2024-05-10 23:00:61").has_value());
    CHECK_FALSE(parse_wall_clock("2024-05-10T14:02:00").has_value());
    CHECK_FALSE(parse_wall_clock("2024-05-10 14:02:00 extra").has_value());
    CHECK_FALSE(parse_wall_clock("not a time").has_value());
}

TEST_CASE("iso8601 parsing round-trips and rejects the wall-clock form") {
    auto t = parse_iso8601("1999-12-31T23:59:59Z");
    REQUIRE(t.has_value());
    CHECK(format_iso8601(*t) == "1999-12-31T23:59:59Z");
    CHECK_FALSE(parse_iso8601("1999-12-31 23:59:59").has_value());
    CHECK_FALSE(parse_iso8601("1999-12-31T23:59:59").has_value());
}

TEST_CASE("date parsing handles leap years") {
    CHECK(parse_date("2024-02-29").has_value());
    CHECK_FALSE(parse_date("2023-02-29").has_value());
    auto d = parse_date("2024-02-29");
    CHECK(format_date(*d) == "2024-02-29");
}

TEST_CASE("timestamp round-trip property") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<long long> dist(0, 4102444799LL);  // through 2099
    for (int i = 0; i < 300; ++i) {
        UtcSeconds t{seconds{dist(rng)}};
        auto wall = format_wall_clock(t);
        auto back = parse_wall_clock(wall);
        REQUIRE(back.has_value());
        CHECK(*back == t);
        auto iso = format_iso8601(t);
        auto back2 = parse_iso8601(iso);
        REQUIRE(back2.has_value());
        CHECK(*back2 == t);
    }
}

TEST_CASE("days_between is signed and fractional") {
    auto a = *parse_iso8601("2024-05-10T12:00:00Z");
    auto b = *parse_iso8601("2024-05-08T00:00:00Z");
    CHECK(days_between(a, b) == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(days_between(b, a) == doctest::Approx(-2.5).epsilon(1e-12));
    CHECK(days_between(a, a) == 0.0);
}

TEST_CASE("message line parsing") {
    SUBCASE("standard line") {
        auto m = parse_message_line("[2024-05-10 14:02:00] James: I got a new job at Google.");
        CHECK(m.speaker == "James");
        CHECK(m.text == "I got a new job at Google.");
        CHECK(format_wall_clock(m.timestamp) == "2024-05-10 14:02:00");
    }
    SUBCASE("text may contain colons") {
        auto m = parse_message_line("[2024-05-10 14:02:00] Ana: note: buy milk at 14:30");
        CHECK(m.speaker == "Ana");
        CHECK(m.text == "note: buy milk at 14:30");
    }
    SUBCASE("speaker with spaces") {
        auto m = parse_message_line("[2024-05-10 14:02:00] Dr. Smith: hello there");
        CHECK(m.speaker == "Dr. Smith");
        CHECK(m.text == "hello there");
    }
    SUBCASE("missing opening bracket") {
        CHECK_THROWS_AS(parse_message_line("2024-05-10 14:02:00] J: t"), MalformedLineError);
    }
    SUBCASE("missing closing bracket") {
        CHECK_THROWS_AS(parse_message_line("[2024-05-10 14:02:00 J: t"), MalformedLineError);
    }
    SUBCASE("bad timestamp") {
        CHECK_THROWS_AS(parse_message_line("[2024-13-10 14:02:00] J: t"), MalformedLineError);
    }
    SUBCASE("missing speaker separator") {
        CHECK_THROWS_AS(parse_message_line("[2024-05-10 14:02:00] no separator here"),
                        MalformedLineError);
    }
    SUBCASE("empty text is rejected") {
        CHECK_THROWS_AS(parse_message_line("[2024-05-10 14:02:00] J: "), MalformedLineError);
    }
}

TEST_CASE("message line format/parse round-trip property") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<long long> tdist(0, 4102444799LL);
    const std::vector<std::string> speakers = {"James", "Ana Maria", "bot-7", "Dr. Smith"};
    const std::vector<std::string> texts = {
        "plain text",
        "with: a colon",
        "unicode héllo wörld",
        "numbers 123 456",
        "trailing punctuation!",
    };
    for (int i = 0; i < 200; ++i) {
        ParsedMessage m;
        m.timestamp = UtcSeconds{seconds{tdist(rng)}};
        m.speaker = speakers[i % speakers.size()];
        m.text = texts[(i * 7) % texts.size()];
        auto line = format_message_line(m);
        auto back = parse_message_line(line);
        CHECK(back.timestamp == m.timestamp);
        CHECK(back.speaker == m.speaker);
        CHECK(back.text == m.text);
    }
}

TEST_CASE("transcript parsing is all-or-nothing with line numbers") {
    std::vector<std::string> lines = {
        "[2024-05-10 14:02:00] A: first",
        "broken line",
        "[2024-05-10 14:03:00] B: third",
    };
    try {
        parse_transcript(lines);
        FAIL("expected MalformedLineError");
    } catch (const MalformedLineError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }

    auto ok = parse_transcript({"[2024-05-10 14:02:00] A: first\r\n",
                                "[2024-05-10 14:03:00] B: second\n"});
    REQUIRE(ok.size() == 2);
    CHECK(ok[0].text == "first");
    CHECK(ok[1].text == "second");
}
