#include "mnemo/time.hpp"

#include <cstdio>

namespace mnemo {

namespace {

std::optional<UtcSeconds> make_time(int y, int mo, int d, int h, int mi, int s) {
    using namespace std::chrono;
    year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    if (h < 0 || h > 23 || mi < 0 || mi > 59 || s < 0 || s > 59) return std::nullopt;
    return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s};
}

struct Split {
    int y, mo, d, h, mi, s;
};

void split(UtcSeconds t, Split& out) {
    using namespace std::chrono;
    auto dp = floor<days>(t);
    year_month_day ymd{dp};
    hh_mm_ss hms{t - dp};
    out.y = int(ymd.year());
    out.mo = int(unsigned(ymd.month()));
    out.d = int(unsigned(ymd.day()));
    out.h = int(hms.hours().count());
    out.mi = int(hms.minutes().count());
    out.s = int(hms.seconds().count());
}

}  // namespace

std::optional<UtcSeconds> parse_wall_clock(const std::string& s) {
    int y, mo, d, h, mi, sec;
    char tail;
    if (std::sscanf(s.c_str(), "%4d-%2d-%2d %2d:%2d:%2d%c", &y, &mo, &d, &h, &mi, &sec, &tail) != 6)
        return std::nullopt;
    if (s.size() != 19) return std::nullopt;
    return make_time(y, mo, d, h, mi, sec);
}

std::string format_wall_clock(UtcSeconds t) {
    Split p;
    split(t, p);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d %02d:%02d:%02d", p.y, p.mo, p.d, p.h, p.mi, p.s);
    return buf;
}

std::optional<UtcSeconds> parse_iso8601(const std::string& s) {
    int y, mo, d, h, mi, sec;
    char z, tail;
    if (std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%c%c", &y, &mo, &d, &h, &mi, &sec, &z, &tail) != 7)
        return std::nullopt;
    if (z != 'Z' || s.size() != 20) return std::nullopt;
    return make_time(y, mo, d, h, mi, sec);
}

std::string format_iso8601(UtcSeconds t) {
    Split p;
    split(t, p);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", p.y, p.mo, p.d, p.h, p.mi, p.s);
    return buf;
}

std::optional<UtcDays> parse_date(const std::string& s) {
    int y, mo, d;
    char tail;
    if (std::sscanf(s.c_str(), "%4d-%2d-%2d%c", &y, &mo, &d, &tail) != 3) return std::nullopt;
    if (s.size() != 10) return std::nullopt;
    using namespace std::chrono;
    year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    return sys_days{ymd};
}

std::string format_date(UtcDays d) {
    using namespace std::chrono;
    year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", int(ymd.year()), int(unsigned(ymd.month())),
                  int(unsigned(ymd.day())));
    return buf;
}

double days_between(UtcSeconds a, UtcSeconds b) {
    return double((a - b).count()) / 86400.0;
}

}  // namespace mnemo
