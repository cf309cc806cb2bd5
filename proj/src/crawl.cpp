#include "citepred/crawl.hpp"

#include <cstdio>
#include <regex>

#include "citepred/error.hpp"

namespace citepred {

using namespace std::chrono;

std::string_view to_string(CrawlGranularity g) {
  switch (g) {
    case CrawlGranularity::yearly:
      return "yearly";
    case CrawlGranularity::monthly:
      return "monthly";
    case CrawlGranularity::weekly:
      return "weekly";
  }
  return "unknown";
}

CrawlGranularity granularity_for_volume(std::int64_t volume) {
  if (volume < 2000) return CrawlGranularity::yearly;
  if (volume <= 12000) return CrawlGranularity::monthly;
  return CrawlGranularity::weekly;
}

namespace {

// Last day of the calendar unit that contains `day`.
sys_days unit_end(sys_days day, CrawlGranularity g) {
  const year_month_day ymd{day};
  switch (g) {
    case CrawlGranularity::yearly:
      return sys_days{ymd.year() / December / 31};
    case CrawlGranularity::monthly:
      return sys_days{ymd.year() / ymd.month() / last};
    case CrawlGranularity::weekly: {
      // ISO weeks run Monday..Sunday.
      const unsigned iso = weekday{day}.iso_encoding();  // Mon=1 .. Sun=7
      return day + days{7 - iso};
    }
  }
  return day;
}

}  // namespace

CrawlPlan plan_crawl_windows(std::string category, std::int64_t volume, DateRange span) {
  if (volume < 0) throw ValidationError("volume estimate must be non-negative");
  if (!span.first.ok() || !span.last.ok()) throw ValidationError("invalid calendar date in span");
  const sys_days first{span.first};
  const sys_days last{span.last};
  if (last < first) throw ValidationError("span end precedes span start");

  CrawlPlan plan;
  plan.category = std::move(category);
  plan.volume_estimate = volume;
  plan.granularity = granularity_for_volume(volume);

  for (sys_days start = first; start <= last;) {
    const sys_days end = std::min(unit_end(start, plan.granularity), last);
    plan.windows.push_back({year_month_day{start}, year_month_day{end}});
    start = end + days{1};
  }
  return plan;
}

Date parse_date(std::string_view text, bool end_of_year) {
  static const std::regex full(R"((\d{4})-(\d{2})-(\d{2}))");
  static const std::regex year_only(R"((\d{4}))");
  const std::string s(text);
  std::smatch m;
  if (std::regex_match(s, m, full)) {
    const Date d{year{std::stoi(m[1])}, month{static_cast<unsigned>(std::stoi(m[2]))},
                 day{static_cast<unsigned>(std::stoi(m[3]))}};
    if (!d.ok()) throw ValidationError("invalid date '" + s + "'");
    return d;
  }
  if (std::regex_match(s, m, year_only)) {
    const year y{std::stoi(m[1])};
    return end_of_year ? Date{y / December / 31} : Date{y / January / 1};
  }
  throw ValidationError("unparseable date '" + s + "' (expected YYYY-MM-DD or YYYY)");
}

std::string format_date(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

}  // namespace citepred
