#include <doctest.h>

#include <chrono>

#include "citepred/crawl.hpp"
#include "citepred/error.hpp"
#include "generators.hpp"

using namespace citepred;
using namespace std::chrono;

namespace {

bool tiles(const CrawlPlan& plan, const DateRange& span) {
  if (plan.windows.empty()) return false;
  if (plan.windows.front().start != span.first || plan.windows.back().end != span.last) {
    return false;
  }
  for (std::size_t i = 0; i < plan.windows.size(); ++i) {
    if (sys_days(plan.windows[i].end) < sys_days(plan.windows[i].start)) return false;
    if (i > 0 && sys_days(plan.windows[i].start) != sys_days(plan.windows[i - 1].end) + days(1)) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("granularity thresholds") {
  CHECK(granularity_for_volume(0) == CrawlGranularity::yearly);
  CHECK(granularity_for_volume(1999) == CrawlGranularity::yearly);
  CHECK(granularity_for_volume(2000) == CrawlGranularity::monthly);
  CHECK(granularity_for_volume(12000) == CrawlGranularity::monthly);
  CHECK(granularity_for_volume(12001) == CrawlGranularity::weekly);
}

TEST_CASE("small volume gives yearly windows") {
  const DateRange span{parse_date("2015"), parse_date("2024", true)};
  const auto plan = plan_crawl_windows("cs.IR", 1500, span);
  CHECK(plan.granularity == CrawlGranularity::yearly);
  CHECK(plan.windows.size() == 10);
  CHECK(tiles(plan, span));
}

TEST_CASE("medium volume gives monthly windows") {
  const DateRange span{parse_date("2023-01-01"), parse_date("2023-12-31")};
  const auto plan = plan_crawl_windows("cs.CL", 5000, span);
  CHECK(plan.windows.size() == 12);
  CHECK(format_date(plan.windows[1].end) == "2023-02-28");
  CHECK(tiles(plan, span));
}

TEST_CASE("large volume over a non-leap year from a Monday gives 53 weekly windows") {
  // 2018-01-01 is a Monday; 365 days is 52 weeks plus one day.
  const DateRange span{parse_date("2018-01-01"), parse_date("2018-12-31")};
  REQUIRE(weekday(sys_days(span.first)) == Monday);
  const auto plan = plan_crawl_windows("cs.CV", 20000, span);
  CHECK(plan.windows.size() == 53);
  CHECK(plan.windows.back().start == plan.windows.back().end);
  CHECK(tiles(plan, span));
}

TEST_CASE("windows tile random spans in every regime") {
  gen::Rng rng(17);
  for (int i = 0; i < 200; ++i) {
    const sys_days start = sys_days(year{2000} / January / 1) + days(rng.between(0, 8000));
    const sys_days end = start + days(rng.between(0, 900));
    const DateRange span{year_month_day(start), year_month_day(end)};
    for (std::int64_t volume : {100, 5000, 50000}) {
      CHECK(tiles(plan_crawl_windows("c", volume, span), span));
    }
  }
}

TEST_CASE("invalid spans and volumes are rejected") {
  CHECK_THROWS_AS(plan_crawl_windows("c", 10, {parse_date("2020-02-01"), parse_date("2020-01-01")}),
                  ValidationError);
  CHECK_THROWS_AS(plan_crawl_windows("c", -1, {parse_date("2020"), parse_date("2020", true)}),
                  ValidationError);
  CHECK_THROWS_AS(parse_date("2020-13-01"), ValidationError);
  CHECK(format_date(parse_date("2020", true)) == "2020-12-31");
}
