#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace citepred {

using Date = std::chrono::year_month_day;

/// Inclusive date range.
struct DateRange {
  Date first;
  Date last;
};

enum class CrawlGranularity { yearly, monthly, weekly };

std::string_view to_string(CrawlGranularity g);

/// Below 2,000 papers a category is queried per year, up to 12,000 per
/// month, above that per ISO week.
CrawlGranularity granularity_for_volume(std::int64_t volume_estimate);

struct CrawlWindow {
  Date start;  ///< inclusive
  Date end;    ///< inclusive

  bool operator==(const CrawlWindow&) const = default;
};

struct CrawlPlan {
  std::string category;
  std::int64_t volume_estimate = 0;
  CrawlGranularity granularity = CrawlGranularity::yearly;
  std::vector<CrawlWindow> windows;
};

/// Calendar-aligned windows that tile `span` exactly; the first and last
/// windows are clipped to the span edges. Throws ValidationError for a
/// negative volume or a span whose end precedes its start.
CrawlPlan plan_crawl_windows(std::string category, std::int64_t volume_estimate, DateRange span);

/// Parses YYYY-MM-DD, or a bare YYYY (first or last day of that year
/// depending on `end_of_year`).
Date parse_date(std::string_view text, bool end_of_year = false);
std::string format_date(const Date& date);

}  // namespace citepred
