#pragma once

#include <string>

#include "mnemo/types.hpp"

namespace mnemo {

// Keyword/pattern classification of a query. Detects temporal intent (and
// resolves the reference date against `now`, always UTC) plus history intent.
// Precedence for the reference date, most specific first:
//   ISO date > "on <month> <day>" > "last <weekday>" > yesterday/today/tomorrow
//   > last week/month/year > "N <units> ago" > bare temporal wording.
// Date-like phrases resolve to the most recent matching calendar date not
// after `now` ("last <weekday>" is strictly before today). Guarantees: if
// temporal_intent is set, reference_date, window_days and temporal_class are
// all set; window_days comes from cfg.window_table.
QueryAnalysis analyze_query(const std::string& query, UtcSeconds now, const TemporalConfig& cfg);

}  // namespace mnemo
