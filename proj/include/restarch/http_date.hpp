#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace restarch {

using TimePoint = std::chrono::system_clock::time_point;

/// IMF-fixdate, e.g. "Sun, 06 Nov 1994 08:49:37 GMT".
std::string format_http_date(TimePoint t);

/// Accepts IMF-fixdate only; the obsolete RFC 850 and asctime forms are
/// rejected.
std::optional<TimePoint> parse_http_date(std::string_view text);

}  // namespace restarch
