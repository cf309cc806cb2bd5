#pragma once

#include <functional>
#include <string_view>

namespace citepred {

using WarningSink = std::function<void(std::string_view)>;

/// Replaces the process-wide warning sink (stderr by default) and returns the
/// previous one. Passing an empty function restores stderr.
WarningSink set_warning_sink(WarningSink sink);

void log_warning(std::string_view message);

}  // namespace citepred
