#pragma once

#include <functional>
#include <string_view>

namespace mdi {

/// Emits a warning line. Defaults to stderr; thread safe.
void warn(std::string_view message);

/// Replaces the warning sink (pass an empty function to restore stderr).
/// Returns the previous sink.
using WarningSink = std::function<void(std::string_view)>;
WarningSink set_warning_sink(WarningSink sink);

}  // namespace mdi
