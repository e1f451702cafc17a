#pragma once

#include <functional>
#include <string>

namespace chronoslit {

using WarningSink = std::function<void(const std::string&)>;

/// Routes a non-fatal numerical diagnostic (snapped energies, probes that are
/// not band-limited) to the installed sink. The default sink writes to stderr.
void warn(const std::string& message);

/// Installs a new sink and returns the previous one. Passing an empty function
/// silences warnings.
WarningSink set_warning_sink(WarningSink sink);

}  // namespace chronoslit
