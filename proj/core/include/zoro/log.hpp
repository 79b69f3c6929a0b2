#pragma once

#include <functional>
#include <string_view>

namespace zoro {

using WarningHandler = std::function<void(std::string_view)>;

/// Routes library warnings (indefinite covariance, under-determined recovery).
/// Default handler writes "warning: <msg>" to stderr. Passing an empty handler
/// silences warnings. Returns the previous handler.
WarningHandler set_warning_handler(WarningHandler handler);

void warn(std::string_view message);

}  // namespace zoro
