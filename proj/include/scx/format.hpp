#pragma once

#include <string>

namespace scx {

/// 17 significant digits ("%.17g"), with negative zero printed as 0.
std::string format_double(double v);

}  // namespace scx
