#pragma once

#include <iosfwd>

namespace complab {

/// Exit status: 0 overall pass, 1 a metric or report failed, 2 usage or
/// config error, 3 runtime error. Errors print one line
/// "error: <usage|config|runtime>: <message>" to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace complab
