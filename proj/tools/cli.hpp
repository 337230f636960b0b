#pragma once

#include <iosfwd>

namespace ppf::cli {

/// Entry point of the `ppf` tool. Exit codes: 0 success, 1 numerical failure,
/// 2 config error, 3 missing inputs, 4 divergence (partial outputs kept).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ppf::cli
