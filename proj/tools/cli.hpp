#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sco::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

/// Runs one `sco` invocation. args excludes the program name. Results that are not
/// redirected with --out go to out; errors go to err as one JSON object.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sco::cli
