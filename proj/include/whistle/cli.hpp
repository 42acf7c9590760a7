#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace whistle::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;

inline constexpr const char* kToolName = "whistle";
inline constexpr const char* kToolVersion = "1.0.0";

/// Environment variable naming a directory that relative input paths are
/// resolved against.
inline constexpr const char* kDataDirEnv = "WHISTLE_DATA_DIR";

/// Entry point shared by the binary and the tests. `args` excludes argv[0].
/// Reports written to "-" go to `out`; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace whistle::cli
