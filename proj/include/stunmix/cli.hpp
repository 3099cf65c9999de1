#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace stunmix {

inline constexpr std::string_view kVersion = "0.1.0";

enum ExitCode : int {
    kExitOk = 0,
    kExitVerificationFailed = 1,
    kExitUsage = 2,
    kExitData = 3,
};

/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

}  // namespace stunmix
