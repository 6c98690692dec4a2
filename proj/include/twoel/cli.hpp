#pragma once

// Command-line front end. The commands live in the library so tests can run
// them with captured streams.

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "twoel/transfer.hpp"

namespace twoel {

inline constexpr std::string_view kCodeVersion = "1.0.0";

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitNumerical = 2, kExitInternal = 3 };

// "1..10", "2,4,6", "1..3,7".
std::vector<int> parseIntList(std::string_view text);

// Loads the recurrence from `dir` when a valid entry for this flag and code
// version exists, otherwise derives and stores it. The result is installed in
// the in-process cache. I/O failures fall back to deriving.
const Recurrence& loadOrDeriveRecurrence(bool interaction,
                                         const std::optional<std::filesystem::path>& dir);

std::filesystem::path defaultCacheDir();

int runCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int runCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace twoel
