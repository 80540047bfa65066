#pragma once

// Subcommands of the `ifm` executable. Each one builds a Table in memory and
// writes it in full once the computation succeeded.

#include "table.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace ifm::cli {

inline constexpr std::uint64_t kDefaultSeed = 20190417;
inline constexpr std::string_view kToolName = "ifm";

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalidConfig = 2;
inline constexpr int kExitNumericFailure = 3;

/// Column layout of a subcommand's output. Throws std::invalid_argument for
/// unknown names.
const Schema& schema_for(std::string_view subcommand);

std::vector<std::string_view> subcommand_names();

/// Runs the command line (without the program name) and returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ifm::cli
