// Command-line front end.
//
// Exit codes: 0 success (universal, feasible, written), 1 negative verdict,
// 2 usage or input error.

#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "orns/certifier.hpp"

namespace orns::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNegative = 1;
inline constexpr int kExitUsage = 2;

int run(int argc, char** argv);

/// Runs with explicit arguments (excluding the program name) and streams.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses "3", "1..10", "1,2,4" or mixtures like "1..3,6".
std::vector<std::uint32_t> parse_h_list(const std::string& text);

/// Parses "auto" or comma-separated "h=value" pairs. Returns an empty map
/// for "auto".
LambdaMap parse_lambda_map(const std::string& text);

}  // namespace orns::cli
