#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace isimm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalidInput = 2;
inline constexpr int kExitInfeasible = 3;
inline constexpr int kExitIo = 4;

/// Runs one command. `args` excludes the program name. Results go to `out` unless an
/// --output path is given; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses "a,b,c" into numbers; throws InvalidInput on malformed entries.
std::vector<double> parse_list(const std::string& text);

/// Rounds to 10 significant digits.
double round10(double value);

}  // namespace isimm::cli
