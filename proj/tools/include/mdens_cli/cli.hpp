#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace mdens::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitInternal = 4;

/// Runs the tool on `args` (without the program name). Tables and reports go to `out`,
/// diagnostics and the effective seed to `err`. Returns the exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Option parsing helpers, exposed for tests.

/// Decimal number or fraction "p/q".
double parse_real(std::string_view text);
/// "lo:hi:points" or a comma-separated list.
std::vector<double> parse_grid(std::string_view text);
std::uint64_t fnv1a64(std::string_view text);
/// MDENS_THREADS when set to a positive integer, otherwise the hardware concurrency.
unsigned default_threads();
/// "mdens <version> config=<fnv1a hex> <canonical>".
std::string header_comment(std::string_view canonical);
std::string version();

}  // namespace mdens::cli
