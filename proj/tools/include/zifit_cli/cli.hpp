#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace zifit::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitStatistical = 1;  // e.g. no candidate passes
inline constexpr int kExitInput = 2;
inline constexpr int kExitNumerical = 3;

struct Observations {
  std::vector<double> values;
  std::vector<std::size_t> lines;  // 1-based source line of each value
  std::uint64_t checksum = 0;      // FNV-1a 64 of the raw bytes
};

std::uint64_t fnv1a64(std::string_view bytes) noexcept;

// Numbers separated by whitespace or commas, one header line allowed,
// blank lines and '#' comments skipped. Throws an input error naming the
// line of the first unparsable token.
Observations parse_observations(std::string_view text);
Observations read_observations(const std::string& path);

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace zifit::cli
