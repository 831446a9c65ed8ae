#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pih {

std::string base64_encode(std::span<const std::uint8_t> bytes);
/// Returns nullopt on malformed input.
std::optional<std::vector<std::uint8_t>> base64_decode(std::string_view text);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);
/// Strict parse of a full token; nullopt on trailing junk or empty input.
std::optional<double> parse_double(std::string_view token);
std::optional<long long> parse_int(std::string_view token);

}  // namespace pih
