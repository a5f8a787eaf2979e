#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace pauli {

/// Shortest form that round-trips a double: 17 significant digits.
std::string fmt17(double v);

/// 64-bit FNV-1a digest, rendered as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);

/// Writes `contents` to `path`, creating parent directories. Throws on failure.
void write_text_file(const std::string& path, const std::string& contents);

std::string read_text_file(const std::string& path);

}  // namespace pauli
