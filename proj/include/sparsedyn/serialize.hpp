#pragma once

#include <string>

namespace sparsedyn {

std::string read_file(const std::string& path);

// Writes to a temporary file in the target directory, then renames it into
// place, so readers never observe a half-written file.
void write_file_atomic(const std::string& path, const std::string& content);

// Shortest decimal form that round-trips the exact double value.
std::string format_double(double v);

// FNV-1a 64-bit over raw bytes; used to fingerprint deterministic outputs.
std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace sparsedyn
