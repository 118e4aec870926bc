#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace paramosc {

/// Formats with 17 significant digits, enough to round-trip a double.
std::string format_double(double v);

/// 64-bit FNV-1a over the bytes of s.
std::uint64_t fnv1a(std::string_view s);

/// Hash of a manifest's canonical serialization, as 16 hex digits.
std::string manifest_hash_hex(const nlohmann::json& manifest);

/// Writes a CSV file atomically (temp file + rename). comment_lines are
/// emitted first, each prefixed with "# "; then the header row; then data
/// rows with 17-significant-digit floats.
void write_csv_atomic(const std::string& path,
                      const std::vector<std::string>& comment_lines,
                      const std::vector<std::string>& column_names,
                      const std::vector<std::vector<double>>& rows);

/// Serializes manifest (with its hash inserted under "manifest_hash") to
/// dir/manifest.json atomically. Returns the hash.
std::string write_manifest(const std::string& dir, nlohmann::json manifest);

} // namespace paramosc
