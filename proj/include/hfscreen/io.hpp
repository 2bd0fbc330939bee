#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace hfscreen {

std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

// Directory holding the shipped lexicons and templates. The HFSCREEN_DATA_DIR
// environment variable overrides the build-time location.
std::filesystem::path data_dir();

// 64-bit FNV-1a; stable across platforms, used for config fingerprints.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed = 14695981039346656037ULL);

}  // namespace hfscreen
