#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace fmv {

/// Throws IoError when the file cannot be read.
std::string read_text_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over `path`, so readers
/// never see a partial file. Throws IoError.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace fmv
