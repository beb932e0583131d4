#ifndef LAYOUTCUT_FILE_UTIL_HPP_
#define LAYOUTCUT_FILE_UTIL_HPP_

#include <filesystem>
#include <string>
#include <string_view>

namespace layoutcut {

// Reads a whole file. Throws Error(kIo) when it cannot be opened.
std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temp file and renames it over `path`, so readers never
// observe a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace layoutcut

#endif  // LAYOUTCUT_FILE_UTIL_HPP_
