#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace adt::fs {

// Throws adt::Error("io_error") when the file cannot be read.
std::string read_file(const std::filesystem::path& path);

// Writes to a unique temporary sibling, fsyncs it, renames it over `path` and
// fsyncs the directory. Readers see either the old or the new content.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

// Best effort; makes a completed rename durable.
void sync_directory(const std::filesystem::path& dir);

// Appends one line (a '\n' is added) and flushes.
void append_line(const std::filesystem::path& path, std::string_view line);

// UTC "YYYY-MM-DDTHH:MM:SSZ".
std::string utc_timestamp();

}  // namespace adt::fs
