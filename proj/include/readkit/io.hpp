#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>

#include "readkit/common.hpp"

namespace readkit::io {

// Whole-file read; FileError when the path cannot be opened.
std::string read_file(const std::string& path);
std::string read_stream(std::istream& in);

// Write via a temp file in the same directory plus rename, so failed runs
// leave no partial artifact behind.
void atomic_write(const std::string& path, std::string_view content);

// Calls fn(line_number, line) for every line; line numbers start at 1.
// Carriage returns are stripped, empty lines skipped.
void for_each_line(std::string_view content,
                   const std::function<void(size_t, std::string_view)>& fn);

std::string csv_escape(std::string_view field);

// Fixed four decimal places, the precision used by the text and CSV reports.
std::string fmt4(double v);

}  // namespace readkit::io
