#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>

namespace citegraph::io {

// Writes via a sibling temp file and renames into place, so a failed run
// never leaves a partial artifact behind.
void atomic_write(const std::string& path,
                  const std::function<void(std::ostream&)>& writer);

std::string read_file(const std::string& path);

// Calls fn(line_number, line) for every non-empty line. Throws InputError
// if the file cannot be opened.
void for_each_line(const std::string& path,
                   const std::function<void(size_t, std::string_view)>& fn);

// Shortest-round-trip formatting for doubles (std::to_chars), used wherever
// a value must survive a text round-trip exactly.
std::string format_double(double v);

// 9 significant digits, the edge-file precision.
std::string format_9sig(double v);

bool file_exists(const std::string& path);

}  // namespace citegraph::io
