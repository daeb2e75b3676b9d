#pragma once

#include <string>

namespace smtlab {

/// Shortest text that reads back to the same double (17 significant digits).
std::string fmt17(double v);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace smtlab
