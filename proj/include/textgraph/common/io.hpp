#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace textgraph {

/// `%.17g` rendering used for every float written to disk (lossless).
std::string format_float(double value);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace textgraph
