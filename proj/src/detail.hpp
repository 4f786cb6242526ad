#pragma once

// Helpers shared by the implementation files; not installed.

#include <chrono>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace pomp::detail {

// Shortest decimal string that parses back to the same double.
std::string format_decimal(double value);
// Throws invalid_input on anything but a complete decimal number.
double parse_decimal(std::string_view text);

std::string read_file(const std::filesystem::path& path);
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
void append_line(const std::filesystem::path& path, std::string_view line);

std::string sha256_hex(std::string_view data);

struct HttpResponse {
  int status = 0;
  std::string body;
};

// Throws timeout / transport errors on connection failures; any HTTP status
// is returned to the caller.
HttpResponse http_post_json(const std::string& url, const std::string& body,
                            const std::map<std::string, std::string>& headers,
                            std::chrono::milliseconds timeout);

}  // namespace pomp::detail
