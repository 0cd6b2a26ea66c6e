#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace cli {

// Exit codes: 2 config error, 3 model/method incompatibility, 4 numerical.
struct CliError : std::runtime_error {
  int code;
  CliError(int code, const std::string& message) : std::runtime_error(message), code(code) {}
};

inline std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  (void)ec;
  return std::string(buf, ptr);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError(2, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CliError(2, "cannot write '" + path + "'");
  out << content;
}

inline uint64_t fnv1a(const std::string& bytes) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string hex64(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Header of a split CSV: comma-separated names, label column last.
inline std::vector<std::string> csv_header(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CliError(2, "cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw CliError(2, "empty csv '" + path + "'");
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
  std::vector<std::string> names;
  std::string cell;
  for (char c : line) {
    if (c == ',') {
      names.push_back(cell);
      cell.clear();
    } else if (c != '"') {
      cell += c;
    }
  }
  names.push_back(cell);
  return names;
}

}  // namespace cli
