#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "errors.hpp"

namespace skna {

// Shortest decimal form that round-trips a double exactly.  Ties between a
// plain and an exponent rendering go to the plain one, so 4000.0 comes out as
// "4000" rather than the equally-valid "4e+03" a low %g precision would pick.
inline std::string format_double(double v) {
  std::string best;
  for (int prec = 1; prec <= 17; ++prec) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    double back = 0.0;
    std::from_chars(buf, buf + std::char_traits<char>::length(buf), back);
    if (back != v) continue;
    std::string s(buf);
    // A plain rendering can't be beaten: higher precisions only grow.  A
    // scientific one can still lose to a later, no-longer plain form.
    if (s.find('e') == std::string::npos) {
      if (best.empty() || s.size() <= best.size()) return s;
      return best;
    }
    if (best.empty() || s.size() < best.size()) best = std::move(s);
  }
  if (best.empty()) {  // non-finite values never round-trip through from_chars
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    best = buf;
  }
  return best;
}

inline std::string format_fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

inline std::vector<std::string_view> split_view(std::string_view s, char delim) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    std::size_t next = s.find(delim, pos);
    if (next == std::string_view::npos) {
      out.push_back(s.substr(pos));
      break;
    }
    out.push_back(s.substr(pos, next - pos));
    pos = next + 1;
  }
  return out;
}

inline std::string_view trim_view(std::string_view s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Strict, locale-independent double parse of an entire token.
inline double parse_double_strict(std::string_view tok, const std::string& what,
                                  std::ptrdiff_t index = -1) {
  tok = trim_view(tok);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || tok.empty()) {
    throw FormatError(what + ": cannot parse number '" + std::string(tok) + "'");
  }
  (void)index;
  return v;
}

inline long long parse_int_strict(std::string_view tok, const std::string& what) {
  tok = trim_view(tok);
  long long v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || tok.empty()) {
    throw FormatError(what + ": cannot parse integer '" + std::string(tok) + "'");
  }
  return v;
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open file: " + path.string());
  std::string out;
  in.seekg(0, std::ios::end);
  out.resize(static_cast<std::size_t>(in.tellg()));
  in.seekg(0);
  in.read(out.data(), static_cast<std::streamsize>(out.size()));
  if (!in) throw FormatError("cannot read file: " + path.string());
  return out;
}

// Writes via a temp file in the same directory, then renames into place, so a
// failure mid-write never leaves a truncated output behind.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  namespace fs = std::filesystem;
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open for writing: " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error("write failed: " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error("cannot move output into place: " + path.string());
  }
}

}  // namespace skna
