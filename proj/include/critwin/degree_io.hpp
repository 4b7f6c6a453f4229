#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "critwin/degree_sequence.hpp"
#include "critwin/errors.hpp"

namespace critwin {

// Degree files hold either one degree per line, or, when the first non-blank
// line is the token RLE, lines of the form "count degree". Blank lines are
// ignored.
inline std::vector<std::int64_t> parse_degree_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::vector<std::int64_t> degrees;
  std::string line;
  bool first = true;
  bool rle = false;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& why) {
    throw ParseError("degree file line " + std::to_string(line_no) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::istringstream fields(line);
    if (first) {
      first = false;
      std::string token;
      fields >> token;
      if (token == "RLE") {
        rle = true;
        std::string extra;
        if (fields >> extra) fail("unexpected text after RLE");
        continue;
      }
      fields.clear();
      fields.str(line);
    }
    std::int64_t a = 0;
    if (!(fields >> a)) fail("expected an integer");
    if (rle) {
      std::int64_t degree = 0;
      if (!(fields >> degree)) fail("expected 'count degree'");
      if (a < 0) fail("negative count");
      if (a > (std::int64_t{1} << 32)) fail("count too large");
      degrees.insert(degrees.end(), static_cast<std::size_t>(a), degree);
    } else {
      degrees.push_back(a);
    }
    std::string extra;
    if (fields >> extra) fail("trailing text '" + extra + "'");
  }
  if (degrees.empty()) throw ParseError("degree file lists no vertices");
  return degrees;
}

inline std::vector<std::int64_t> read_degree_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open degree file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_degree_text(buf.str());
}

}  // namespace critwin
