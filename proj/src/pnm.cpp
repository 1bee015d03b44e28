#include "groundnav/pnm.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "groundnav/errors.hpp"

namespace groundnav::pnm {

namespace {

std::string header(const char* magic, int width, int height, int maxval) {
  return std::string(magic) + "\n" + std::to_string(width) + " " + std::to_string(height) + "\n" +
         std::to_string(maxval) + "\n";
}

// Reads one whitespace-delimited header integer, skipping '#' comments.
int header_int(const std::string& s, std::size_t& pos) {
  for (;;) {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos < s.size() && s[pos] == '#') {
      while (pos < s.size() && s[pos] != '\n') ++pos;
      continue;
    }
    break;
  }
  if (pos >= s.size() || !std::isdigit(static_cast<unsigned char>(s[pos]))) {
    throw ParseError("malformed PGM header");
  }
  long value = 0;
  while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
    value = value * 10 + (s[pos] - '0');
    if (value > 1'000'000) throw ParseError("PGM header value out of range");
    ++pos;
  }
  return static_cast<int>(value);
}

}  // namespace

std::string encode_pgm(const Gray8& img) {
  std::string out = header("P5", img.width, img.height, 255);
  out.append(img.pixels.begin(), img.pixels.end());
  return out;
}

std::string encode_pgm16(int width, int height, std::span<const std::uint16_t> pixels) {
  std::string out = header("P5", width, height, 65535);
  out.reserve(out.size() + pixels.size() * 2);
  for (std::uint16_t p : pixels) {
    out.push_back(static_cast<char>(p >> 8));
    out.push_back(static_cast<char>(p & 0xff));
  }
  return out;
}

std::string encode_ppm(const Rgb8& img) {
  std::string out = header("P6", img.width, img.height, 255);
  out.append(img.pixels.begin(), img.pixels.end());
  return out;
}

Gray8 decode_pgm(const std::string& bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
    throw ParseError("not a binary PGM (missing P5 magic)");
  }
  std::size_t pos = 2;
  Gray8 img;
  img.width = header_int(bytes, pos);
  img.height = header_int(bytes, pos);
  const int maxval = header_int(bytes, pos);
  if (img.width <= 0 || img.height <= 0) throw ParseError("PGM dimensions must be positive");
  if (maxval <= 0 || maxval > 255) throw ParseError("only 8-bit PGM maps are supported");
  if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
    throw ParseError("malformed PGM header");
  }
  ++pos;  // single whitespace before the raster
  const std::size_t n = static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height);
  if (bytes.size() - pos < n) throw ParseError("truncated PGM raster");
  img.pixels.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                    bytes.begin() + static_cast<std::ptrdiff_t>(pos + n));
  return img;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace groundnav::pnm
