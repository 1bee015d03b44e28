#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace groundnav::pnm {

struct Gray8 {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major, row 0 at the top
};

struct Rgb8 {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // interleaved RGB, row-major
};

/// Binary P5 with maxval 255.
std::string encode_pgm(const Gray8& img);
/// Binary P5 with maxval 65535, big-endian samples.
std::string encode_pgm16(int width, int height, std::span<const std::uint16_t> pixels);
/// Binary P6 with maxval 255.
std::string encode_ppm(const Rgb8& img);

/// Parses a binary P5 image with maxval <= 255. Header comments are allowed.
/// Throws ParseError on malformed or truncated data.
Gray8 decode_pgm(const std::string& bytes);

std::string read_file(const std::filesystem::path& path);
/// Throws IoError when the file cannot be written.
void write_file(const std::filesystem::path& path, const std::string& bytes);

}  // namespace groundnav::pnm
