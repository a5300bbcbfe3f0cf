#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "threadtrace/raster.hpp"

namespace threadtrace {

using Bytes = std::vector<std::uint8_t>;

// Gradient maps: 16-bit single-channel grayscale PNG, value = stored / 65535.
GradientMap decode_gradient_map(std::span<const std::uint8_t> png);
Bytes encode_gradient_map(const GradientMap& map);

// Overlap maps: 8-bit single-channel PNG with values {0,1,2}.
OverlapMap decode_overlap_map(std::span<const std::uint8_t> png);
Bytes encode_overlap_map(const OverlapMap& map);

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(Rgb, Rgb) = default;
};
using RgbImage = Raster<Rgb>;

Bytes encode_rgb(const RgbImage& image);

Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace threadtrace
