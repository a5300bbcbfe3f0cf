#include "threadtrace/image_io.hpp"

#include <png.h>

#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

namespace threadtrace {

namespace {

struct DecodedPng {
  int width = 0;
  int height = 0;
  int bit_depth = 0;
  int color_type = 0;
  std::vector<std::uint8_t> rows;  // tightly packed, big-endian samples
  std::size_t stride = 0;
};

struct ReadCursor {
  std::span<const std::uint8_t> data;
  std::size_t offset = 0;
};

struct ErrorSlot {
  char message[256] = {};
};

void read_callback(png_structp png, png_bytep out, png_size_t length) {
  auto* cursor = static_cast<ReadCursor*>(png_get_io_ptr(png));
  if (cursor->offset + length > cursor->data.size()) {
    png_error(png, "truncated PNG stream");
  }
  std::memcpy(out, cursor->data.data() + cursor->offset, length);
  cursor->offset += length;
}

// libpng is C: errors unwind with longjmp, never with C++ exceptions.
void error_callback(png_structp png, png_const_charp message) {
  auto* slot = static_cast<ErrorSlot*>(png_get_error_ptr(png));
  std::snprintf(slot->message, sizeof(slot->message), "%s", message);
  png_longjmp(png, 1);
}
void warning_callback(png_structp, png_const_charp) {}

// All objects with destructors live in the caller so a longjmp skips none.
bool decode_png_raw(ReadCursor& cursor, ErrorSlot& slot, DecodedPng& out, std::vector<png_bytep>& row_ptrs) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &slot, error_callback, warning_callback);
  if (png == nullptr) return false;
  png_infop info = png_create_info_struct(png);
  if (info == nullptr || setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_set_read_fn(png, &cursor, read_callback);
  png_read_info(png, info);
  png_uint_32 w = 0, h = 0;
  int interlace = 0;
  png_get_IHDR(png, info, &w, &h, &out.bit_depth, &out.color_type, &interlace, nullptr, nullptr);
  out.width = static_cast<int>(w);
  out.height = static_cast<int>(h);
  png_set_interlace_handling(png);
  png_read_update_info(png, info);
  out.stride = png_get_rowbytes(png, info);
  out.rows.resize(out.stride * h);
  row_ptrs.resize(h);
  for (png_uint_32 y = 0; y < h; ++y) row_ptrs[y] = out.rows.data() + y * out.stride;
  png_read_image(png, row_ptrs.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

DecodedPng decode_png(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
    throw FormatError("not a PNG file (bad signature)");
  }
  ReadCursor cursor{bytes, 0};
  ErrorSlot slot;
  DecodedPng out;
  std::vector<png_bytep> row_ptrs;
  if (!decode_png_raw(cursor, slot, out, row_ptrs)) {
    throw FormatError(std::string("malformed PNG: ") + (slot.message[0] != '\0' ? slot.message : "libpng failure"));
  }
  return out;
}

void write_callback(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<Bytes*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + length);
}
void flush_callback(png_structp) {}

bool encode_png_raw(int width, int height, int bit_depth, int color_type, const std::uint8_t* rows,
                    std::size_t stride, ErrorSlot& slot, Bytes& out) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &slot, error_callback, warning_callback);
  if (png == nullptr) return false;
  png_infop info = png_create_info_struct(png);
  if (info == nullptr || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_set_write_fn(png, &out, write_callback, flush_callback);
  png_set_compression_level(png, 6);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), bit_depth, color_type,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < height; ++y) {
    png_write_row(png, const_cast<png_bytep>(rows + static_cast<std::size_t>(y) * stride));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

Bytes encode_png(int width, int height, int bit_depth, int color_type, std::span<const std::uint8_t> rows,
                 std::size_t stride) {
  ErrorSlot slot;
  Bytes out;
  if (!encode_png_raw(width, height, bit_depth, color_type, rows.data(), stride, slot, out)) {
    throw FormatError(std::string("PNG encode failed: ") + slot.message);
  }
  return out;
}

const char* color_type_name(int color_type) {
  switch (color_type) {
    case PNG_COLOR_TYPE_GRAY: return "gray";
    case PNG_COLOR_TYPE_GRAY_ALPHA: return "gray+alpha";
    case PNG_COLOR_TYPE_RGB: return "rgb";
    case PNG_COLOR_TYPE_RGB_ALPHA: return "rgba";
    case PNG_COLOR_TYPE_PALETTE: return "palette";
    default: return "unknown";
  }
}

void require_gray(const DecodedPng& png, int bit_depth, const char* what) {
  if (png.color_type != PNG_COLOR_TYPE_GRAY) {
    throw FormatError(std::string(what) + ": expected 1 channel (gray), got " + color_type_name(png.color_type));
  }
  if (png.bit_depth != bit_depth) {
    throw FormatError(std::string(what) + ": expected bit depth " + std::to_string(bit_depth) + ", got " +
                      std::to_string(png.bit_depth));
  }
}

}  // namespace

GradientMap decode_gradient_map(std::span<const std::uint8_t> bytes) {
  const DecodedPng png = decode_png(bytes);
  require_gray(png, 16, "gradient map");
  ScalarField field(png.width, png.height);
  for (int y = 0; y < png.height; ++y) {
    const std::uint8_t* row = png.rows.data() + static_cast<std::size_t>(y) * png.stride;
    for (int x = 0; x < png.width; ++x) {
      const unsigned stored = (static_cast<unsigned>(row[2 * x]) << 8) | row[2 * x + 1];
      field(x, y) = static_cast<double>(stored) / 65535.0;
    }
  }
  return GradientMap(std::move(field));
}

Bytes encode_gradient_map(const GradientMap& map) {
  const std::size_t stride = static_cast<std::size_t>(map.width()) * 2;
  std::vector<std::uint8_t> rows(stride * static_cast<std::size_t>(map.height()));
  for (int y = 0; y < map.height(); ++y) {
    std::uint8_t* row = rows.data() + static_cast<std::size_t>(y) * stride;
    for (int x = 0; x < map.width(); ++x) {
      const auto stored = static_cast<unsigned>(std::lround(map(x, y) * 65535.0));
      row[2 * x] = static_cast<std::uint8_t>(stored >> 8);
      row[2 * x + 1] = static_cast<std::uint8_t>(stored & 0xFF);
    }
  }
  return encode_png(map.width(), map.height(), 16, PNG_COLOR_TYPE_GRAY, rows, stride);
}

OverlapMap decode_overlap_map(std::span<const std::uint8_t> bytes) {
  const DecodedPng png = decode_png(bytes);
  require_gray(png, 8, "overlap map");
  OverlapMap map(png.width, png.height);
  for (int y = 0; y < png.height; ++y) {
    const std::uint8_t* row = png.rows.data() + static_cast<std::size_t>(y) * png.stride;
    for (int x = 0; x < png.width; ++x) {
      if (row[x] > 2) {
        throw FormatError("overlap map: label " + std::to_string(row[x]) + " outside {0,1,2}");
      }
      map(x, y) = static_cast<OverlapLabel>(row[x]);
    }
  }
  return map;
}

Bytes encode_overlap_map(const OverlapMap& map) {
  const auto stride = static_cast<std::size_t>(map.width());
  std::vector<std::uint8_t> rows(map.size());
  auto labels = map.values();
  for (std::size_t i = 0; i < labels.size(); ++i) rows[i] = static_cast<std::uint8_t>(labels[i]);
  return encode_png(map.width(), map.height(), 8, PNG_COLOR_TYPE_GRAY, rows, stride);
}

Bytes encode_rgb(const RgbImage& image) {
  const std::size_t stride = static_cast<std::size_t>(image.width()) * 3;
  std::vector<std::uint8_t> rows;
  rows.reserve(stride * static_cast<std::size_t>(image.height()));
  for (const Rgb& px : image.values()) {
    rows.push_back(px.r);
    rows.push_back(px.g);
    rows.push_back(px.b);
  }
  return encode_png(image.width(), image.height(), 8, PNG_COLOR_TYPE_RGB, rows, stride);
}

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string read_text_file(const std::filesystem::path& path) {
  const Bytes bytes = read_file(path);
  return std::string(bytes.begin(), bytes.end());
}

}  // namespace threadtrace
