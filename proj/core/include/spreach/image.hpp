#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace spreach {

struct ImageRgb8 {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // 3 * width * height, row-major

  std::uint8_t* at(int u, int v) { return pixels.data() + 3 * (std::size_t(v) * width + u); }
  const std::uint8_t* at(int u, int v) const {
    return pixels.data() + 3 * (std::size_t(v) * width + u);
  }
  static ImageRgb8 filled(int width, int height, std::uint8_t r, std::uint8_t g,
                          std::uint8_t b);
};

struct ImageGray8 {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  std::uint8_t& at(int u, int v) { return pixels[std::size_t(v) * width + u]; }
  std::uint8_t at(int u, int v) const { return pixels[std::size_t(v) * width + u]; }
};

struct ImageGray16 {
  int width = 0;
  int height = 0;
  std::vector<std::uint16_t> pixels;

  std::uint16_t& at(int u, int v) { return pixels[std::size_t(v) * width + u]; }
  std::uint16_t at(int u, int v) const { return pixels[std::size_t(v) * width + u]; }
};

// PNG readers. Gray/palette/alpha inputs are expanded to RGB for
// read_png_rgb8; read_png_gray16 requires a 16-bit single-channel file.
// Throw IoError on filesystem failures and FormatError on non-PNG input.
ImageRgb8 read_png_rgb8(const std::filesystem::path& path);
ImageGray16 read_png_gray16(const std::filesystem::path& path);

// PNG encoders with pinned settings (no filtering, fixed compression level,
// no ancillary chunks) so identical pixels give identical bytes.
std::vector<std::uint8_t> encode_png(const ImageRgb8& image);
std::vector<std::uint8_t> encode_png(const ImageGray8& image);
std::vector<std::uint8_t> encode_png(const ImageGray16& image);

void write_png(const std::filesystem::path& path, const ImageRgb8& image);
void write_png(const std::filesystem::path& path, const ImageGray8& image);
void write_png(const std::filesystem::path& path, const ImageGray16& image);

}  // namespace spreach
