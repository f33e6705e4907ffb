#include "spreach/image.hpp"

#include <bit>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>

#include <png.h>

#include "spreach/errors.hpp"

namespace spreach {

ImageRgb8 ImageRgb8::filled(int width, int height, std::uint8_t r, std::uint8_t g,
                            std::uint8_t b) {
  ImageRgb8 image;
  image.width = width;
  image.height = height;
  image.pixels.resize(std::size_t(3) * width * height);
  for (std::size_t i = 0; i < image.pixels.size(); i += 3) {
    image.pixels[i] = r;
    image.pixels[i + 1] = g;
    image.pixels[i + 2] = b;
  }
  return image;
}

namespace {

struct PngReadGuard {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngReadGuard() {
    if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
  }
};

struct PngWriteGuard {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngWriteGuard() {
    if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
  }
};

struct FileGuard {
  std::FILE* f = nullptr;
  ~FileGuard() {
    if (f) std::fclose(f);
  }
};

void error_silencer(png_structp, png_const_charp) {
  // libpng still longjmps back to the setjmp site; keep stderr quiet.
}

std::vector<png_bytep> row_pointers(std::uint8_t* data, int height, std::size_t stride) {
  std::vector<png_bytep> rows(height);
  for (int v = 0; v < height; ++v) rows[v] = data + std::size_t(v) * stride;
  return rows;
}

void append_to_vector(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + length);
}

void flush_noop(png_structp) {}

// Pinned encoder settings: no row filtering and a fixed compression level, so
// byte output depends only on the pixel data.
void pin_encoder(png_structp png) {
  png_set_filter(png, 0, PNG_FILTER_NONE);
  png_set_compression_level(png, 6);
}

std::vector<std::uint8_t> encode_common(int width, int height, int bit_depth,
                                        int color_type, std::size_t row_stride,
                                        std::uint8_t* data, bool swap16) {
  if (width <= 0 || height <= 0) throw InvalidArgumentError("png: empty image");
  std::vector<std::uint8_t> out;
  PngWriteGuard g;
  g.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, error_silencer,
                                  nullptr);
  if (!g.png) throw Error("png: write struct allocation failed");
  g.info = png_create_info_struct(g.png);
  if (!g.info) throw Error("png: info struct allocation failed");
  auto rows = row_pointers(data, height, row_stride);

  if (setjmp(png_jmpbuf(g.png))) {
    throw Error("png: encoding failed");
  }
  png_set_write_fn(g.png, &out, append_to_vector, flush_noop);
  pin_encoder(g.png);
  png_set_IHDR(g.png, g.info, png_uint_32(width), png_uint_32(height), bit_depth,
               color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(g.png, g.info);
  if (swap16 && std::endian::native == std::endian::little) png_set_swap(g.png);
  png_write_image(g.png, rows.data());
  png_write_end(g.png, nullptr);
  return out;
}

void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
  if (!out) throw IoError("failed writing: " + path.string());
}

}  // namespace

ImageRgb8 read_png_rgb8(const std::filesystem::path& path) {
  FileGuard file;
  file.f = std::fopen(path.string().c_str(), "rb");
  if (!file.f) throw IoError("cannot open image: " + path.string());

  unsigned char sig[8];
  if (std::fread(sig, 1, 8, file.f) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    throw FormatError("not a PNG file: " + path.string());
  }

  PngReadGuard g;
  g.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, error_silencer, nullptr);
  if (!g.png) throw Error("png: read struct allocation failed");
  g.info = png_create_info_struct(g.png);
  if (!g.info) throw Error("png: info struct allocation failed");

  ImageRgb8 image;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(g.png))) {
    throw FormatError("png: decoding failed: " + path.string());
  }
  png_init_io(g.png, file.f);
  png_set_sig_bytes(g.png, 8);
  png_read_info(g.png, g.info);

  png_uint_32 width = 0, height = 0;
  int bit_depth = 0, color_type = 0;
  png_get_IHDR(g.png, g.info, &width, &height, &bit_depth, &color_type, nullptr,
               nullptr, nullptr);

  // Normalize everything to 8-bit RGB.
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(g.png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) {
    png_set_expand_gray_1_2_4_to_8(g.png);
  }
  if (png_get_valid(g.png, g.info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(g.png);
  if (bit_depth == 16) png_set_strip_16(g.png);
  if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA) {
    png_set_gray_to_rgb(g.png);
  }
  png_set_strip_alpha(g.png);
  png_read_update_info(g.png, g.info);

  image.width = int(width);
  image.height = int(height);
  image.pixels.resize(std::size_t(3) * width * height);
  rows = row_pointers(image.pixels.data(), image.height, std::size_t(3) * width);
  png_read_image(g.png, rows.data());
  png_read_end(g.png, nullptr);
  return image;
}

ImageGray16 read_png_gray16(const std::filesystem::path& path) {
  FileGuard file;
  file.f = std::fopen(path.string().c_str(), "rb");
  if (!file.f) throw IoError("cannot open image: " + path.string());

  unsigned char sig[8];
  if (std::fread(sig, 1, 8, file.f) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    throw FormatError("not a PNG file: " + path.string());
  }

  PngReadGuard g;
  g.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, error_silencer, nullptr);
  if (!g.png) throw Error("png: read struct allocation failed");
  g.info = png_create_info_struct(g.png);
  if (!g.info) throw Error("png: info struct allocation failed");

  ImageGray16 image;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(g.png))) {
    throw FormatError("png: decoding failed: " + path.string());
  }
  png_init_io(g.png, file.f);
  png_set_sig_bytes(g.png, 8);
  png_read_info(g.png, g.info);

  png_uint_32 width = 0, height = 0;
  int bit_depth = 0, color_type = 0;
  png_get_IHDR(g.png, g.info, &width, &height, &bit_depth, &color_type, nullptr,
               nullptr, nullptr);
  if (bit_depth != 16 || color_type != PNG_COLOR_TYPE_GRAY) {
    throw FormatError("expected 16-bit single-channel PNG: " + path.string());
  }
  if (std::endian::native == std::endian::little) png_set_swap(g.png);
  png_read_update_info(g.png, g.info);

  image.width = int(width);
  image.height = int(height);
  image.pixels.resize(std::size_t(width) * height);
  rows = row_pointers(reinterpret_cast<std::uint8_t*>(image.pixels.data()), image.height,
                      std::size_t(2) * width);
  png_read_image(g.png, rows.data());
  png_read_end(g.png, nullptr);
  return image;
}

std::vector<std::uint8_t> encode_png(const ImageRgb8& image) {
  if (image.pixels.size() != std::size_t(3) * image.width * image.height) {
    throw InvalidArgumentError("png: rgb buffer size does not match dims");
  }
  return encode_common(image.width, image.height, 8, PNG_COLOR_TYPE_RGB,
                       std::size_t(3) * image.width,
                       const_cast<std::uint8_t*>(image.pixels.data()), false);
}

std::vector<std::uint8_t> encode_png(const ImageGray8& image) {
  if (image.pixels.size() != std::size_t(image.width) * image.height) {
    throw InvalidArgumentError("png: gray buffer size does not match dims");
  }
  return encode_common(image.width, image.height, 8, PNG_COLOR_TYPE_GRAY,
                       std::size_t(image.width),
                       const_cast<std::uint8_t*>(image.pixels.data()), false);
}

std::vector<std::uint8_t> encode_png(const ImageGray16& image) {
  if (image.pixels.size() != std::size_t(image.width) * image.height) {
    throw InvalidArgumentError("png: gray16 buffer size does not match dims");
  }
  return encode_common(
      image.width, image.height, 16, PNG_COLOR_TYPE_GRAY, std::size_t(2) * image.width,
      const_cast<std::uint8_t*>(reinterpret_cast<const std::uint8_t*>(image.pixels.data())),
      true);
}

void write_png(const std::filesystem::path& path, const ImageRgb8& image) {
  write_file(path, encode_png(image));
}

void write_png(const std::filesystem::path& path, const ImageGray8& image) {
  write_file(path, encode_png(image));
}

void write_png(const std::filesystem::path& path, const ImageGray16& image) {
  write_file(path, encode_png(image));
}

}  // namespace spreach
