#include "ipt/png_io.hpp"

#include <png.h>

#include <cstring>

#include "ipt/errors.hpp"

namespace ipt {
namespace {

void write_raw(const std::filesystem::path& path, std::uint32_t width, std::uint32_t height, png_uint_32 format,
               const std::uint8_t* data) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = width;
  image.height = height;
  image.format = format;
  if (!png_image_write_to_file(&image, path.c_str(), 0, data, 0, nullptr)) {
    const std::string detail = image.message;
    png_image_free(&image);
    throw DataError("cannot write '" + path.string() + "': " + detail);
  }
}

std::vector<std::uint8_t> read_raw(const std::filesystem::path& path, png_uint_32 format, std::uint32_t& width,
                                   std::uint32_t& height) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw DataError("cannot read '" + path.string() + "': " + image.message);
  }
  image.format = format;
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    const std::string detail = image.message;
    png_image_free(&image);
    throw DataError("cannot decode '" + path.string() + "': " + detail);
  }
  width = image.width;
  height = image.height;
  return buffer;
}

}  // namespace

void write_png(const std::filesystem::path& path, const Frame& frame) {
  write_raw(path, frame.width(), frame.height(), PNG_FORMAT_RGB, frame.pixels().data());
}

void write_png(const std::filesystem::path& path, const Mask& mask) {
  std::vector<std::uint8_t> gray(mask.values().begin(), mask.values().end());
  for (auto& v : gray) v = v ? 255 : 0;
  write_raw(path, mask.width(), mask.height(), PNG_FORMAT_GRAY, gray.data());
}

Frame read_frame_png(const std::filesystem::path& path) {
  std::uint32_t w = 0, h = 0;
  auto pixels = read_raw(path, PNG_FORMAT_RGB, w, h);
  return Frame(w, h, std::move(pixels));
}

Mask read_mask_png(const std::filesystem::path& path) {
  std::uint32_t w = 0, h = 0;
  auto values = read_raw(path, PNG_FORMAT_GRAY, w, h);
  for (auto& v : values) {
    if (v != 0 && v != 255) {
      throw DataError("mask '" + path.string() + "' contains gray level " + std::to_string(v) + " (only 0/255 allowed)");
    }
    v = v ? 1 : 0;
  }
  return Mask(w, h, std::move(values));
}

}  // namespace ipt
