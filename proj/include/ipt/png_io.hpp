#pragma once

#include <filesystem>

#include "ipt/types.hpp"

namespace ipt {

// 8-bit PNG codec. Encoding uses fixed zlib settings and writes no
// timestamp chunks, so identical rasters give identical files.

void write_png(const std::filesystem::path& path, const Frame& frame);
/// Masks are written as grayscale 0/255.
void write_png(const std::filesystem::path& path, const Mask& mask);

Frame read_frame_png(const std::filesystem::path& path);
/// Rejects any gray level other than 0 or 255.
Mask read_mask_png(const std::filesystem::path& path);

}  // namespace ipt
