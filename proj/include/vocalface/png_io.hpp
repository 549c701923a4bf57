#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vocalface/types.hpp"

namespace vf {

// 8-bit RGB raster, row-major, 3 bytes per pixel.
struct Rgb8Image {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> data;  // height*width*3

  uint8_t* px(int x, int y) { return data.data() + 3 * (static_cast<size_t>(y) * width + x); }
  const uint8_t* px(int x, int y) const {
    return data.data() + 3 * (static_cast<size_t>(y) * width + x);
  }
};

// Minimal PNG codec (zlib deflate). Writes 8-bit RGB; reads non-interlaced
// 8-bit grayscale/RGB/RGBA, which covers everything this project emits.
void write_png(const std::string& path, const Rgb8Image& img);
Rgb8Image read_png(const std::string& path);

// [-1,1] float tensor (3 x H*W) <-> 8-bit RGB
Rgb8Image to_rgb8(const FaceImagef& img);
FaceImagef to_face_image(const Rgb8Image& img);

}  // namespace vf
