#include "vocalface/png_io.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

namespace vf {

namespace {

void wr_u32be(std::string& s, uint32_t v) {
  s.push_back(static_cast<char>((v >> 24) & 0xff));
  s.push_back(static_cast<char>((v >> 16) & 0xff));
  s.push_back(static_cast<char>((v >> 8) & 0xff));
  s.push_back(static_cast<char>(v & 0xff));
}

uint32_t rd_u32be(const unsigned char* p) {
  return (static_cast<uint32_t>(p[0]) << 24) | (static_cast<uint32_t>(p[1]) << 16) |
         (static_cast<uint32_t>(p[2]) << 8) | static_cast<uint32_t>(p[3]);
}

void append_chunk(std::string& out, const char type[4], const std::string& body) {
  wr_u32be(out, static_cast<uint32_t>(body.size()));
  std::string payload(type, 4);
  payload += body;
  out += payload;
  uint32_t crc = static_cast<uint32_t>(
      crc32(0, reinterpret_cast<const Bytef*>(payload.data()),
            static_cast<uInt>(payload.size())));
  wr_u32be(out, crc);
}

std::string deflate_all(const std::string& raw, int level) {
  uLongf bound = compressBound(static_cast<uLong>(raw.size()));
  std::string out(bound, '\0');
  if (compress2(reinterpret_cast<Bytef*>(out.data()), &bound,
                reinterpret_cast<const Bytef*>(raw.data()),
                static_cast<uLong>(raw.size()), level) != Z_OK)
    throw DataError("IOFailure", "deflate failed");
  out.resize(bound);
  return out;
}

std::string inflate_all(const unsigned char* data, size_t size, size_t expected) {
  std::string out(expected, '\0');
  uLongf dest_len = static_cast<uLongf>(expected);
  int rc = uncompress(reinterpret_cast<Bytef*>(out.data()), &dest_len, data,
                      static_cast<uLong>(size));
  if (rc != Z_OK || dest_len != expected)
    throw DataError("IOFailure", "inflate failed (corrupt PNG?)");
  return out;
}

int paeth(int a, int b, int c) {
  int p = a + b - c;
  int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
  if (pa <= pb && pa <= pc) return a;
  if (pb <= pc) return b;
  return c;
}

}  // namespace

void write_png(const std::string& path, const Rgb8Image& img) {
  require(img.width > 0 && img.height > 0 &&
              img.data.size() == static_cast<size_t>(img.width) * img.height * 3,
          "IOFailure", "malformed image buffer");
  std::string raw;
  raw.reserve(static_cast<size_t>(img.height) * (1 + static_cast<size_t>(img.width) * 3));
  for (int y = 0; y < img.height; ++y) {
    raw.push_back('\0');  // filter 0 per scanline
    raw.append(reinterpret_cast<const char*>(img.px(0, y)),
               static_cast<size_t>(img.width) * 3);
  }
  std::string out("\x89PNG\r\n\x1a\n", 8);
  std::string ihdr;
  wr_u32be(ihdr, static_cast<uint32_t>(img.width));
  wr_u32be(ihdr, static_cast<uint32_t>(img.height));
  ihdr.push_back(8);   // bit depth
  ihdr.push_back(2);   // color type RGB
  ihdr.push_back(0);   // compression
  ihdr.push_back(0);   // filter
  ihdr.push_back(0);   // no interlace
  append_chunk(out, "IHDR", ihdr);
  append_chunk(out, "IDAT", deflate_all(raw, 6));
  append_chunk(out, "IEND", "");

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("IOFailure", "cannot write " + path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw DataError("IOFailure", "short write: " + path);
}

Rgb8Image read_png(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("IOFailure", "cannot open " + path);
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(f)),
                                 std::istreambuf_iterator<char>());
  if (buf.size() < 8 || std::memcmp(buf.data(), "\x89PNG\r\n\x1a\n", 8) != 0)
    throw DataError("IOFailure", "not a PNG: " + path);

  size_t pos = 8;
  int width = 0, height = 0, color_type = -1, bit_depth = 0, interlace = 0;
  std::string idat;
  while (pos + 12 <= buf.size()) {
    uint32_t len = rd_u32be(buf.data() + pos);
    const unsigned char* type = buf.data() + pos + 4;
    const unsigned char* body = buf.data() + pos + 8;
    if (pos + 12 + len > buf.size()) throw DataError("IOFailure", "truncated PNG");
    if (std::memcmp(type, "IHDR", 4) == 0 && len >= 13) {
      width = static_cast<int>(rd_u32be(body));
      height = static_cast<int>(rd_u32be(body + 4));
      bit_depth = body[8];
      color_type = body[9];
      interlace = body[12];
    } else if (std::memcmp(type, "IDAT", 4) == 0) {
      idat.append(reinterpret_cast<const char*>(body), len);
    } else if (std::memcmp(type, "IEND", 4) == 0) {
      break;
    }
    pos += 12 + len;
  }
  require(width > 0 && height > 0, "IOFailure", "bad PNG header");
  if (bit_depth != 8 || interlace != 0 ||
      (color_type != 0 && color_type != 2 && color_type != 6))
    throw DataError("IOFailure",
                    "unsupported PNG variant (need 8-bit gray/RGB/RGBA, "
                    "non-interlaced): " + path);
  const int src_ch = color_type == 0 ? 1 : (color_type == 2 ? 3 : 4);
  const size_t stride = static_cast<size_t>(width) * src_ch;
  std::string raw = inflate_all(reinterpret_cast<const unsigned char*>(idat.data()),
                                idat.size(), (stride + 1) * height);

  // undo per-scanline filters in place
  std::vector<uint8_t> prev(stride, 0);
  Rgb8Image img;
  img.width = width;
  img.height = height;
  img.data.resize(static_cast<size_t>(width) * height * 3);
  std::vector<uint8_t> line(stride);
  for (int y = 0; y < height; ++y) {
    const unsigned char* src =
        reinterpret_cast<const unsigned char*>(raw.data()) + static_cast<size_t>(y) * (stride + 1);
    int filter = src[0];
    for (size_t i = 0; i < stride; ++i) {
      int x = src[1 + i];
      int a = i >= static_cast<size_t>(src_ch) ? line[i - src_ch] : 0;
      int b = prev[i];
      int c = i >= static_cast<size_t>(src_ch) ? prev[i - src_ch] : 0;
      switch (filter) {
        case 0: break;
        case 1: x += a; break;
        case 2: x += b; break;
        case 3: x += (a + b) / 2; break;
        case 4: x += paeth(a, b, c); break;
        default: throw DataError("IOFailure", "bad PNG filter");
      }
      line[i] = static_cast<uint8_t>(x & 0xff);
    }
    for (int xp = 0; xp < width; ++xp) {
      uint8_t r, g, bch;
      if (src_ch == 1) {
        r = g = bch = line[static_cast<size_t>(xp)];
      } else {
        r = line[static_cast<size_t>(xp) * src_ch];
        g = line[static_cast<size_t>(xp) * src_ch + 1];
        bch = line[static_cast<size_t>(xp) * src_ch + 2];
      }
      uint8_t* dst = img.px(xp, y);
      dst[0] = r;
      dst[1] = g;
      dst[2] = bch;
    }
    prev = line;
  }
  return img;
}

Rgb8Image to_rgb8(const FaceImagef& img) {
  Rgb8Image out;
  out.width = img.width;
  out.height = img.height;
  out.data.resize(static_cast<size_t>(img.width) * img.height * 3);
  for (int i = 0; i < img.width * img.height; ++i)
    for (int c = 0; c < 3; ++c) {
      float v = std::clamp(img.pixels(c, i), -1.0f, 1.0f);
      out.data[static_cast<size_t>(i) * 3 + c] =
          static_cast<uint8_t>(std::lround((v + 1.0f) * 127.5f));
    }
  return out;
}

FaceImagef to_face_image(const Rgb8Image& img) {
  FaceImagef out;
  out.width = img.width;
  out.height = img.height;
  out.pixels.resize(3, img.width * img.height);
  for (int i = 0; i < img.width * img.height; ++i)
    for (int c = 0; c < 3; ++c)
      out.pixels(c, i) = static_cast<float>(img.data[static_cast<size_t>(i) * 3 + c]) / 127.5f - 1.0f;
  return out;
}

}  // namespace vf
