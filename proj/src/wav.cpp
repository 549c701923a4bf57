#include "vocalface/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "vocalface/types.hpp"

namespace vf {

namespace {

uint32_t rd_u32(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

uint16_t rd_u16(const unsigned char* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

void wr_u32(std::string& s, uint32_t v) {
  for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void wr_u16(std::string& s, uint16_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>((v >> 8) & 0xff));
}

}  // namespace

Waveform read_wav(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("IOFailure", "cannot open " + path);
  std::vector<unsigned char> raw((std::istreambuf_iterator<char>(f)),
                                 std::istreambuf_iterator<char>());
  if (raw.size() < 44 || std::memcmp(raw.data(), "RIFF", 4) != 0 ||
      std::memcmp(raw.data() + 8, "WAVE", 4) != 0)
    throw DataError("IOFailure", "not a RIFF/WAVE file: " + path);

  Waveform w;
  size_t pos = 12;
  bool got_fmt = false, got_data = false;
  uint16_t channels = 0, bits = 0, format = 0;
  while (pos + 8 <= raw.size()) {
    const unsigned char* hdr = raw.data() + pos;
    uint32_t chunk_size = rd_u32(hdr + 4);
    size_t body = pos + 8;
    if (body + chunk_size > raw.size()) chunk_size = static_cast<uint32_t>(raw.size() - body);
    if (std::memcmp(hdr, "fmt ", 4) == 0 && chunk_size >= 16) {
      format = rd_u16(raw.data() + body);
      channels = rd_u16(raw.data() + body + 2);
      w.sample_rate = static_cast<int>(rd_u32(raw.data() + body + 4));
      bits = rd_u16(raw.data() + body + 14);
      got_fmt = true;
    } else if (std::memcmp(hdr, "data", 4) == 0) {
      if (!got_fmt) throw DataError("IOFailure", "data chunk before fmt in " + path);
      if (format != 1 || bits != 16 || channels != 1)
        throw DataError("IOFailure",
                        "unsupported WAV (need PCM-16 mono): " + path);
      size_t n = chunk_size / 2;
      w.samples.resize(n);
      for (size_t i = 0; i < n; ++i) {
        int16_t s = static_cast<int16_t>(rd_u16(raw.data() + body + 2 * i));
        w.samples[i] = static_cast<float>(s) / 32768.0f;
      }
      got_data = true;
    }
    pos = body + chunk_size + (chunk_size & 1);
  }
  if (!got_data) throw DataError("IOFailure", "missing data chunk: " + path);
  return w;
}

void write_wav(const std::string& path, const Waveform& w) {
  std::string out;
  const uint32_t data_bytes = static_cast<uint32_t>(w.samples.size() * 2);
  out.reserve(44 + data_bytes);
  out += "RIFF";
  wr_u32(out, 36 + data_bytes);
  out += "WAVEfmt ";
  wr_u32(out, 16);
  wr_u16(out, 1);  // PCM
  wr_u16(out, 1);  // mono
  wr_u32(out, static_cast<uint32_t>(w.sample_rate));
  wr_u32(out, static_cast<uint32_t>(w.sample_rate * 2));
  wr_u16(out, 2);
  wr_u16(out, 16);
  out += "data";
  wr_u32(out, data_bytes);
  for (float s : w.samples) {
    float clipped = std::clamp(s, -1.0f, 1.0f);
    int v = static_cast<int>(std::lround(clipped * 32767.0f));
    wr_u16(out, static_cast<uint16_t>(static_cast<int16_t>(v)));
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("IOFailure", "cannot write " + path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw DataError("IOFailure", "short write: " + path);
}

}  // namespace vf
