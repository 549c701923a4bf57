#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace vf {

// Mono waveform, samples in [-1, 1].
struct Waveform {
  std::vector<float> samples;
  int sample_rate = 16000;

  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

// PCM-16 mono WAV. Anything else (stereo, float, compressed) is rejected.
Waveform read_wav(const std::string& path);
void write_wav(const std::string& path, const Waveform& w);

}  // namespace vf
