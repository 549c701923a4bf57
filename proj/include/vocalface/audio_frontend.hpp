#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "vocalface/fft.hpp"
#include "vocalface/types.hpp"
#include "vocalface/wav.hpp"

namespace vf::audio {

// Short-time analysis parameters. Frame/hop are fixed in milliseconds so the
// frame count of a 1.25 s window is sample-rate independent.
struct StftConfig {
  int sample_rate = 16000;
  double frame_ms = 25.0;
  double hop_ms = 10.0;
  int n_mels = 40;
  double log_floor = -10.0;  // natural-log floor applied to mel magnitudes

  int frame_len() const {
    return static_cast<int>(std::lround(sample_rate * frame_ms / 1000.0));
  }
  int frame_hop() const {
    return static_cast<int>(std::lround(sample_rate * hop_ms / 1000.0));
  }
  int n_fft() const { return next_pow2(frame_len()); }
  double fmin() const { return 0.0; }
  double fmax() const { return sample_rate / 2.0; }
};

struct SegmentConfig {
  double window_s = 1.25;
  double overlap = 0.5;
};

// One log-mel window. values is frames x mel-bands (T x F); window_start_s
// records where the window begins in the source utterance.
template <typename Scalar>
struct MelSegment {
  Mat<Scalar> values;
  double window_start_s = 0.0;

  int frames() const { return static_cast<int>(values.rows()); }
  int bands() const { return static_cast<int>(values.cols()); }
  // bands-as-channels view consumed by the voice encoder
  Mat<Scalar> channels_time() const { return values.transpose(); }
};

template <typename Scalar>
struct MelSegmentSequence {
  std::vector<MelSegment<Scalar>> segments;
  std::string source_id;
};

// HTK mel scale
inline double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
inline double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

// Triangular filterbank, n_mels x (n_fft/2 + 1), peak weight 1, triangles
// evaluated at FFT bin centers.
template <typename Scalar>
Mat<Scalar> mel_filterbank(const StftConfig& cfg) {
  const int n_bins = cfg.n_fft() / 2 + 1;
  const double mel_lo = hz_to_mel(cfg.fmin());
  const double mel_hi = hz_to_mel(cfg.fmax());
  std::vector<double> edges(static_cast<size_t>(cfg.n_mels) + 2);
  for (int i = 0; i < cfg.n_mels + 2; ++i)
    edges[static_cast<size_t>(i)] =
        mel_to_hz(mel_lo + (mel_hi - mel_lo) * i / (cfg.n_mels + 1));

  Mat<Scalar> fb = Mat<Scalar>::Zero(cfg.n_mels, n_bins);
  for (int m = 0; m < cfg.n_mels; ++m) {
    const double left = edges[static_cast<size_t>(m)];
    const double center = edges[static_cast<size_t>(m) + 1];
    const double right = edges[static_cast<size_t>(m) + 2];
    for (int k = 0; k < n_bins; ++k) {
      const double hz = static_cast<double>(k) * cfg.sample_rate / cfg.n_fft();
      double w = 0.0;
      if (hz > left && hz < right)
        w = std::min((hz - left) / (center - left), (right - hz) / (right - center));
      fb(m, k) = static_cast<Scalar>(w);
    }
  }
  return fb;
}

// Frequency at which mel band b peaks. Used by tests.
inline double mel_band_center_hz(const StftConfig& cfg, int band) {
  const double mel_lo = hz_to_mel(cfg.fmin());
  const double mel_hi = hz_to_mel(cfg.fmax());
  return mel_to_hz(mel_lo + (mel_hi - mel_lo) * (band + 1) / (cfg.n_mels + 1));
}

// Periodic Hann window.
template <typename Scalar>
std::vector<Scalar> hann_window(int n) {
  std::vector<Scalar> w(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    w[static_cast<size_t>(i)] =
        static_cast<Scalar>(0.5 - 0.5 * std::cos(2.0 * M_PI * i / n));
  return w;
}

inline int frame_count(int n_samples, const StftConfig& cfg) {
  return (n_samples - cfg.frame_len()) / cfg.frame_hop() + 1;
}

// Slice a waveform into fixed-width windows. Starts at k * window * (1 -
// overlap); a trailing remainder shorter than one window is discarded.
inline std::vector<Waveform> segment_waveform(const Waveform& w,
                                              double window_s = 1.25,
                                              double overlap = 0.5) {
  if (!(overlap >= 0.0 && overlap < 1.0))
    throw ConfigError("InvalidOverlap", "overlap must lie in [0, 1)");
  const int64_t window_n = std::llround(window_s * w.sample_rate);
  const int64_t hop_n = std::llround(window_s * (1.0 - overlap) * w.sample_rate);
  const int64_t n = static_cast<int64_t>(w.samples.size());
  if (n < window_n)
    throw DataError("InsufficientAudio",
                    "utterance shorter than one window (" +
                        std::to_string(w.duration_s()) + " s < " +
                        std::to_string(window_s) + " s)");
  require(hop_n > 0, "InvalidOverlap", "window/overlap give a zero hop", 2);
  const int64_t count = (n - window_n) / hop_n + 1;
  std::vector<Waveform> out;
  out.reserve(static_cast<size_t>(count));
  for (int64_t k = 0; k < count; ++k) {
    Waveform win;
    win.sample_rate = w.sample_rate;
    const int64_t start = k * hop_n;
    win.samples.assign(w.samples.begin() + start, w.samples.begin() + start + window_n);
    out.push_back(std::move(win));
  }
  return out;
}

// Log-mel spectrogram of one window, frames x bands. Values are natural-log
// magnitudes floored at cfg.log_floor (silence maps exactly to the floor).
template <typename Scalar>
MelSegment<Scalar> mel_spectrogram(const Waveform& window, const StftConfig& cfg,
                                   double window_start_s = 0.0) {
  if (window.sample_rate != cfg.sample_rate)
    throw ConfigError("ConfigMismatch",
                      "waveform sample rate " + std::to_string(window.sample_rate) +
                          " != configured " + std::to_string(cfg.sample_rate));
  const int frame_len = cfg.frame_len();
  const int hop = cfg.frame_hop();
  const int n_fft = cfg.n_fft();
  const int n = static_cast<int>(window.samples.size());
  require(n >= frame_len, "InsufficientAudio", "window shorter than one frame");
  const int t_frames = frame_count(n, cfg);

  static thread_local std::vector<Scalar> hann;
  if (static_cast<int>(hann.size()) != frame_len) hann = hann_window<Scalar>(frame_len);
  const Mat<Scalar> fb = mel_filterbank<Scalar>(cfg);
  const Scalar floor_mag = std::exp(static_cast<Scalar>(cfg.log_floor));

  MelSegment<Scalar> seg;
  seg.window_start_s = window_start_s;
  seg.values.resize(t_frames, cfg.n_mels);
  std::vector<Scalar> frame(static_cast<size_t>(frame_len));
  for (int t = 0; t < t_frames; ++t) {
    for (int i = 0; i < frame_len; ++i)
      frame[static_cast<size_t>(i)] =
          static_cast<Scalar>(window.samples[static_cast<size_t>(t * hop + i)]) *
          hann[static_cast<size_t>(i)];
    const std::vector<Scalar> mag = real_fft_magnitude(frame.data(), frame_len, n_fft);
    Eigen::Map<const Vec<Scalar>> mag_v(mag.data(), static_cast<int>(mag.size()));
    Vec<Scalar> mel = fb * mag_v;
    for (int b = 0; b < cfg.n_mels; ++b)
      seg.values(t, b) = std::log(std::max(mel(b), floor_mag));
  }
  return seg;
}

// Full frontend: slice, then mel-transform each window.
template <typename Scalar>
MelSegmentSequence<Scalar> extract_segments(const Waveform& w, const StftConfig& stft,
                                            const SegmentConfig& seg,
                                            const std::string& source_id = "") {
  MelSegmentSequence<Scalar> out;
  out.source_id = source_id;
  const double hop_s = seg.window_s * (1.0 - seg.overlap);
  const std::vector<Waveform> windows = segment_waveform(w, seg.window_s, seg.overlap);
  out.segments.reserve(windows.size());
  for (size_t k = 0; k < windows.size(); ++k)
    out.segments.push_back(
        mel_spectrogram<Scalar>(windows[k], stft, static_cast<double>(k) * hop_s));
  return out;
}

}  // namespace vf::audio
