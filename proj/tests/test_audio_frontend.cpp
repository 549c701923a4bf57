#include <doctest.h>

#include <cmath>
#include <complex>

#include "vocalface/audio_frontend.hpp"
#include "vocalface/rng.hpp"

using namespace vf;
using namespace vf::audio;

namespace {

Waveform sine(double freq_hz, double dur_s, int sr = 16000, double amp = 0.5) {
  Waveform w;
  w.sample_rate = sr;
  const int n = static_cast<int>(std::lround(dur_s * sr));
  w.samples.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    w.samples[static_cast<size_t>(i)] =
        static_cast<float>(amp * std::sin(2.0 * M_PI * freq_hz * i / sr));
  return w;
}

// Independent window counter: walk the start positions one hop at a time.
int window_count_oracle(int n_samples, int window_n, int hop_n) {
  int count = 0;
  for (int64_t pos = 0; pos + window_n <= n_samples; pos += hop_n) ++count;
  return count;
}

// Independent short-time framing oracle.
int frame_count_oracle(int n_samples, int frame_len, int hop) {
  int count = 0;
  for (int pos = 0; pos + frame_len <= n_samples; pos += hop) ++count;
  return count;
}

// Brute-force DFT magnitude of one Hann-windowed frame, zero-padded to n_fft.
std::vector<double> dft_magnitude_oracle(const std::vector<float>& samples, int offset,
                                         int frame_len, int n_fft) {
  std::vector<double> mag(static_cast<size_t>(n_fft / 2 + 1));
  for (int k = 0; k <= n_fft / 2; ++k) {
    std::complex<double> acc(0.0, 0.0);
    for (int i = 0; i < frame_len; ++i) {
      const double hann = 0.5 - 0.5 * std::cos(2.0 * M_PI * i / frame_len);
      const double x = samples[static_cast<size_t>(offset + i)] * hann;
      acc += x * std::exp(std::complex<double>(0.0, -2.0 * M_PI * k * i / n_fft));
    }
    mag[static_cast<size_t>(k)] = std::abs(acc);
  }
  return mag;
}

}  // namespace

TEST_CASE("segment_waveform window grid") {
  Waveform w = sine(200.0, 5.0);
  auto windows = segment_waveform(w, 1.25, 0.5);
  CHECK(windows.size() == 7);
  for (auto& win : windows) CHECK(win.samples.size() == 20000);

  // starts are k * 0.625 s = k * 10000 samples
  for (size_t k = 0; k < windows.size(); ++k)
    CHECK(windows[k].samples[0] == w.samples[k * 10000]);
}

TEST_CASE("segment_waveform boundary and error cases") {
  CHECK(segment_waveform(sine(200.0, 1.25), 1.25, 0.5).size() == 1);
  CHECK_THROWS_WITH_AS(segment_waveform(sine(200.0, 1.0), 1.25, 0.5),
                       doctest::Contains("InsufficientAudio"), DataError);
  CHECK_THROWS_WITH_AS(segment_waveform(sine(200.0, 5.0), 1.25, 1.0),
                       doctest::Contains("InvalidOverlap"), ConfigError);
  CHECK_THROWS_WITH_AS(segment_waveform(sine(200.0, 5.0), 1.25, -0.1),
                       doctest::Contains("InvalidOverlap"), ConfigError);
}

TEST_CASE("window count formula matches loop oracle on random inputs") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const double window_s = rng.uniform(0.4, 2.0);
    const double overlap = rng.uniform(0.0, 0.95);
    const int sr = 16000;
    const int window_n = static_cast<int>(std::llround(window_s * sr));
    const int hop_n = static_cast<int>(std::llround(window_s * (1.0 - overlap) * sr));
    if (hop_n <= 0) continue;
    const double dur = rng.uniform(window_s, window_s * 12.0);
    Waveform w = sine(150.0, dur);
    auto windows = segment_waveform(w, window_s, overlap);
    CHECK(static_cast<int>(windows.size()) ==
          window_count_oracle(static_cast<int>(w.samples.size()), window_n, hop_n));
  }
}

TEST_CASE("mel frame count and shape") {
  StftConfig cfg;
  CHECK(cfg.frame_len() == 400);
  CHECK(cfg.frame_hop() == 160);
  CHECK(cfg.n_fft() == 512);

  Waveform w = sine(440.0, 1.25);
  auto seg = mel_spectrogram<float>(w, cfg);
  CHECK(seg.frames() == 123);
  CHECK(seg.bands() == 40);
  CHECK(seg.frames() == frame_count_oracle(20000, 400, 160));

  // identical T for identical window length, any content
  Rng rng(3);
  Waveform noise;
  noise.sample_rate = 16000;
  noise.samples.resize(20000);
  for (auto& s : noise.samples) s = static_cast<float>(rng.uniform(-0.5, 0.5));
  CHECK(mel_spectrogram<float>(noise, cfg).frames() == 123);
}

TEST_CASE("silence maps exactly to the log floor") {
  StftConfig cfg;
  Waveform w;
  w.sample_rate = 16000;
  w.samples.assign(20000, 0.0f);
  auto seg = mel_spectrogram<float>(w, cfg);
  CHECK((seg.values.array() == static_cast<float>(cfg.log_floor)).all());
}

TEST_CASE("mel_spectrogram is deterministic and rejects rate mismatch") {
  StftConfig cfg;
  Waveform w = sine(523.0, 1.25);
  auto a = mel_spectrogram<float>(w, cfg);
  auto b = mel_spectrogram<float>(w, cfg);
  CHECK(a.values == b.values);

  Waveform wrong = sine(523.0, 1.25, 8000);
  CHECK_THROWS_WITH_AS(mel_spectrogram<float>(wrong, cfg),
                       doctest::Contains("ConfigMismatch"), ConfigError);
}

TEST_CASE("sinusoid at a band center peaks in that band") {
  StftConfig cfg;
  // verified against the DFT oracle below; low bands are narrower than the
  // Hann mainlobe, so the guarantee starts a few bands up
  for (int band : {6, 10, 16, 24, 32, 38}) {
    const double fc = mel_band_center_hz(cfg, band);
    Waveform w = sine(fc, 1.25);
    auto seg = mel_spectrogram<float>(w, cfg);
    for (int t = 0; t < seg.frames(); t += 17) {
      int argmax = 0;
      seg.values.row(t).maxCoeff(&argmax);
      CHECK_MESSAGE(argmax == band, "band " << band << " frame " << t);
    }

    // cross-check one frame against a brute-force DFT + independent triangles
    auto mag = dft_magnitude_oracle(w.samples, 0, cfg.frame_len(), cfg.n_fft());
    const double mel_lo = hz_to_mel(0.0), mel_hi = hz_to_mel(8000.0);
    int oracle_argmax = -1;
    double best = -1.0;
    for (int m = 0; m < cfg.n_mels; ++m) {
      const double left = mel_to_hz(mel_lo + (mel_hi - mel_lo) * m / (cfg.n_mels + 1));
      const double center =
          mel_to_hz(mel_lo + (mel_hi - mel_lo) * (m + 1) / (cfg.n_mels + 1));
      const double right =
          mel_to_hz(mel_lo + (mel_hi - mel_lo) * (m + 2) / (cfg.n_mels + 1));
      double acc = 0.0;
      for (int k = 0; k <= cfg.n_fft() / 2; ++k) {
        const double hz = static_cast<double>(k) * cfg.sample_rate / cfg.n_fft();
        double wgt = 0.0;
        if (hz > left && hz < right)
          wgt = std::min((hz - left) / (center - left), (right - hz) / (right - center));
        acc += wgt * mag[static_cast<size_t>(k)];
      }
      if (acc > best) {
        best = acc;
        oracle_argmax = m;
      }
    }
    CHECK(oracle_argmax == band);
  }
}

TEST_CASE("hop-aligned time shift leaves window content bit-identical") {
  StftConfig stft;
  SegmentConfig seg_cfg;
  Waveform w = sine(313.0, 4.0);
  // prepend exactly one hop (0.625 s = 10000 samples) of noise
  Rng rng(5);
  Waveform shifted;
  shifted.sample_rate = w.sample_rate;
  shifted.samples.resize(10000);
  for (auto& s : shifted.samples) s = static_cast<float>(rng.uniform(-0.1, 0.1));
  shifted.samples.insert(shifted.samples.end(), w.samples.begin(), w.samples.end());

  auto base = extract_segments<float>(w, stft, seg_cfg);
  auto moved = extract_segments<float>(shifted, stft, seg_cfg);
  REQUIRE(moved.segments.size() == base.segments.size() + 1);
  for (size_t k = 0; k < base.segments.size(); ++k)
    CHECK(base.segments[k].values == moved.segments[k + 1].values);
}

TEST_CASE("segment sequence start times advance by one hop") {
  auto seq = extract_segments<float>(sine(200.0, 5.0), StftConfig{}, SegmentConfig{});
  REQUIRE(seq.segments.size() == 7);
  for (size_t k = 1; k < seq.segments.size(); ++k)
    CHECK(seq.segments[k].window_start_s - seq.segments[k - 1].window_start_s ==
          doctest::Approx(0.625).epsilon(1e-12));
}
