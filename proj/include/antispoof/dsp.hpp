#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "antispoof/audio.hpp"
#include "antispoof/config.hpp"

namespace antispoof {

// Magnitude spectrogram, one row per frame, bins 0..N/2.
struct Spectrogram {
  std::vector<double> magnitudes;  // frame_count x bin_count, row-major
  std::vector<double> bin_freqs;   // Hz, bin k -> k * sample_rate / frame_length
  std::size_t frame_count = 0;
  std::size_t bin_count = 0;
  std::size_t frame_length = 0;
  std::size_t hop_length = 0;
  int sample_rate = 0;

  std::span<const double> row(std::size_t i) const {
    return {magnitudes.data() + i * bin_count, bin_count};
  }
};

namespace detail {

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Iterative radix-2 Cooley-Tukey, in place. n must be a power of two.
inline void fft_radix2(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * M_PI / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

// O(n^2) fallback for frame lengths that are not powers of two.
inline std::vector<std::complex<double>> dft_direct(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
      const double ang = -2.0 * M_PI * static_cast<double>(k) * static_cast<double>(t) /
                         static_cast<double>(n);
      acc += x[t] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    out[k] = acc;
  }
  return out;
}

}  // namespace detail

// |DFT| of each frame, bins 0..N/2.
inline Spectrogram stft(const FrameMatrix& frames) {
  Spectrogram spec;
  spec.frame_count = frames.frame_count;
  spec.frame_length = frames.frame_length;
  spec.hop_length = frames.hop_length;
  spec.sample_rate = frames.sample_rate;
  spec.bin_count = frames.frame_length / 2 + 1;
  spec.magnitudes.resize(spec.frame_count * spec.bin_count);
  spec.bin_freqs.resize(spec.bin_count);
  for (std::size_t k = 0; k < spec.bin_count; ++k)
    spec.bin_freqs[k] = static_cast<double>(k) * frames.sample_rate /
                        static_cast<double>(frames.frame_length);

  const bool pow2 = detail::is_power_of_two(frames.frame_length);
  std::vector<std::complex<double>> buf(frames.frame_length);
  for (std::size_t i = 0; i < spec.frame_count; ++i) {
    const auto x = frames.frame(i);
    double* out = spec.magnitudes.data() + i * spec.bin_count;
    if (pow2) {
      for (std::size_t n = 0; n < x.size(); ++n) buf[n] = {x[n], 0.0};
      detail::fft_radix2(buf);
      for (std::size_t k = 0; k < spec.bin_count; ++k) out[k] = std::abs(buf[k]);
    } else {
      const auto full = detail::dft_direct(x);
      for (std::size_t k = 0; k < spec.bin_count; ++k) out[k] = std::abs(full[k]);
    }
  }
  return spec;
}

struct SpectralDescriptors {
  std::vector<double> centroid;   // Hz per frame
  std::vector<double> bandwidth;  // Hz per frame
  std::vector<double> rolloff;    // Hz per frame
};

// Magnitude-weighted mean frequency, its weighted spread, and the frequency
// below which rolloff_fraction of the magnitude mass lies. An all-zero frame
// reports 0 for all three.
inline SpectralDescriptors spectral_descriptors(const Spectrogram& spec,
                                                double rolloff_fraction = 0.85) {
  if (rolloff_fraction <= 0.0 || rolloff_fraction > 1.0)
    throw Error("spectral_descriptors: rolloff fraction out of (0, 1]");
  SpectralDescriptors d;
  d.centroid.resize(spec.frame_count);
  d.bandwidth.resize(spec.frame_count);
  d.rolloff.resize(spec.frame_count);
  for (std::size_t i = 0; i < spec.frame_count; ++i) {
    const auto m = spec.row(i);
    double total = 0.0, weighted = 0.0;
    for (std::size_t k = 0; k < m.size(); ++k) {
      total += m[k];
      weighted += m[k] * spec.bin_freqs[k];
    }
    if (total <= 0.0) {
      d.centroid[i] = d.bandwidth[i] = d.rolloff[i] = 0.0;
      continue;
    }
    const double centroid = weighted / total;
    double var = 0.0;
    for (std::size_t k = 0; k < m.size(); ++k) {
      const double dev = spec.bin_freqs[k] - centroid;
      var += m[k] * dev * dev;
    }
    d.centroid[i] = centroid;
    d.bandwidth[i] = std::sqrt(var / total);
    const double target = rolloff_fraction * total;
    double cum = 0.0;
    double roll = spec.bin_freqs[m.size() - 1];
    for (std::size_t k = 0; k < m.size(); ++k) {
      cum += m[k];
      if (cum >= target) {
        roll = spec.bin_freqs[k];
        break;
      }
    }
    d.rolloff[i] = roll;
  }
  return d;
}

namespace detail {

// Pitch class per spectrogram bin (class 0 = A, 440 Hz reference); -1 marks
// bins without a pitch class (DC and non-positive frequencies).
inline std::vector<int> chroma_classes(const Spectrogram& spec) {
  std::vector<int> pitch_class(spec.bin_count, -1);
  for (std::size_t k = 0; k < spec.bin_count; ++k) {
    const double f = spec.bin_freqs[k];
    if (f <= 0.0) continue;  // DC carries no pitch class
    const long c = std::lround(12.0 * std::log2(f / 440.0));
    pitch_class[k] = static_cast<int>(((c % 12) + 12) % 12);
  }
  return pitch_class;
}

// One frame's chroma vector: squared magnitudes folded into 12 classes and
// normalized to sum 1 (uniform 1/12 for silent frames).
inline std::array<double, 12> chroma_frame(const Spectrogram& spec, std::size_t i,
                                           const std::vector<int>& pitch_class) {
  std::array<double, 12> chroma{};
  const auto m = spec.row(i);
  for (std::size_t k = 0; k < m.size(); ++k) {
    if (pitch_class[k] >= 0) chroma[pitch_class[k]] += m[k] * m[k];
  }
  double mass = 0.0;
  for (double v : chroma) mass += v;
  for (double& v : chroma) v = mass > 0.0 ? v / mass : 1.0 / 12.0;
  return chroma;
}

}  // namespace detail

// Folds squared magnitudes into 12 pitch classes (class 0 = A, 440 Hz
// reference), normalizes each frame's chroma vector to sum 1 (uniform 1/12
// for silent frames), and reports mean and population STD over all entries.
inline std::pair<double, double> chroma_stats(const Spectrogram& spec) {
  if (spec.frame_count == 0) return {0.0, 0.0};
  const std::vector<int> pitch_class = detail::chroma_classes(spec);

  const std::size_t total = spec.frame_count * 12;
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t i = 0; i < spec.frame_count; ++i) {
    const std::array<double, 12> chroma = detail::chroma_frame(spec, i, pitch_class);
    for (double v : chroma) {
      sum += v;
      sum_sq += v * v;
    }
  }
  const double mean = sum / static_cast<double>(total);
  const double var = std::max(0.0, sum_sq / static_cast<double>(total) - mean * mean);
  return {mean, std::sqrt(var)};
}

struct TimeDescriptors {
  std::vector<double> rms;  // per frame
  std::vector<double> zcr;  // sign changes per sample interval
};

// RMS and zero-crossing rate on raw (rectangular) frames. Zero samples carry
// the previous sign; the sign before the first sample is taken as positive.
inline TimeDescriptors time_descriptors(const FrameMatrix& frames) {
  TimeDescriptors d;
  d.rms.resize(frames.frame_count);
  d.zcr.resize(frames.frame_count);
  for (std::size_t i = 0; i < frames.frame_count; ++i) {
    const auto x = frames.frame(i);
    double energy = 0.0;
    for (double v : x) energy += v * v;
    d.rms[i] = std::sqrt(energy / static_cast<double>(x.size()));

    int prev = x[0] > 0.0 ? 1 : (x[0] < 0.0 ? -1 : 1);
    std::size_t changes = 0;
    for (std::size_t n = 1; n < x.size(); ++n) {
      const int s = x[n] > 0.0 ? 1 : (x[n] < 0.0 ? -1 : prev);
      if (s != prev) ++changes;
      prev = s;
    }
    d.zcr[i] = static_cast<double>(changes) / static_cast<double>(x.size() - 1);
  }
  return d;
}

namespace detail {

inline double hz_to_mel(double f) { return 2595.0 * std::log10(1.0 + f / 700.0); }
inline double mel_to_hz(double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); }

// Triangular mel filterbank over bins 0..B-1, n_mels x bin_count, row-major.
inline std::vector<double> mel_filterbank(int n_mels, std::size_t bin_count,
                                          const std::vector<double>& bin_freqs,
                                          double f_max) {
  const double mel_lo = hz_to_mel(0.0);
  const double mel_hi = hz_to_mel(f_max);
  std::vector<double> corners(static_cast<std::size_t>(n_mels) + 2);
  for (std::size_t j = 0; j < corners.size(); ++j)
    corners[j] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(j) /
                                        static_cast<double>(n_mels + 1));

  std::vector<double> weights(static_cast<std::size_t>(n_mels) * bin_count, 0.0);
  for (int i = 0; i < n_mels; ++i) {
    const double left = corners[i], center = corners[i + 1], right = corners[i + 2];
    for (std::size_t k = 0; k < bin_count; ++k) {
      const double f = bin_freqs[k];
      double w = 0.0;
      if (f > left && f < center) {
        w = (f - left) / (center - left);
      } else if (f == center) {
        w = 1.0;
      } else if (f > center && f < right) {
        w = (right - f) / (right - center);
      }
      weights[static_cast<std::size_t>(i) * bin_count + k] = w;
    }
  }
  return weights;
}

}  // namespace detail

struct MfccMatrix {
  std::vector<double> data;  // frame_count x coeff_count, row-major
  std::size_t frame_count = 0;
  std::size_t coeff_count = 0;

  std::span<const double> row(std::size_t i) const {
    return {data.data() + i * coeff_count, coeff_count};
  }
};

// Mel-frequency cepstral coefficients: triangular filterbank on the power
// spectrum, floored log, orthonormal DCT-II, first n_mfcc coefficients kept.
inline MfccMatrix mfcc(const Spectrogram& spec, int n_mels = 40, int n_mfcc = 13,
                       double log_floor = 1e-10) {
  MfccMatrix out;
  out.frame_count = spec.frame_count;
  out.coeff_count = static_cast<std::size_t>(n_mfcc);
  out.data.resize(out.frame_count * out.coeff_count);

  const auto fb = detail::mel_filterbank(n_mels, spec.bin_count, spec.bin_freqs,
                                         spec.sample_rate / 2.0);

  // Orthonormal DCT-II basis, n_mfcc x n_mels.
  std::vector<double> dct(static_cast<std::size_t>(n_mfcc) * n_mels);
  const double J = static_cast<double>(n_mels);
  for (int k = 0; k < n_mfcc; ++k) {
    const double scale = k == 0 ? std::sqrt(1.0 / J) : std::sqrt(2.0 / J);
    for (int j = 0; j < n_mels; ++j)
      dct[static_cast<std::size_t>(k) * n_mels + j] =
          scale * std::cos(M_PI * k * (2.0 * j + 1.0) / (2.0 * J));
  }

  std::vector<double> log_energy(static_cast<std::size_t>(n_mels));
  for (std::size_t i = 0; i < spec.frame_count; ++i) {
    const auto m = spec.row(i);
    for (int f = 0; f < n_mels; ++f) {
      const double* w = fb.data() + static_cast<std::size_t>(f) * spec.bin_count;
      double e = 0.0;
      for (std::size_t k = 0; k < m.size(); ++k) e += w[k] * m[k] * m[k];
      log_energy[f] = std::log(std::max(e, log_floor));
    }
    double* row = out.data.data() + i * out.coeff_count;
    for (int k = 0; k < n_mfcc; ++k) {
      const double* basis = dct.data() + static_cast<std::size_t>(k) * n_mels;
      double acc = 0.0;
      for (int j = 0; j < n_mels; ++j) acc += basis[j] * log_energy[j];
      row[k] = acc;
    }
  }
  return out;
}

}  // namespace antispoof
