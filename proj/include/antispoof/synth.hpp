#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include "antispoof/audio.hpp"
#include "antispoof/errors.hpp"
#include "antispoof/rng.hpp"

namespace antispoof {

// Synthetic voice fixtures. "Real" clips carry the micro-instabilities of a
// human voice — vibrato, slow pitch drift (jitter), amplitude drift
// (shimmer), breath noise, attack/release envelope — while "fake" clips are
// sterile harmonic stacks with constant parameters, mimicking over-smooth
// re-synthesized speech. Everything is driven by one seeded generator, so
// corpus generation is bit-reproducible.

namespace detail {

// Discretized Ornstein-Uhlenbeck (AR(1)) drift with stationary standard
// deviation `sigma` and time constant `tau` seconds.
class OuDrift {
 public:
  OuDrift(double sigma, double tau, int rate, Rng& rng)
      : sigma_(sigma), rho_(std::exp(-1.0 / (tau * rate))), rng_(rng) {
    value_ = sigma_ * rng_.normal();
  }

  double next() {
    value_ = rho_ * value_ + sigma_ * std::sqrt(1.0 - rho_ * rho_) * rng_.normal();
    return value_;
  }

 private:
  double sigma_;
  double rho_;
  double value_ = 0.0;
  Rng& rng_;
};

inline void normalize_peak(std::vector<double>& x, double target) {
  double peak = 0.0;
  for (double v : x) peak = std::max(peak, std::abs(v));
  if (peak > 0.0) {
    const double s = target / peak;
    for (double& v : x) v *= s;
  }
}

}  // namespace detail

// A voiced harmonic tone with human-like instability.
inline AudioClip synthesize_real_voice(int rate, double duration, Rng& rng) {
  const auto n = static_cast<std::size_t>(std::llround(duration * rate));
  const double f0 = 110.0 + 110.0 * rng.uniform();
  const double vib_rate = 4.5 + 2.0 * rng.uniform();
  const double vib_depth = 0.01 + 0.01 * rng.uniform();
  const double slope = 0.8 + 0.6 * rng.uniform();
  const double noise_amp = 0.004 + 0.008 * rng.uniform();
  const double attack = 0.03 + 0.03 * rng.uniform();
  const double release = 0.08 + 0.04 * rng.uniform();

  const int n_harm = std::max(1, std::min(30, static_cast<int>((rate / 2.0 - 200.0) / f0)));
  std::vector<double> phase0(static_cast<std::size_t>(n_harm));
  for (auto& p : phase0) p = 2.0 * std::numbers::pi * rng.uniform();

  detail::OuDrift jitter(0.01, 0.02, rate, rng);
  detail::OuDrift shimmer(0.03, 0.05, rate, rng);

  std::vector<double> x(n, 0.0);
  double theta = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / rate;
    const double vib = vib_depth * std::sin(2.0 * std::numbers::pi * vib_rate * t);
    const double inst_f0 = f0 * (1.0 + vib + jitter.next());
    theta += 2.0 * std::numbers::pi * inst_f0 / rate;

    double s = 0.0;
    for (int h = 1; h <= n_harm; ++h) {
      s += std::pow(h, -slope) * std::sin(h * theta + phase0[static_cast<std::size_t>(h - 1)]);
    }
    s *= 1.0 + shimmer.next();
    s += noise_amp * rng.normal();

    double env = 1.0;
    if (t < attack) env = 0.5 - 0.5 * std::cos(std::numbers::pi * t / attack);
    const double remaining = duration - t;
    if (remaining < release) env *= 0.5 - 0.5 * std::cos(std::numbers::pi * remaining / release);
    x[i] = s * env;
  }
  detail::normalize_peak(x, 0.6);

  AudioClip clip;
  clip.samples = std::move(x);
  clip.sample_rate = rate;
  clip.source_path = "<synthetic real>";
  return clip;
}

// A sterile harmonic stack: constant f0, amplitudes, and envelope; no noise.
inline AudioClip synthesize_fake_voice(int rate, double duration, Rng& rng) {
  const auto n = static_cast<std::size_t>(std::llround(duration * rate));
  const double f0 = 110.0 + 110.0 * rng.uniform();
  const double slope = 0.8 + 0.6 * rng.uniform();

  const int n_harm = std::max(1, std::min(30, static_cast<int>((rate / 2.0 - 200.0) / f0)));
  std::vector<double> phase0(static_cast<std::size_t>(n_harm));
  for (auto& p : phase0) p = 2.0 * std::numbers::pi * rng.uniform();

  std::vector<double> x(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double theta = 2.0 * std::numbers::pi * f0 * static_cast<double>(i) / rate;
    double s = 0.0;
    for (int h = 1; h <= n_harm; ++h) {
      s += std::pow(h, -slope) * std::sin(h * theta + phase0[static_cast<std::size_t>(h - 1)]);
    }
    x[i] = s;
  }
  detail::normalize_peak(x, 0.6);

  AudioClip clip;
  clip.samples = std::move(x);
  clip.sample_rate = rate;
  clip.source_path = "<synthetic fake>";
  return clip;
}

// Impulse train through cascaded two-pole resonators — the classic source-
// filter vowel. Used by formant-recovery tests: the resonator frequencies
// should reappear as estimated formants.
inline AudioClip synthesize_vowel(int rate, double duration, double f0,
                                  const std::vector<std::pair<double, double>>& resonators) {
  const auto n = static_cast<std::size_t>(std::llround(duration * rate));
  std::vector<double> x(n, 0.0);
  const double period = rate / f0;
  for (double mark = 0.0; mark < static_cast<double>(n); mark += period) {
    x[static_cast<std::size_t>(mark)] = 1.0;
  }

  for (const auto& [freq, bw] : resonators) {
    const double r = std::exp(-std::numbers::pi * bw / rate);
    const double c = 2.0 * r * std::cos(2.0 * std::numbers::pi * freq / rate);
    const double r2 = r * r;
    double y1 = 0.0, y2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double y = x[i] + c * y1 - r2 * y2;
      y2 = y1;
      y1 = y;
      x[i] = y;
    }
  }
  detail::normalize_peak(x, 0.5);

  AudioClip clip;
  clip.samples = std::move(x);
  clip.sample_rate = rate;
  clip.source_path = "<synthetic vowel>";
  return clip;
}

// Writes `n_real` + `n_fake` WAV clips plus a manifest.csv into `dir` and
// returns the manifest path. Clip files are named real_NNN.wav / fake_NNN.wav;
// regeneration with the same arguments is byte-identical.
inline std::string generate_corpus(const std::string& dir, std::size_t n_real, std::size_t n_fake,
                                   double duration, std::uint32_t seed, int rate = 16000) {
  std::filesystem::create_directories(dir);
  Rng rng(seed);

  std::vector<std::pair<std::string, const char*>> rows;
  char name[32];
  for (std::size_t i = 0; i < n_real; ++i) {
    std::snprintf(name, sizeof(name), "real_%03zu.wav", i);
    const std::string path = dir + "/" + name;
    AudioClip clip = synthesize_real_voice(rate, duration, rng);
    clip.source_path = path;
    write_wav(path, clip);
    rows.emplace_back(path, "real");
  }
  for (std::size_t i = 0; i < n_fake; ++i) {
    std::snprintf(name, sizeof(name), "fake_%03zu.wav", i);
    const std::string path = dir + "/" + name;
    AudioClip clip = synthesize_fake_voice(rate, duration, rng);
    clip.source_path = path;
    write_wav(path, clip);
    rows.emplace_back(path, "fake");
  }

  const std::string manifest_path = dir + "/manifest.csv";
  std::ofstream out(manifest_path, std::ios::trunc);
  if (!out) throw IoError(manifest_path + ": cannot open for writing");
  out << "path,label\n";
  for (const auto& [path, label] : rows) out << path << "," << label << "\n";
  if (!out) throw IoError(manifest_path + ": write failed");
  return manifest_path;
}

}  // namespace antispoof
