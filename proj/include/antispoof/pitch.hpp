#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <tuple>
#include <utility>
#include <vector>

#include "antispoof/audio.hpp"
#include "antispoof/config.hpp"

namespace antispoof {

// Per-frame fundamental frequency estimate. f0[i] == 0 exactly when the
// frame is unvoiced; peak_amp is recorded for every frame.
struct PitchTrack {
  std::vector<double> f0;
  std::vector<bool> voiced;
  std::vector<double> peak_amp;

  std::size_t frame_count() const { return f0.size(); }
};

// Autocorrelation pitch tracker. A frame is voiced when its RMS clears the
// energy gate and the best normalized autocorrelation over the candidate lag
// range reaches the voicing threshold. The winning lag is refined by
// parabolic interpolation and clamped back into the lag range so voiced f0
// stays inside [f0_min, f0_max].
inline PitchTrack pitch_track(const AudioClip& clip, const FeatureConfig& cfg) {
  const auto frames = frame(clip, static_cast<std::size_t>(cfg.pitch_frame_length),
                            static_cast<std::size_t>(cfg.hop_length), Window::kRectangular);
  const std::size_t n = frames.frame_length;
  const int rate = frames.sample_rate;

  auto lag_min = static_cast<std::size_t>(std::ceil(rate / cfg.f0_max));
  auto lag_max = static_cast<std::size_t>(std::floor(rate / cfg.f0_min));
  lag_min = std::max<std::size_t>(lag_min, 1);
  lag_max = std::min(lag_max, n - 1);

  PitchTrack track;
  track.f0.assign(frames.frame_count, 0.0);
  track.voiced.assign(frames.frame_count, false);
  track.peak_amp.assign(frames.frame_count, 0.0);

  auto autocorr_at = [&](std::span<const double> x, std::size_t lag) {
    double acc = 0.0;
    for (std::size_t t = 0; t + lag < n; ++t) acc += x[t] * x[t + lag];
    return acc;
  };

  for (std::size_t i = 0; i < frames.frame_count; ++i) {
    const auto x = frames.frame(i);
    double energy = 0.0, peak = 0.0;
    for (double v : x) {
      energy += v * v;
      peak = std::max(peak, std::fabs(v));
    }
    track.peak_amp[i] = peak;

    const double rms = std::sqrt(energy / static_cast<double>(n));
    if (rms < cfg.energy_gate || lag_min > lag_max) continue;

    double best = 0.0;
    std::size_t best_lag = 0;
    for (std::size_t lag = lag_min; lag <= lag_max; ++lag) {
      const double r = autocorr_at(x, lag);
      if (best_lag == 0 || r > best) {
        best = r;
        best_lag = lag;
      }
    }
    if (best / energy < cfg.voicing_threshold) continue;

    // Parabolic refinement over the autocorrelation peak.
    double refined = static_cast<double>(best_lag);
    if (best_lag > 1 && best_lag + 1 < n) {
      const double r_prev = autocorr_at(x, best_lag - 1);
      const double r_next = autocorr_at(x, best_lag + 1);
      const double denom = r_prev - 2.0 * best + r_next;
      if (std::fabs(denom) > 0.0) {
        const double delta = 0.5 * (r_prev - r_next) / denom;
        if (std::fabs(delta) <= 1.0) refined += delta;
      }
    }
    refined = std::clamp(refined, static_cast<double>(lag_min), static_cast<double>(lag_max));

    track.voiced[i] = true;
    track.f0[i] = rate / refined;
  }
  return track;
}

struct PerturbationStats {
  double jitter_mean = 0.0;
  double jitter_std = 0.0;
  double shimmer_mean = 0.0;
  double shimmer_std = 0.0;
};

namespace detail {

inline std::pair<double, double> mean_and_pop_std(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 0.0};
  double sum = 0.0;
  for (double x : v) sum += x;
  const double mean = sum / static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  return {mean, std::sqrt(var / static_cast<double>(v.size()))};
}

}  // namespace detail

// Relative frame-to-frame perturbation of period (jitter) and peak amplitude
// (shimmer), pooled over maximal runs of consecutive voiced frames. Each
// run's deltas are normalized by that run's mean period / mean amplitude.
inline PerturbationStats jitter_shimmer(const PitchTrack& track) {
  std::vector<double> jitter_deltas, shimmer_deltas;

  std::size_t i = 0;
  const std::size_t n = track.frame_count();
  while (i < n) {
    if (!track.voiced[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < n && track.voiced[j]) ++j;
    const std::size_t run_len = j - i;
    if (run_len >= 2) {
      double period_sum = 0.0, amp_sum = 0.0;
      for (std::size_t k = i; k < j; ++k) {
        period_sum += 1.0 / track.f0[k];
        amp_sum += track.peak_amp[k];
      }
      const double mean_period = period_sum / static_cast<double>(run_len);
      const double mean_amp = amp_sum / static_cast<double>(run_len);
      for (std::size_t k = i; k + 1 < j; ++k) {
        const double t0 = 1.0 / track.f0[k];
        const double t1 = 1.0 / track.f0[k + 1];
        jitter_deltas.push_back(std::fabs(t1 - t0) / mean_period);
        if (mean_amp > 0.0) {
          shimmer_deltas.push_back(
              std::fabs(track.peak_amp[k + 1] - track.peak_amp[k]) / mean_amp);
        }
      }
    }
    i = j;
  }

  PerturbationStats stats;
  std::tie(stats.jitter_mean, stats.jitter_std) = detail::mean_and_pop_std(jitter_deltas);
  std::tie(stats.shimmer_mean, stats.shimmer_std) = detail::mean_and_pop_std(shimmer_deltas);
  return stats;
}

}  // namespace antispoof
