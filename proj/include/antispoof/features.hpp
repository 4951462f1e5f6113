#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "antispoof/audio.hpp"
#include "antispoof/config.hpp"
#include "antispoof/dsp.hpp"
#include "antispoof/formants.hpp"
#include "antispoof/pitch.hpp"

namespace antispoof {

inline constexpr std::size_t kFeatureCount = 48;

// Frozen layout of the clip-level feature vector.
enum FeatureIndex : std::size_t {
  kPitchMean = 0,
  kPitchStd = 1,
  kJitterMean = 2,
  kJitterStd = 3,
  kShimmerMean = 4,
  kShimmerStd = 5,
  kFormantF1 = 6,   // F2..F4 follow at 7..9
  kChromaMean = 10,
  kChromaStd = 11,
  kRmsMean = 12,
  kRmsStd = 13,
  kCentroidMean = 14,
  kCentroidStd = 15,
  kBandwidthMean = 16,
  kBandwidthStd = 17,
  kRolloffMean = 18,
  kRolloffStd = 19,
  kZcrMean = 20,
  kZcrStd = 21,
  kMfccMean0 = 22,  // 13 means at 22..34
  kMfccStd0 = 35,   // 13 STDs at 35..47
};

using FeatureVector = std::array<double, kFeatureCount>;

// Canonical column names, index-aligned with FeatureVector.
inline const std::vector<std::string>& feature_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n = {
        "pitch_mean",    "pitch_std",    "jitter_mean",   "jitter_std",
        "shimmer_mean",  "shimmer_std",  "f1",            "f2",
        "f3",            "f4",           "chroma_mean",   "chroma_std",
        "rms_mean",      "rms_std",      "centroid_mean", "centroid_std",
        "bandwidth_mean", "bandwidth_std", "rolloff_mean", "rolloff_std",
        "zcr_mean",      "zcr_std"};
    for (int k = 0; k < 13; ++k) n.push_back("mfcc_mean_" + std::to_string(k));
    for (int k = 0; k < 13; ++k) n.push_back("mfcc_std_" + std::to_string(k));
    return n;
  }();
  return names;
}

namespace detail {

// Aggregates already defined in pitch.hpp: mean_and_pop_std.

inline void store_stats(FeatureVector& out, std::size_t index,
                        const std::vector<double>& values) {
  const auto [mean, sd] = mean_and_pop_std(values);
  out[index] = mean;
  out[index + 1] = sd;
}

}  // namespace detail

// Computes the full 48-entry feature vector for one clip. The clip is
// resampled to the analysis rate first; every aggregate uses population STD
// over frames. Degenerate inputs (silence, clips shorter than a frame)
// produce zeros rather than non-finite values.
inline FeatureVector extract_features(const AudioClip& clip, const FeatureConfig& cfg) {
  const AudioClip at_rate = resample(clip, cfg.analysis_rate);

  FeatureVector out{};

  // Pitch, jitter, shimmer. Pitch statistics aggregate voiced frames only.
  const PitchTrack track = pitch_track(at_rate, cfg);
  std::vector<double> voiced_f0;
  for (std::size_t i = 0; i < track.frame_count(); ++i) {
    if (track.voiced[i]) voiced_f0.push_back(track.f0[i]);
  }
  detail::store_stats(out, kPitchMean, voiced_f0);
  const PerturbationStats perturb = jitter_shimmer(track);
  out[kJitterMean] = perturb.jitter_mean;
  out[kJitterStd] = perturb.jitter_std;
  out[kShimmerMean] = perturb.shimmer_mean;
  out[kShimmerStd] = perturb.shimmer_std;

  const auto f = formants(at_rate, track, cfg);
  for (std::size_t s = 0; s < 4; ++s) out[kFormantF1 + s] = f[s];

  // Spectral families share one hann STFT.
  const auto spectral_frames =
      frame(at_rate, static_cast<std::size_t>(cfg.frame_length),
            static_cast<std::size_t>(cfg.hop_length), Window::kHann);
  const Spectrogram spec = stft(spectral_frames);

  if (spec.frame_count > 0) {
    const auto [chroma_mean, chroma_std] = chroma_stats(spec);
    out[kChromaMean] = chroma_mean;
    out[kChromaStd] = chroma_std;

    const SpectralDescriptors sd = spectral_descriptors(spec, cfg.rolloff_fraction);
    detail::store_stats(out, kCentroidMean, sd.centroid);
    detail::store_stats(out, kBandwidthMean, sd.bandwidth);
    detail::store_stats(out, kRolloffMean, sd.rolloff);

    const MfccMatrix cc = mfcc(spec, cfg.n_mels, cfg.n_mfcc, cfg.log_floor);
    std::vector<double> coeff(cc.frame_count);
    for (std::size_t k = 0; k < cc.coeff_count && k < 13; ++k) {
      for (std::size_t i = 0; i < cc.frame_count; ++i) coeff[i] = cc.row(i)[k];
      const auto [mean, sd_k] = detail::mean_and_pop_std(coeff);
      out[kMfccMean0 + k] = mean;
      out[kMfccStd0 + k] = sd_k;
    }
  }

  // Time descriptors on raw rectangular frames of the spectral frame size.
  const auto time_frames =
      frame(at_rate, static_cast<std::size_t>(cfg.frame_length),
            static_cast<std::size_t>(cfg.hop_length), Window::kRectangular);
  const TimeDescriptors td = time_descriptors(time_frames);
  detail::store_stats(out, kRmsMean, td.rms);
  detail::store_stats(out, kZcrMean, td.zcr);

  for (double v : out) {
    if (!std::isfinite(v)) throw Error(clip.source_path + ": non-finite feature value");
  }
  return out;
}

}  // namespace antispoof
