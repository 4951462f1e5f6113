#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "antispoof/antispoof.hpp"
#include "test_util.hpp"

using namespace antispoof;

namespace {

PitchTrack make_track(const std::vector<double>& f0, const std::vector<bool>& voiced,
                      const std::vector<double>& peak_amp) {
  PitchTrack t;
  t.f0 = f0;
  t.voiced = voiced;
  t.peak_amp = peak_amp;
  return t;
}

}  // namespace

TEST_CASE("pitch tracker locks onto a steady tone") {
  const FeatureConfig cfg;
  const AudioClip clip = testutil::make_sine(16000, 1.0, 220.0, 0.5);
  const PitchTrack track = pitch_track(clip, cfg);
  REQUIRE(track.frame_count() > 0);

  std::size_t voiced = 0;
  for (std::size_t i = 0; i < track.frame_count(); ++i) {
    if (!track.voiced[i]) continue;
    ++voiced;
    REQUIRE(track.f0[i] == Catch::Approx(220.0).epsilon(0.03));
    REQUIRE(track.f0[i] >= cfg.f0_min);
    REQUIRE(track.f0[i] <= cfg.f0_max);
    REQUIRE(track.peak_amp[i] == Catch::Approx(0.5).epsilon(0.05));
  }
  REQUIRE(voiced == track.frame_count());
}

TEST_CASE("pitch tracker follows tones across the search range") {
  const FeatureConfig cfg;
  for (double f0 : {60.0, 95.0, 147.0, 210.0, 333.0, 480.0}) {
    const AudioClip clip = testutil::make_sine(16000, 0.8, f0, 0.6);
    const PitchTrack track = pitch_track(clip, cfg);
    double sum = 0.0;
    std::size_t voiced = 0;
    for (std::size_t i = 0; i < track.frame_count(); ++i) {
      if (!track.voiced[i]) continue;
      sum += track.f0[i];
      ++voiced;
    }
    REQUIRE(voiced > 0);
    REQUIRE(sum / static_cast<double>(voiced) == Catch::Approx(f0).epsilon(0.03));
  }
}

TEST_CASE("silence and noise are unvoiced") {
  const FeatureConfig cfg;

  SECTION("silence fails the energy gate") {
    const PitchTrack track = pitch_track(testutil::make_silence(16000, 0.5), cfg);
    REQUIRE(track.frame_count() > 0);
    for (std::size_t i = 0; i < track.frame_count(); ++i) {
      REQUIRE_FALSE(track.voiced[i]);
      REQUIRE(track.f0[i] == 0.0);
    }
  }

  SECTION("white noise fails the periodicity gate almost everywhere") {
    Rng rng(17);
    AudioClip clip;
    clip.sample_rate = 16000;
    clip.samples.resize(16000);
    for (double& s : clip.samples) s = rng.uniform(-0.5, 0.5);
    const PitchTrack track = pitch_track(clip, cfg);
    std::size_t unvoiced = 0;
    for (std::size_t i = 0; i < track.frame_count(); ++i)
      if (!track.voiced[i]) ++unvoiced;
    REQUIRE(static_cast<double>(unvoiced) >=
            0.9 * static_cast<double>(track.frame_count()));
  }
}

TEST_CASE("jitter and shimmer on hand-built tracks") {
  SECTION("constant track has zero perturbation") {
    const PitchTrack t = make_track({200.0, 200.0, 200.0, 200.0},
                                    {true, true, true, true}, {0.5, 0.5, 0.5, 0.5});
    const PerturbationStats s = jitter_shimmer(t);
    REQUIRE(s.jitter_mean == 0.0);
    REQUIRE(s.jitter_std == 0.0);
    REQUIRE(s.shimmer_mean == 0.0);
    REQUIRE(s.shimmer_std == 0.0);
  }

  SECTION("alternating 4.9 / 5.1 ms periods give 4% jitter") {
    // Mean period is 5 ms, every step is 0.2 ms, so each delta is 0.04.
    std::vector<double> f0;
    for (int i = 0; i < 10; ++i) f0.push_back(i % 2 == 0 ? 1.0 / 0.0049 : 1.0 / 0.0051);
    const PitchTrack t = make_track(f0, std::vector<bool>(10, true),
                                    std::vector<double>(10, 1.0));
    const PerturbationStats s = jitter_shimmer(t);
    REQUIRE(s.jitter_mean == Catch::Approx(0.04).margin(1e-12));
    REQUIRE(s.jitter_std == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(s.shimmer_mean == 0.0);
  }

  SECTION("alternating 0.8 / 1.0 amplitudes give shimmer 0.2 / 0.9") {
    std::vector<double> amp;
    for (int i = 0; i < 10; ++i) amp.push_back(i % 2 == 0 ? 0.8 : 1.0);
    const PitchTrack t = make_track(std::vector<double>(10, 150.0),
                                    std::vector<bool>(10, true), amp);
    const PerturbationStats s = jitter_shimmer(t);
    REQUIRE(s.shimmer_mean == Catch::Approx(0.2 / 0.9).margin(1e-12));
    REQUIRE(s.shimmer_std == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(s.jitter_mean == 0.0);
  }

  SECTION("deltas never straddle an unvoiced gap") {
    // Two voiced runs with different amplitudes. Pooled per-run deltas are
    // all zero; a delta across the gap would not be.
    const PitchTrack t = make_track({200.0, 200.0, 0.0, 100.0, 100.0},
                                    {true, true, false, true, true},
                                    {1.0, 1.0, 0.0, 2.0, 2.0});
    const PerturbationStats s = jitter_shimmer(t);
    REQUIRE(s.jitter_mean == 0.0);
    REQUIRE(s.shimmer_mean == 0.0);
  }

  SECTION("runs shorter than two frames contribute nothing") {
    const PitchTrack t = make_track({200.0, 0.0, 150.0, 0.0, 100.0},
                                    {true, false, true, false, true},
                                    {1.0, 0.0, 1.0, 0.0, 1.0});
    const PerturbationStats s = jitter_shimmer(t);
    REQUIRE(s.jitter_mean == 0.0);
    REQUIRE(s.jitter_std == 0.0);
    REQUIRE(s.shimmer_mean == 0.0);
    REQUIRE(s.shimmer_std == 0.0);
  }

  SECTION("shimmer is invariant under global amplitude scaling") {
    Rng rng(5);
    std::vector<double> f0(20), amp(20), amp3(20);
    for (int i = 0; i < 20; ++i) {
      f0[i] = 150.0 + 10.0 * rng.uniform();
      amp[i] = 0.5 + 0.3 * rng.uniform();
      amp3[i] = 3.0 * amp[i];
    }
    const std::vector<bool> voiced(20, true);
    const PerturbationStats a = jitter_shimmer(make_track(f0, voiced, amp));
    const PerturbationStats b = jitter_shimmer(make_track(f0, voiced, amp3));
    REQUIRE(a.shimmer_mean == Catch::Approx(b.shimmer_mean).margin(1e-12));
    REQUIRE(a.shimmer_std == Catch::Approx(b.shimmer_std).margin(1e-12));
    REQUIRE(a.jitter_mean == b.jitter_mean);
  }
}

TEST_CASE("jitter and shimmer on a real tone are small") {
  const FeatureConfig cfg;
  const AudioClip clip = testutil::make_sine(16000, 1.0, 220.0, 0.5);
  const PerturbationStats s = jitter_shimmer(pitch_track(clip, cfg));
  REQUIRE(s.jitter_mean < 0.005);
  REQUIRE(s.shimmer_mean < 0.01);
}
