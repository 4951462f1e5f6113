#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "antispoof/antispoof.hpp"
#include "test_util.hpp"

using namespace antispoof;

namespace {

// Dense Toeplitz solve of R a = -r[1..p] by Gaussian elimination with
// partial pivoting; oracle for the Levinson-Durbin recursion.
std::vector<double> toeplitz_solve(const std::vector<double>& r) {
  const int p = static_cast<int>(r.size()) - 1;
  std::vector<std::vector<double>> m(p, std::vector<double>(p + 1));
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) m[i][j] = r[static_cast<std::size_t>(std::abs(i - j))];
    m[i][p] = -r[i + 1];
  }
  for (int col = 0; col < p; ++col) {
    int piv = col;
    for (int i = col + 1; i < p; ++i)
      if (std::abs(m[i][col]) > std::abs(m[piv][col])) piv = i;
    std::swap(m[col], m[piv]);
    for (int i = col + 1; i < p; ++i) {
      const double f = m[i][col] / m[col][col];
      for (int j = col; j <= p; ++j) m[i][j] -= f * m[col][j];
    }
  }
  std::vector<double> sol(p);
  for (int i = p - 1; i >= 0; --i) {
    double acc = m[i][p];
    for (int j = i + 1; j < p; ++j) acc -= m[i][j] * sol[j];
    sol[i] = acc / m[i][i];
  }
  return sol;
}

}  // namespace

TEST_CASE("levinson-durbin agrees with a dense Toeplitz solve") {
  Rng rng(41);
  for (int it = 0; it < 60; ++it) {
    const int p = 4 + static_cast<int>(rng.below(13));  // orders 4..16
    std::vector<double> x(512);
    double prev = 0.0;
    for (double& v : x) {
      prev = 0.7 * prev + rng.normal();
      v = prev;
    }
    std::vector<double> r(p + 1, 0.0);
    for (int k = 0; k <= p; ++k)
      for (std::size_t i = k; i < x.size(); ++i) r[k] += x[i] * x[i - k];

    const std::vector<double> a = levinson_durbin(r);
    REQUIRE(a.size() == static_cast<std::size_t>(p));
    const std::vector<double> expect = toeplitz_solve(r);
    for (int i = 0; i < p; ++i)
      REQUIRE(a[i] == Catch::Approx(expect[i]).margin(1e-8));
  }
}

TEST_CASE("levinson-durbin analytic cases") {
  SECTION("AR(1) autocorrelation yields the single-tap predictor") {
    const std::vector<double> r = {1.0, 0.7, 0.49};
    const std::vector<double> a = levinson_durbin(r);
    REQUIRE(a.size() == 2);
    REQUIRE(a[0] == Catch::Approx(-0.7).margin(1e-12));
    REQUIRE(a[1] == Catch::Approx(0.0).margin(1e-12));
  }

  SECTION("white autocorrelation yields the zero predictor") {
    const std::vector<double> a = levinson_durbin(std::vector<double>{2.0, 0.0, 0.0, 0.0});
    REQUIRE(a == std::vector<double>{0.0, 0.0, 0.0});
  }

  SECTION("zero-energy frame is degenerate") {
    REQUIRE(levinson_durbin(std::vector<double>{0.0, 0.0, 0.0}).empty());
    REQUIRE(levinson_durbin(std::vector<double>{-1.0, 0.0, 0.0}).empty());
  }
}

TEST_CASE("polynomial root finder recovers known roots") {
  SECTION("quadratic with imaginary pair") {
    // z^2 + 1 = 0
    const auto roots = detail::polynomial_roots(std::vector<double>{0.0, 1.0});
    REQUIRE(roots.size() == 2);
    std::vector<double> imags = {roots[0].imag(), roots[1].imag()};
    std::sort(imags.begin(), imags.end());
    REQUIRE(imags[0] == Catch::Approx(-1.0).margin(1e-9));
    REQUIRE(imags[1] == Catch::Approx(1.0).margin(1e-9));
    REQUIRE(std::abs(roots[0].real()) < 1e-9);
  }

  SECTION("cubic with one real and one complex pair") {
    // (z - 0.5)(z^2 - 0.6 z + 0.25): roots 0.5 and 0.3 +/- 0.4i.
    const auto roots = detail::polynomial_roots(std::vector<double>{-1.1, 0.55, -0.125});
    REQUIRE(roots.size() == 3);
    std::vector<std::complex<double>> sorted(roots.begin(), roots.end());
    std::sort(sorted.begin(), sorted.end(), [](auto a, auto b) {
      return a.imag() < b.imag();
    });
    REQUIRE(sorted[0].real() == Catch::Approx(0.3).margin(1e-9));
    REQUIRE(sorted[0].imag() == Catch::Approx(-0.4).margin(1e-9));
    REQUIRE(sorted[1].real() == Catch::Approx(0.5).margin(1e-9));
    REQUIRE(std::abs(sorted[1].imag()) < 1e-9);
    REQUIRE(sorted[2].real() == Catch::Approx(0.3).margin(1e-9));
    REQUIRE(sorted[2].imag() == Catch::Approx(0.4).margin(1e-9));
  }
}

TEST_CASE("formant slots recover synthetic vowel resonances") {
  const FeatureConfig cfg;
  const AudioClip vowel =
      synthesize_vowel(16000, 0.6, 120.0, {{700.0, 110.0}, {1220.0, 110.0}, {2600.0, 160.0}});
  const PitchTrack track = pitch_track(vowel, cfg);
  const std::array<double, 4> f = formants(vowel, track, cfg);
  REQUIRE(f[0] >= 650.0);
  REQUIRE(f[0] <= 750.0);
  REQUIRE(f[1] >= 1120.0);
  REQUIRE(f[1] <= 1280.0);
}

TEST_CASE("fully unvoiced clips report zero formants") {
  const FeatureConfig cfg;

  SECTION("silence") {
    const AudioClip clip = testutil::make_silence(16000, 0.5);
    const std::array<double, 4> f = formants(clip, pitch_track(clip, cfg), cfg);
    REQUIRE(f == std::array<double, 4>{0.0, 0.0, 0.0, 0.0});
  }

  SECTION("a voiced clip with an all-unvoiced track still reports zeros") {
    const AudioClip clip = testutil::make_sine(16000, 0.5, 200.0, 0.5);
    PitchTrack track = pitch_track(clip, cfg);
    std::fill(track.voiced.begin(), track.voiced.end(), false);
    const std::array<double, 4> f = formants(clip, track, cfg);
    REQUIRE(f == std::array<double, 4>{0.0, 0.0, 0.0, 0.0});
  }
}

TEST_CASE("formant frequencies stay inside the valid band") {
  const FeatureConfig cfg;
  Rng rng(77);
  const AudioClip clip = synthesize_real_voice(16000, 0.8, rng);
  const std::array<double, 4> f = formants(clip, pitch_track(clip, cfg), cfg);
  for (double v : f) {
    if (v == 0.0) continue;  // empty slot
    REQUIRE(v > 90.0);
    REQUIRE(v < 16000.0 / 2.0 - 50.0);
  }
  REQUIRE(f[0] > 0.0);  // a voiced harmonic clip fills at least the first slot
}
