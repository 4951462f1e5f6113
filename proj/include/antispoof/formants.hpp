#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "antispoof/audio.hpp"
#include "antispoof/config.hpp"
#include "antispoof/pitch.hpp"

namespace antispoof {

// Levinson-Durbin recursion on autocorrelation lags r[0..p]. Returns the
// predictor coefficients a[1..p] of A(z) = 1 + a1 z^-1 + ... + ap z^-p.
// An empty vector signals a degenerate frame (no energy or the recursion
// lost positive prediction error).
inline std::vector<double> levinson_durbin(std::span<const double> r) {
  const std::size_t p = r.size() - 1;
  std::vector<double> a(p, 0.0), prev(p, 0.0);
  if (r[0] <= 0.0) return {};
  double err = r[0];
  for (std::size_t m = 0; m < p; ++m) {
    double acc = r[m + 1];
    for (std::size_t j = 0; j < m; ++j) acc += a[j] * r[m - j];
    const double k = -acc / err;
    prev = a;
    a[m] = k;
    for (std::size_t j = 0; j < m; ++j) a[j] = prev[j] + k * prev[m - 1 - j];
    err *= 1.0 - k * k;
    if (err <= 0.0) return {};
  }
  return a;
}

namespace detail {

// Durand-Kerner (Weierstrass) iteration for the roots of a monic polynomial
// z^p + c[0] z^(p-1) + ... + c[p-1]. Deterministic initialization; LPC
// polynomials have well-separated simple roots so convergence is quick.
inline std::vector<std::complex<double>> polynomial_roots(std::span<const double> coeffs) {
  const std::size_t p = coeffs.size();
  std::vector<std::complex<double>> roots(p);
  const std::complex<double> seed(0.4, 0.9);
  std::complex<double> power(1.0, 0.0);
  for (std::size_t i = 0; i < p; ++i) {
    power *= seed;
    roots[i] = power;
  }

  auto eval = [&](std::complex<double> z) {
    std::complex<double> acc(1.0, 0.0);
    for (double c : coeffs) acc = acc * z + c;
    return acc;
  };

  for (int iter = 0; iter < 200; ++iter) {
    double max_step = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
      std::complex<double> denom(1.0, 0.0);
      for (std::size_t j = 0; j < p; ++j) {
        if (j != i) denom *= roots[i] - roots[j];
      }
      if (std::abs(denom) == 0.0) continue;
      const std::complex<double> step = eval(roots[i]) / denom;
      roots[i] -= step;
      max_step = std::max(max_step, std::abs(step));
    }
    if (max_step < 1e-12) break;
  }
  return roots;
}

}  // namespace detail

// LPC formant estimation. Per voiced frame of the pitch framing: pre-emphasis,
// autocorrelation LPC of order 2 + rate/1000, polynomial roots; roots with
// positive imaginary part map to candidate resonances
//   frequency = angle * rate / (2*pi),  bandwidth = -(rate/pi) * ln|root|.
// Candidates inside (90 Hz, rate/2 - 50 Hz) with bandwidth under the cutoff
// are kept, sorted ascending, and the first four fill slots F1..F4. The
// utterance value per slot is the median of its frame values; slots nothing
// contributed to (and fully unvoiced clips) report 0.
inline std::array<double, 4> formants(const AudioClip& clip, const PitchTrack& track,
                                      const FeatureConfig& cfg) {
  const auto frames = frame(clip, static_cast<std::size_t>(cfg.pitch_frame_length),
                            static_cast<std::size_t>(cfg.hop_length), Window::kRectangular);
  const int rate = frames.sample_rate;
  const std::size_t order = 2 + static_cast<std::size_t>(rate) / 1000;
  const std::size_t n = frames.frame_length;
  const double f_lo = 90.0;
  const double f_hi = rate / 2.0 - 50.0;

  std::array<std::vector<double>, 4> slot_values;
  std::vector<double> pre(n), r(order + 1);
  std::vector<double> kept;

  const std::size_t usable = std::min(frames.frame_count, track.frame_count());
  for (std::size_t i = 0; i < usable; ++i) {
    if (!track.voiced[i]) continue;
    const auto x = frames.frame(i);

    pre[0] = x[0];
    for (std::size_t t = 1; t < n; ++t) pre[t] = x[t] - cfg.preemphasis * x[t - 1];

    for (std::size_t lag = 0; lag <= order; ++lag) {
      double acc = 0.0;
      for (std::size_t t = 0; t + lag < n; ++t) acc += pre[t] * pre[t + lag];
      r[lag] = acc;
    }

    const auto lpc = levinson_durbin(r);
    if (lpc.empty()) continue;

    const auto roots = detail::polynomial_roots(lpc);
    kept.clear();
    for (const auto& root : roots) {
      if (root.imag() <= 0.0) continue;
      const double mag = std::abs(root);
      if (mag <= 0.0) continue;
      const double freq = std::atan2(root.imag(), root.real()) * rate / (2.0 * M_PI);
      const double bw = -(rate / M_PI) * std::log(mag);
      if (freq > f_lo && freq < f_hi && bw < cfg.formant_bandwidth_cutoff)
        kept.push_back(freq);
    }
    std::sort(kept.begin(), kept.end());
    for (std::size_t s = 0; s < 4 && s < kept.size(); ++s)
      slot_values[s].push_back(kept[s]);
  }

  std::array<double, 4> result{0.0, 0.0, 0.0, 0.0};
  for (std::size_t s = 0; s < 4; ++s) {
    auto& v = slot_values[s];
    if (v.empty()) continue;
    std::sort(v.begin(), v.end());
    const std::size_t mid = v.size() / 2;
    result[s] = v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
  }
  return result;
}

}  // namespace antispoof
