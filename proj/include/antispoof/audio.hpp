#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "antispoof/errors.hpp"

namespace antispoof {

// Decoded mono signal. Samples are normalized to [-1, 1]; sample_rate is
// whatever the container declared until resample() is applied.
struct AudioClip {
  std::vector<double> samples;
  int sample_rate = 0;
  std::string source_path;

  double duration_seconds() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate
                           : 0.0;
  }
};

enum class Window { kRectangular, kHann };

// Short-time frames laid out row-major, one frame per row. A signal shorter
// than one frame yields frame_count == 0.
struct FrameMatrix {
  std::vector<double> data;
  std::size_t frame_count = 0;
  std::size_t frame_length = 0;
  std::size_t hop_length = 0;
  int sample_rate = 0;

  std::span<const double> frame(std::size_t i) const {
    return {data.data() + i * frame_length, frame_length};
  }
};

namespace detail {

inline std::uint32_t read_u32le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline std::uint16_t read_u16le(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

inline void write_u32le(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

inline void write_u16le(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

}  // namespace detail

// Decodes a RIFF/WAVE file holding PCM 16-bit or IEEE float 32-bit samples,
// 1 or 2 channels. Stereo is averaged to mono sample-by-sample; 16-bit
// samples are scaled by 1/32768; float samples are clamped to [-1, 1].
inline AudioClip load_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MalformedWav(path + ": cannot open file");
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::size_t size = bytes.size();

  if (size < 12 || std::memcmp(p, "RIFF", 4) != 0 || std::memcmp(p + 8, "WAVE", 4) != 0)
    throw MalformedWav(path + ": not a RIFF/WAVE file");

  std::uint16_t format_code = 0, channels = 0, bits_per_sample = 0;
  std::uint32_t sample_rate = 0;
  bool have_fmt = false;
  const unsigned char* payload = nullptr;
  std::uint32_t payload_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= size) {
    const char* chunk_id = bytes.data() + pos;
    const std::uint32_t chunk_size = detail::read_u32le(p + pos + 4);
    pos += 8;
    if (chunk_size > size - pos) {
      throw MalformedWav(path + ": chunk '" + std::string(chunk_id, 4) +
                         "' extends past end of file");
    }
    if (std::memcmp(chunk_id, "fmt ", 4) == 0) {
      if (chunk_size < 16) throw MalformedWav(path + ": fmt chunk too short");
      format_code = detail::read_u16le(p + pos);
      channels = detail::read_u16le(p + pos + 2);
      sample_rate = detail::read_u32le(p + pos + 4);
      bits_per_sample = detail::read_u16le(p + pos + 14);
      have_fmt = true;
    } else if (std::memcmp(chunk_id, "data", 4) == 0) {
      payload = p + pos;
      payload_size = chunk_size;
      break;
    }
    pos += chunk_size + (chunk_size & 1);  // chunks are word-aligned
  }

  if (!have_fmt) throw MalformedWav(path + ": missing fmt chunk");
  if (payload == nullptr) throw MalformedWav(path + ": missing data chunk");
  if (sample_rate == 0) throw MalformedWav(path + ": zero sample rate");
  if (channels != 1 && channels != 2)
    throw UnsupportedFormat(path + ": " + std::to_string(channels) + " channels");
  if (format_code == 1) {
    if (bits_per_sample != 16)
      throw UnsupportedFormat(path + ": PCM with " + std::to_string(bits_per_sample) + " bits");
  } else if (format_code == 3) {
    if (bits_per_sample != 32)
      throw UnsupportedFormat(path + ": float with " + std::to_string(bits_per_sample) + " bits");
  } else {
    throw UnsupportedFormat(path + ": compression code " + std::to_string(format_code));
  }

  const std::size_t bytes_per_sample = bits_per_sample / 8;
  const std::size_t block = bytes_per_sample * channels;
  const std::size_t n_frames = payload_size / block;
  if (n_frames == 0) throw MalformedWav(path + ": empty data chunk");

  AudioClip clip;
  clip.sample_rate = static_cast<int>(sample_rate);
  clip.source_path = path;
  clip.samples.resize(n_frames);
  for (std::size_t i = 0; i < n_frames; ++i) {
    double acc = 0.0;
    for (std::uint16_t c = 0; c < channels; ++c) {
      const unsigned char* sp = payload + i * block + c * bytes_per_sample;
      if (format_code == 1) {
        const auto raw = static_cast<std::int16_t>(detail::read_u16le(sp));
        acc += raw / 32768.0;
      } else {
        float f;
        std::memcpy(&f, sp, 4);
        acc += std::clamp(static_cast<double>(f), -1.0, 1.0);
      }
    }
    clip.samples[i] = acc / channels;
  }
  return clip;
}

// Writes a mono PCM 16-bit WAV. Used by the fixture generator and tests.
inline void write_wav(const std::string& path, const AudioClip& clip) {
  std::string out;
  const std::uint32_t data_size = static_cast<std::uint32_t>(clip.samples.size() * 2);
  out.reserve(44 + data_size);
  out += "RIFF";
  detail::write_u32le(out, 36 + data_size);
  out += "WAVEfmt ";
  detail::write_u32le(out, 16);
  detail::write_u16le(out, 1);  // PCM
  detail::write_u16le(out, 1);  // mono
  detail::write_u32le(out, static_cast<std::uint32_t>(clip.sample_rate));
  detail::write_u32le(out, static_cast<std::uint32_t>(clip.sample_rate) * 2);
  detail::write_u16le(out, 2);
  detail::write_u16le(out, 16);
  out += "data";
  detail::write_u32le(out, data_size);
  for (double s : clip.samples) {
    const double clamped = std::clamp(s, -1.0, 1.0);
    const auto q = static_cast<std::int16_t>(std::lround(clamped * 32767.0));
    detail::write_u16le(out, static_cast<std::uint16_t>(q));
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError(path + ": cannot open for writing");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError(path + ": write failed");
}

// Linear-interpolation resampling. Output length = round(L * target / source).
// A matching target rate returns the clip unchanged.
inline AudioClip resample(const AudioClip& clip, int target_rate) {
  if (target_rate <= 0) throw Error("resample: target rate must be positive");
  if (target_rate == clip.sample_rate) return clip;

  const std::size_t in_len = clip.samples.size();
  const auto out_len = static_cast<std::size_t>(std::llround(
      static_cast<double>(in_len) * target_rate / clip.sample_rate));

  AudioClip out;
  out.sample_rate = target_rate;
  out.source_path = clip.source_path;
  out.samples.resize(out_len);
  const double step = static_cast<double>(clip.sample_rate) / target_rate;
  for (std::size_t j = 0; j < out_len; ++j) {
    const double x = j * step;
    const auto i0 = static_cast<std::size_t>(x);
    if (i0 + 1 >= in_len) {
      out.samples[j] = clip.samples[in_len - 1];
    } else {
      const double frac = x - static_cast<double>(i0);
      out.samples[j] = clip.samples[i0] * (1.0 - frac) + clip.samples[i0 + 1] * frac;
    }
  }
  return out;
}

// Slices the signal into frames of frame_length samples every hop_length
// samples and applies the window. The trailing partial frame is discarded.
inline FrameMatrix frame(const AudioClip& clip, std::size_t frame_length,
                         std::size_t hop_length, Window window) {
  if (frame_length < 2) throw Error("frame: frame_length must be >= 2");
  if (hop_length < 1) throw Error("frame: hop_length must be >= 1");

  FrameMatrix m;
  m.frame_length = frame_length;
  m.hop_length = hop_length;
  m.sample_rate = clip.sample_rate;
  const std::size_t len = clip.samples.size();
  m.frame_count = len >= frame_length ? (len - frame_length) / hop_length + 1 : 0;
  m.data.resize(m.frame_count * frame_length);

  std::vector<double> win(frame_length, 1.0);
  if (window == Window::kHann) {
    const double denom = static_cast<double>(frame_length - 1);
    for (std::size_t n = 0; n < frame_length; ++n)
      win[n] = 0.5 - 0.5 * std::cos(2.0 * M_PI * n / denom);
  }

  for (std::size_t i = 0; i < m.frame_count; ++i) {
    const double* src = clip.samples.data() + i * hop_length;
    double* dst = m.data.data() + i * frame_length;
    for (std::size_t n = 0; n < frame_length; ++n) dst[n] = src[n] * win[n];
  }
  return m;
}

}  // namespace antispoof
