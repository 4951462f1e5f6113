#pragma once

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "antispoof/errors.hpp"

namespace antispoof {

// All tunables of the feature extractor. Defaults are the documented
// analysis settings; every key round-trips through the plain-text config
// format below.
struct FeatureConfig {
  int analysis_rate = 16000;        // clips are resampled here before analysis
  int frame_length = 512;           // spectral + time-descriptor frames
  int hop_length = 256;
  int pitch_frame_length = 1024;    // pitch + formant frames (rectangular)
  double f0_min = 50.0;
  double f0_max = 500.0;
  double voicing_threshold = 0.5;   // normalized autocorrelation gate
  double energy_gate = 1e-4;        // frame RMS below this is unvoiced
  double rolloff_fraction = 0.85;
  int n_mels = 40;
  int n_mfcc = 13;
  double preemphasis = 0.97;
  double formant_bandwidth_cutoff = 400.0;  // Hz, wider poles are discarded
  double log_floor = 1e-10;

  bool operator==(const FeatureConfig&) const = default;
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

// Parses "key = value" lines; '#' starts a comment, blank lines are ignored.
inline std::map<std::string, std::string> parse_kv(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw SchemaMismatch("config line without '=': " + line);
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

inline void kv_get(const std::map<std::string, std::string>& kv,
                   const std::string& key, int& out) {
  if (auto it = kv.find(key); it != kv.end()) out = std::stoi(it->second);
}

inline void kv_get(const std::map<std::string, std::string>& kv,
                   const std::string& key, double& out) {
  if (auto it = kv.find(key); it != kv.end()) out = std::stod(it->second);
}

inline void kv_get(const std::map<std::string, std::string>& kv,
                   const std::string& key, std::string& out) {
  if (auto it = kv.find(key); it != kv.end()) out = it->second;
}

}  // namespace detail

inline void apply_config_keys(const std::map<std::string, std::string>& kv,
                              FeatureConfig& c) {
  detail::kv_get(kv, "analysis_rate", c.analysis_rate);
  detail::kv_get(kv, "frame_length", c.frame_length);
  detail::kv_get(kv, "hop_length", c.hop_length);
  detail::kv_get(kv, "pitch_frame_length", c.pitch_frame_length);
  detail::kv_get(kv, "f0_min", c.f0_min);
  detail::kv_get(kv, "f0_max", c.f0_max);
  detail::kv_get(kv, "voicing_threshold", c.voicing_threshold);
  detail::kv_get(kv, "energy_gate", c.energy_gate);
  detail::kv_get(kv, "rolloff_fraction", c.rolloff_fraction);
  detail::kv_get(kv, "n_mels", c.n_mels);
  detail::kv_get(kv, "n_mfcc", c.n_mfcc);
  detail::kv_get(kv, "preemphasis", c.preemphasis);
  detail::kv_get(kv, "formant_bandwidth_cutoff", c.formant_bandwidth_cutoff);
  detail::kv_get(kv, "log_floor", c.log_floor);
}

inline std::string config_to_text(const FeatureConfig& c) {
  char buf[64];
  std::ostringstream out;
  auto num = [&buf](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  out << "analysis_rate = " << c.analysis_rate << "\n"
      << "frame_length = " << c.frame_length << "\n"
      << "hop_length = " << c.hop_length << "\n"
      << "pitch_frame_length = " << c.pitch_frame_length << "\n"
      << "f0_min = " << num(c.f0_min) << "\n"
      << "f0_max = " << num(c.f0_max) << "\n"
      << "voicing_threshold = " << num(c.voicing_threshold) << "\n"
      << "energy_gate = " << num(c.energy_gate) << "\n"
      << "rolloff_fraction = " << num(c.rolloff_fraction) << "\n"
      << "n_mels = " << c.n_mels << "\n"
      << "n_mfcc = " << c.n_mfcc << "\n"
      << "preemphasis = " << num(c.preemphasis) << "\n"
      << "formant_bandwidth_cutoff = " << num(c.formant_bandwidth_cutoff) << "\n"
      << "log_floor = " << num(c.log_floor) << "\n";
  return out.str();
}

inline void save_config(const std::string& path, const FeatureConfig& c) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError(path + ": cannot open for writing");
  out << config_to_text(c);
}

inline FeatureConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path + ": cannot open");
  FeatureConfig c;
  apply_config_keys(detail::parse_kv(in), c);
  return c;
}

}  // namespace antispoof
