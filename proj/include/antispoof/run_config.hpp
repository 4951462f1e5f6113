#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>

#include "antispoof/config.hpp"
#include "antispoof/errors.hpp"
#include "antispoof/gbdt.hpp"
#include "antispoof/textio.hpp"

namespace antispoof {

// Everything the pipeline stages share: feature extraction settings, split
// parameters, selection parameters, and the model preset. One plain-text
// key-value file configures all of it; command-line flags override.
struct RunConfig {
  FeatureConfig features;
  double test_fraction = 0.2;
  std::uint32_t seed = 42;
  int target_k = 24;
  int step = 1;
  std::string rfe_preset = "b";
  std::string preset = "a";
  double threshold = 0.5;
  std::string selection_mode = "paper-order";  // or "train-only"
};

inline void validate_run_config(const RunConfig& c) {
  if (!(c.test_fraction >= 0.0 && c.test_fraction < 1.0)) {
    throw SchemaMismatch("test_fraction must be in [0, 1)");
  }
  if (!(c.threshold > 0.0 && c.threshold < 1.0)) {
    throw SchemaMismatch("threshold must be in (0, 1)");
  }
  if (c.target_k < 1) throw SchemaMismatch("target_k must be >= 1");
  if (c.step < 1) throw SchemaMismatch("step must be >= 1");
  if (c.selection_mode != "paper-order" && c.selection_mode != "train-only") {
    throw SchemaMismatch("selection_mode must be paper-order or train-only");
  }
  preset_by_name(c.rfe_preset);  // throws on unknown preset names
  preset_by_name(c.preset);
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path + ": cannot open");
  const auto kv = detail::parse_kv(in);

  RunConfig c;
  apply_config_keys(kv, c.features);
  detail::kv_get(kv, "test_fraction", c.test_fraction);
  int seed_int = static_cast<int>(c.seed);
  detail::kv_get(kv, "seed", seed_int);
  c.seed = static_cast<std::uint32_t>(seed_int);
  detail::kv_get(kv, "target_k", c.target_k);
  detail::kv_get(kv, "step", c.step);
  detail::kv_get(kv, "rfe_preset", c.rfe_preset);
  detail::kv_get(kv, "preset", c.preset);
  detail::kv_get(kv, "threshold", c.threshold);
  detail::kv_get(kv, "selection_mode", c.selection_mode);
  validate_run_config(c);
  return c;
}

inline std::string run_config_to_text(const RunConfig& c) {
  std::ostringstream out;
  out << config_to_text(c.features);
  out << "test_fraction = " << detail::g17(c.test_fraction) << "\n";
  out << "seed = " << c.seed << "\n";
  out << "target_k = " << c.target_k << "\n";
  out << "step = " << c.step << "\n";
  out << "rfe_preset = " << c.rfe_preset << "\n";
  out << "preset = " << c.preset << "\n";
  out << "threshold = " << detail::g17(c.threshold) << "\n";
  out << "selection_mode = " << c.selection_mode << "\n";
  return out.str();
}

inline void save_run_config(const RunConfig& c, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError(path + ": cannot open for writing");
  out << run_config_to_text(c);
}

}  // namespace antispoof
