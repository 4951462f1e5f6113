#pragma once

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <exception>
#include <fstream>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "antispoof/errors.hpp"
#include "antispoof/features.hpp"
#include "antispoof/rng.hpp"
#include "antispoof/textio.hpp"

namespace antispoof {

struct ManifestEntry {
  std::string path;
  int label = 0;  // 0 = real, 1 = fake
};

struct Manifest {
  std::vector<ManifestEntry> entries;
};

// Tabular dataset: one row per clip, row-major storage. column_count is 48
// for freshly extracted tables and smaller after apply_selection.
struct FeatureTable {
  std::vector<double> values;  // row_count x column_count
  std::vector<int> labels;
  std::vector<std::string> feature_names;
  std::vector<std::string> source_paths;
  std::size_t row_count = 0;
  std::size_t column_count = 0;

  std::span<const double> row(std::size_t i) const {
    return {values.data() + i * column_count, column_count};
  }
  double at(std::size_t i, std::size_t j) const { return values[i * column_count + j]; }
  double& at(std::size_t i, std::size_t j) { return values[i * column_count + j]; }
};

// Builds a table from explicit rows; fixture plumbing for tests and the
// selection module's resampled subsets.
inline FeatureTable make_table(const std::vector<std::vector<double>>& rows,
                               const std::vector<int>& labels,
                               std::vector<std::string> names = {},
                               std::vector<std::string> paths = {}) {
  FeatureTable t;
  t.row_count = rows.size();
  t.column_count = rows.empty() ? 0 : rows.front().size();
  t.values.reserve(t.row_count * t.column_count);
  for (const auto& r : rows) t.values.insert(t.values.end(), r.begin(), r.end());
  t.labels = labels;
  if (names.empty()) {
    for (std::size_t j = 0; j < t.column_count; ++j) names.push_back("x" + std::to_string(j));
  }
  t.feature_names = std::move(names);
  if (paths.empty()) {
    for (std::size_t i = 0; i < t.row_count; ++i) paths.push_back("row" + std::to_string(i));
  }
  t.source_paths = std::move(paths);
  return t;
}

// ---------------------------------------------------------------------------
// Manifest ingestion
// ---------------------------------------------------------------------------

// Reads a `path,label` CSV. Labels are case-insensitive `real` / `fake`;
// anything else raises BadLabel naming the offending data row (1-based).
// Paths may contain commas: the label is everything after the last comma.
inline Manifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileError(path + ": cannot open manifest");

  std::string line;
  if (!std::getline(in, line)) throw EmptyManifest(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "path,label") {
    throw SchemaMismatch(path + ": manifest header must be 'path,label', got '" + line + "'");
  }

  Manifest m;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++row;
    auto fields = detail::split_right(line, 1);
    if (fields.empty()) {
      throw SchemaMismatch(path + ": row " + std::to_string(row) +
                           ": expected 'path,label', got '" + line + "'");
    }
    const std::string& label_text = fields[1];
    std::string lowered;
    for (char c : label_text) {
      if (!std::isspace(static_cast<unsigned char>(c))) {
        lowered.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
      }
    }
    int label;
    if (lowered == "real") {
      label = 0;
    } else if (lowered == "fake") {
      label = 1;
    } else {
      throw BadLabel(path + ": row " + std::to_string(row) + ": bad label '" + label_text + "'");
    }
    m.entries.push_back({fields[0], label});
  }
  if (m.entries.empty()) throw EmptyManifest(path + ": no entries");
  return m;
}

// ---------------------------------------------------------------------------
// Feature-table construction
// ---------------------------------------------------------------------------

// Extracts one feature row per manifest entry. Rows are computed in parallel
// but placed by manifest index, so output order (and bytes, downstream) never
// depends on scheduling. Unreadable paths are collected up front and reported
// together; decode failures propagate with the offending path in the message.
inline FeatureTable build_table(const Manifest& manifest, const FeatureConfig& cfg) {
  std::vector<std::string> unreadable;
  for (const auto& e : manifest.entries) {
    std::ifstream probe(e.path, std::ios::binary);
    if (!probe) unreadable.push_back(e.path);
  }
  if (!unreadable.empty()) {
    throw FileError("unreadable files: " + detail::join(unreadable, ", "));
  }

  const std::size_t n = manifest.entries.size();
  FeatureTable t;
  t.row_count = n;
  t.column_count = kFeatureCount;
  t.feature_names = feature_names();
  t.values.assign(n * kFeatureCount, 0.0);
  t.labels.resize(n);
  t.source_paths.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    t.labels[i] = manifest.entries[i].label;
    t.source_paths[i] = manifest.entries[i].path;
  }

  std::vector<std::exception_ptr> failures(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        const FeatureVector fv = extract_features(load_wav(manifest.entries[i].path), cfg);
        std::copy(fv.begin(), fv.end(), t.values.begin() + i * kFeatureCount);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };

  unsigned n_threads = std::thread::hardware_concurrency();
  if (n_threads == 0) n_threads = 1;
  n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, n));
  std::vector<std::thread> pool;
  for (unsigned w = 0; w + 1 < n_threads; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  for (std::size_t i = 0; i < n; ++i) {
    if (failures[i]) std::rethrow_exception(failures[i]);
  }
  return t;
}

// ---------------------------------------------------------------------------
// Cleaning
// ---------------------------------------------------------------------------

struct CleanResult {
  FeatureTable table;
  std::vector<std::string> dropped_paths;
};

// Drops rows containing any non-finite entry. Idempotent.
inline CleanResult clean(const FeatureTable& t) {
  CleanResult out;
  out.table.column_count = t.column_count;
  out.table.feature_names = t.feature_names;
  for (std::size_t i = 0; i < t.row_count; ++i) {
    bool finite = true;
    for (double v : t.row(i)) {
      if (!std::isfinite(v)) { finite = false; break; }
    }
    if (!finite) {
      out.dropped_paths.push_back(t.source_paths[i]);
      continue;
    }
    const auto r = t.row(i);
    out.table.values.insert(out.table.values.end(), r.begin(), r.end());
    out.table.labels.push_back(t.labels[i]);
    out.table.source_paths.push_back(t.source_paths[i]);
    ++out.table.row_count;
  }
  if (out.table.row_count == 0) {
    throw AllRowsDropped("all " + std::to_string(t.row_count) + " rows contained non-finite values");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Exploration
// ---------------------------------------------------------------------------

struct FeatureSummary {
  double min = 0.0, max = 0.0, mean = 0.0, std_dev = 0.0;
};

struct ExplorationReport {
  std::size_t row_count = 0;
  std::size_t real_count = 0;
  std::size_t fake_count = 0;
  std::vector<std::pair<std::string, std::size_t>> duplicates;  // path, occurrences
  std::vector<std::string> feature_names;
  std::vector<FeatureSummary> summaries;

  std::string to_text() const {
    std::ostringstream out;
    const double total = static_cast<double>(row_count);
    out << "rows: " << row_count << "\n";
    out << "features: " << feature_names.size() << "\n";
    out << "class real: " << real_count << "\n";
    out << "class fake: " << fake_count << "\n";
    out << "balance real: " << detail::g17(total > 0 ? real_count / total : 0.0) << "\n";
    out << "balance fake: " << detail::g17(total > 0 ? fake_count / total : 0.0) << "\n";
    out << "duplicate paths: " << duplicates.size() << "\n";
    for (const auto& [p, count] : duplicates) {
      out << "duplicate: " << p << " x" << count << "\n";
    }
    for (std::size_t j = 0; j < feature_names.size(); ++j) {
      const auto& s = summaries[j];
      out << "feature " << feature_names[j] << ": min " << detail::g17(s.min) << " max "
          << detail::g17(s.max) << " mean " << detail::g17(s.mean) << " std "
          << detail::g17(s.std_dev) << "\n";
    }
    return out.str();
  }
};

// Per-feature summary statistics plus class balance and duplicate-path
// warnings. Regenerating the report on the same table is byte-identical.
inline ExplorationReport explore(const FeatureTable& t) {
  ExplorationReport r;
  r.row_count = t.row_count;
  r.feature_names = t.feature_names;
  for (int label : t.labels) (label == 1 ? r.fake_count : r.real_count)++;

  std::map<std::string, std::size_t> seen;
  std::vector<std::string> order;
  for (const auto& p : t.source_paths) {
    if (++seen[p] == 2) order.push_back(p);
  }
  for (const auto& p : order) r.duplicates.emplace_back(p, seen[p]);

  r.summaries.resize(t.column_count);
  for (std::size_t j = 0; j < t.column_count; ++j) {
    std::vector<double> col(t.row_count);
    for (std::size_t i = 0; i < t.row_count; ++i) col[i] = t.at(i, j);
    FeatureSummary s;
    if (!col.empty()) {
      s.min = *std::min_element(col.begin(), col.end());
      s.max = *std::max_element(col.begin(), col.end());
      std::tie(s.mean, s.std_dev) = detail::mean_and_pop_std(col);
    }
    r.summaries[j] = s;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Stratified split
// ---------------------------------------------------------------------------

struct SplitResult {
  FeatureTable train;
  FeatureTable test;
  std::vector<std::size_t> train_indices;  // ascending original row indices
  std::vector<std::size_t> test_indices;
  std::uint32_t seed = 0;
  double test_fraction = 0.0;
};

namespace detail {

inline FeatureTable subset_rows(const FeatureTable& t, const std::vector<std::size_t>& idx) {
  FeatureTable out;
  out.column_count = t.column_count;
  out.feature_names = t.feature_names;
  out.row_count = idx.size();
  out.values.reserve(idx.size() * t.column_count);
  for (std::size_t i : idx) {
    const auto r = t.row(i);
    out.values.insert(out.values.end(), r.begin(), r.end());
    out.labels.push_back(t.labels[i]);
    out.source_paths.push_back(t.source_paths[i]);
  }
  return out;
}

}  // namespace detail

// Stratified train/test split. Per class, row indices are shuffled by one
// seeded Mersenne Twister stream (class 0 first, then class 1) and the first
// round(count * test_fraction) go to test. Same seed, same table -> same
// partition on every platform; rows inside each partition keep ascending
// original order.
inline SplitResult split(const FeatureTable& t, double test_fraction, std::uint32_t seed) {
  if (!(test_fraction >= 0.0 && test_fraction < 1.0)) {
    throw DegenerateSplit("test_fraction must be in [0, 1), got " + detail::g17(test_fraction));
  }

  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < t.row_count; ++i) by_class[t.labels[i] == 1 ? 1 : 0].push_back(i);

  SplitResult out;
  out.seed = seed;
  out.test_fraction = test_fraction;

  Rng rng(seed);
  for (int c = 0; c < 2; ++c) {
    auto idx = by_class[c];
    rng.shuffle(idx);
    const auto n_test = static_cast<std::size_t>(
        std::lround(static_cast<double>(idx.size()) * test_fraction));
    if (!idx.empty() && n_test >= idx.size()) {
      throw DegenerateSplit("class " + std::string(c == 1 ? "fake" : "real") +
                            " would have an empty train partition");
    }
    out.test_indices.insert(out.test_indices.end(), idx.begin(), idx.begin() + n_test);
    out.train_indices.insert(out.train_indices.end(), idx.begin() + n_test, idx.end());
  }
  std::sort(out.train_indices.begin(), out.train_indices.end());
  std::sort(out.test_indices.begin(), out.test_indices.end());
  out.train = detail::subset_rows(t, out.train_indices);
  out.test = detail::subset_rows(t, out.test_indices);
  return out;
}

// ---------------------------------------------------------------------------
// Persistence
// ---------------------------------------------------------------------------

inline void save_table(const FeatureTable& t, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError(path + ": cannot open for writing");
  out << "path,label," << detail::join(t.feature_names, ",") << "\n";
  for (std::size_t i = 0; i < t.row_count; ++i) {
    out << t.source_paths[i] << "," << t.labels[i];
    for (double v : t.row(i)) out << "," << detail::g17(v);
    out << "\n";
  }
  if (!out) throw IoError(path + ": write failed");
}

// Loads a feature-table CSV. The header must carry the canonical 48 feature
// names; values round-trip exactly thanks to the 17-digit serialization.
inline FeatureTable load_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path + ": cannot open");

  std::string line;
  if (!std::getline(in, line)) throw SchemaMismatch(path + ": missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::string expected = "path,label," + detail::join(feature_names(), ",");
  if (line != expected) throw SchemaMismatch(path + ": header does not match canonical feature names");

  FeatureTable t;
  t.column_count = kFeatureCount;
  t.feature_names = feature_names();
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++row;
    const auto fields = detail::split_right(line, kFeatureCount + 1);
    if (fields.empty()) {
      throw SchemaMismatch(path + ": row " + std::to_string(row) + ": wrong field count");
    }
    const std::string& label_text = fields[1];
    if (label_text != "0" && label_text != "1") {
      throw SchemaMismatch(path + ": row " + std::to_string(row) + ": label must be 0 or 1, got '" +
                           label_text + "'");
    }
    t.source_paths.push_back(fields[0]);
    t.labels.push_back(label_text == "1" ? 1 : 0);
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
      const std::string& s = fields[2 + j];
      std::size_t consumed = 0;
      double v = 0.0;
      try {
        v = std::stod(s, &consumed);
      } catch (const std::exception&) {
        throw SchemaMismatch(path + ": row " + std::to_string(row) + ": bad number '" + s + "'");
      }
      if (consumed != s.size()) {
        throw SchemaMismatch(path + ": row " + std::to_string(row) + ": bad number '" + s + "'");
      }
      t.values.push_back(v);
    }
    ++t.row_count;
  }
  return t;
}

}  // namespace antispoof
