#pragma once

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "antispoof/dataset.hpp"
#include "antispoof/errors.hpp"
#include "antispoof/gbdt.hpp"
#include "antispoof/textio.hpp"

namespace antispoof {

struct RfeRound {
  int round = 0;
  std::vector<std::size_t> surviving;   // ascending original feature indices
  std::vector<double> importances;      // aligned with `surviving`
};

struct SelectionResult {
  std::vector<std::size_t> selected;    // ascending original indices, size target_k
  std::vector<std::size_t> ranking;     // permutation of 0..D-1, survivors first,
                                        // earliest-eliminated last
  std::vector<RfeRound> per_round;
  std::size_t target_k = 0;
  std::size_t n_features = 0;
};

// Restricts a table to the selected columns; labels and paths are unchanged.
inline FeatureTable apply_selection(const FeatureTable& t, const SelectionResult& result) {
  for (std::size_t idx : result.selected) {
    if (idx >= t.column_count) {
      throw IndexOutOfRange("selected feature index " + std::to_string(idx) +
                            " out of range for " + std::to_string(t.column_count) + " columns");
    }
  }
  FeatureTable out;
  out.row_count = t.row_count;
  out.column_count = result.selected.size();
  out.labels = t.labels;
  out.source_paths = t.source_paths;
  for (std::size_t idx : result.selected) out.feature_names.push_back(t.feature_names[idx]);
  out.values.reserve(out.row_count * out.column_count);
  for (std::size_t i = 0; i < t.row_count; ++i) {
    for (std::size_t idx : result.selected) out.values.push_back(t.at(i, idx));
  }
  return out;
}

namespace detail {

inline FeatureTable subset_columns(const FeatureTable& t, const std::vector<std::size_t>& cols) {
  SelectionResult r;
  r.selected = cols;
  return apply_selection(t, r);
}

}  // namespace detail

// Recursive feature elimination: repeatedly train a boosted model on the
// surviving columns, rank by total split gain, and drop the weakest
// min(step, surviving - target_k) features. Ties (including exact zeros) are
// eliminated higher-index first. Fully deterministic.
inline SelectionResult rfe(const FeatureTable& table, std::size_t target_k,
                           std::size_t step = 1, const GbdtParams& params = preset_b()) {
  const std::size_t d = table.column_count;
  if (target_k < 1 || target_k > d) {
    throw BadK("target_k " + std::to_string(target_k) + " out of range [1, " + std::to_string(d) + "]");
  }
  if (step < 1) throw BadK("step must be >= 1");

  SelectionResult result;
  result.target_k = target_k;
  result.n_features = d;

  std::vector<std::size_t> surviving(d);
  std::iota(surviving.begin(), surviving.end(), 0);
  std::vector<std::size_t> eliminated;  // in elimination order

  int round = 0;
  while (surviving.size() > target_k) {
    const FeatureTable sub = detail::subset_columns(table, surviving);
    const GbdtModel model = train(sub, params);
    const std::vector<double> imp = feature_importance(model);

    RfeRound log;
    log.round = round++;
    log.surviving = surviving;
    log.importances = imp;
    result.per_round.push_back(std::move(log));

    // Order surviving positions worst-first: ascending importance, ties by
    // higher original index.
    std::vector<std::size_t> pos(surviving.size());
    std::iota(pos.begin(), pos.end(), 0);
    std::sort(pos.begin(), pos.end(), [&](std::size_t a, std::size_t b) {
      if (imp[a] != imp[b]) return imp[a] < imp[b];
      return surviving[a] > surviving[b];
    });

    const std::size_t n_drop = std::min(step, surviving.size() - target_k);
    std::vector<char> dropped(surviving.size(), 0);
    for (std::size_t k = 0; k < n_drop; ++k) {
      dropped[pos[k]] = 1;
      eliminated.push_back(surviving[pos[k]]);
    }
    std::vector<std::size_t> next;
    for (std::size_t p = 0; p < surviving.size(); ++p) {
      if (!dropped[p]) next.push_back(surviving[p]);
    }
    surviving = std::move(next);
  }

  result.selected = surviving;  // already ascending
  result.ranking = surviving;
  result.ranking.insert(result.ranking.end(), eliminated.rbegin(), eliminated.rend());
  return result;
}

// ---------------------------------------------------------------------------
// Persistence
// ---------------------------------------------------------------------------

inline constexpr int kSelectionFormatVersion = 1;

inline std::string selection_to_text(const SelectionResult& r,
                                     const std::vector<std::string>& all_names) {
  std::ostringstream out;
  out << "antispoof-selection\n";
  out << "format_version " << kSelectionFormatVersion << "\n";
  out << "n_features " << r.n_features << "\n";
  out << "target_k " << r.target_k << "\n";
  out << "selected";
  for (std::size_t idx : r.selected) out << " " << idx;
  out << "\n";
  out << "selected_names";
  for (std::size_t idx : r.selected) out << " " << all_names[idx];
  out << "\n";
  out << "ranking";
  for (std::size_t idx : r.ranking) out << " " << idx;
  out << "\n";
  return out.str();
}

inline void save_selection(const SelectionResult& r, const std::vector<std::string>& all_names,
                           const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError(path + ": cannot open for writing");
  out << selection_to_text(r, all_names);
  if (!out) throw IoError(path + ": write failed");
}

inline SelectionResult load_selection(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path + ": cannot open");

  auto next_line = [&](const std::string& prefix) {
    std::string line;
    if (!std::getline(in, line)) throw SchemaMismatch(path + ": unexpected end of file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.compare(0, prefix.size(), prefix) != 0) {
      throw SchemaMismatch(path + ": expected '" + prefix + "...', got '" + line + "'");
    }
    return line.substr(prefix.size());
  };

  if (!next_line("antispoof-selection").empty()) {
    throw SchemaMismatch(path + ": bad magic line");
  }
  const std::string version = next_line("format_version ");
  if (version != std::to_string(kSelectionFormatVersion)) {
    throw VersionMismatch(path + ": selection format_version " + version);
  }

  SelectionResult r;
  try {
    r.n_features = std::stoul(next_line("n_features "));
    r.target_k = std::stoul(next_line("target_k "));
  } catch (const std::invalid_argument&) {
    throw SchemaMismatch(path + ": bad integer field");
  } catch (const std::out_of_range&) {
    throw SchemaMismatch(path + ": integer field out of range");
  }

  auto parse_indices = [&](const std::string& text) {
    std::vector<std::size_t> out;
    std::istringstream row(text);
    std::size_t v;
    while (row >> v) out.push_back(v);
    return out;
  };
  r.selected = parse_indices(next_line("selected"));
  next_line("selected_names");  // informational; indices are authoritative
  r.ranking = parse_indices(next_line("ranking"));

  if (r.selected.size() != r.target_k) {
    throw SchemaMismatch(path + ": selected count does not match target_k");
  }
  std::vector<char> seen(r.n_features, 0);
  for (std::size_t idx : r.ranking) {
    if (idx >= r.n_features || seen[idx]) {
      throw SchemaMismatch(path + ": ranking is not a permutation of 0.." +
                           std::to_string(r.n_features - 1));
    }
    seen[idx] = 1;
  }
  if (r.ranking.size() != r.n_features) {
    throw SchemaMismatch(path + ": ranking length does not match n_features");
  }
  for (std::size_t idx : r.selected) {
    if (idx >= r.n_features) throw SchemaMismatch(path + ": selected index out of range");
  }
  return r;
}

}  // namespace antispoof
