#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "antispoof/dataset.hpp"
#include "antispoof/errors.hpp"
#include "antispoof/textio.hpp"

namespace antispoof {

// One node of a regression tree, stored flat. feature < 0 marks a leaf.
// Internal nodes keep their split gain so feature importances can be
// recomputed from a loaded model.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf output (raw log-odds contribution)
  double gain = 0.0;   // split gain (internal nodes only)

  bool is_leaf() const { return feature < 0; }
};

using Tree = std::vector<TreeNode>;

struct GbdtParams {
  int n_trees = 400;
  int max_depth = 6;
  int min_samples_leaf = 1;
  double lambda = 1.0;  // L2 penalty on leaf values
  double gamma = 0.0;   // per-split penalty
  double learning_rate = 0.1;
};

inline GbdtParams preset_a() { return {400, 6, 1, 1.0, 0.0, 0.1}; }
inline GbdtParams preset_b() { return {200, 4, 1, 1.0, 0.0, 0.3}; }

inline GbdtParams preset_by_name(const std::string& name) {
  if (name == "a" || name == "preset-a") return preset_a();
  if (name == "b" || name == "preset-b") return preset_b();
  throw Error("unknown preset '" + name + "' (expected a or b)");
}

inline constexpr int kModelFormatVersion = 1;

struct GbdtModel {
  std::vector<Tree> trees;
  double base_score = 0.0;
  GbdtParams params;
  std::vector<std::string> feature_names;
  int format_version = kModelFormatVersion;

  std::size_t n_features() const { return feature_names.size(); }
};

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

namespace detail {

inline double tree_output(const Tree& tree, std::span<const double> x) {
  int node = 0;
  while (!tree[node].is_leaf()) {
    const TreeNode& n = tree[node];
    node = x[static_cast<std::size_t>(n.feature)] < n.threshold ? n.left : n.right;
  }
  return tree[node].value;
}

struct SplitCandidate {
  double gain = 0.0;
  int feature = -1;
  double threshold = 0.0;
  bool found = false;
};

// Exact greedy split search over one node's rows. `order` holds, per feature,
// the node's row indices sorted by that feature's value; per-candidate prefix
// sums are accumulated in that ascending order, while node totals accumulate
// over `members` (ascending original row index). Both orders are pinned so
// results are bit-for-bit reproducible and an independent oracle can match
// them exactly. First strictly-better gain wins, so ties resolve to the
// lowest feature index and lowest threshold.
class TreeBuilder {
 public:
  TreeBuilder(const FeatureTable& table, const std::vector<double>& grad,
              const std::vector<double>& hess, const GbdtParams& params)
      : t_(table), g_(grad), h_(hess), p_(params) {
    const std::size_t m = t_.row_count;
    const std::size_t d = t_.column_count;
    sorted_master_.resize(d, std::vector<std::uint32_t>(m));
    for (std::size_t f = 0; f < d; ++f) {
      auto& ord = sorted_master_[f];
      for (std::uint32_t i = 0; i < m; ++i) ord[i] = i;
      std::stable_sort(ord.begin(), ord.end(), [&](std::uint32_t a, std::uint32_t b) {
        return t_.at(a, f) < t_.at(b, f);
      });
    }
    members_.resize(m);
    goes_left_.resize(m);
    scratch_.resize(m);
  }

  // Builds one depth-limited tree and applies leaf outputs to raw scores.
  // Splitting partitions the working arrays in place, so the pristine sorted
  // orders are restored from the master copy every round.
  Tree build(std::vector<double>& raw, double learning_rate) {
    Tree tree;
    order_ = sorted_master_;
    for (std::uint32_t i = 0; i < t_.row_count; ++i) members_[i] = i;
    build_node(tree, 0, t_.row_count, 0, raw, learning_rate);
    return tree;
  }

 private:
  int build_node(Tree& tree, std::size_t lo, std::size_t hi, int depth,
                 std::vector<double>& raw, double learning_rate) {
    const int id = static_cast<int>(tree.size());
    tree.emplace_back();

    double g_sum = 0.0, h_sum = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      const std::uint32_t r = members_[i];
      g_sum += g_[r];
      h_sum += h_[r];
    }

    SplitCandidate best;
    const std::size_t count = hi - lo;
    if (depth < p_.max_depth && count >= 2 * static_cast<std::size_t>(p_.min_samples_leaf)) {
      best = find_split(lo, hi, g_sum, h_sum);
    }

    if (!best.found) {
      const double value = -g_sum / (h_sum + p_.lambda);
      tree[id].value = value;
      for (std::size_t i = lo; i < hi; ++i) raw[members_[i]] += learning_rate * value;
      return id;
    }

    // Mark membership, then stably partition the member list and every
    // per-feature order so both children keep their canonical orders.
    std::size_t n_left = 0;
    for (std::size_t i = lo; i < hi; ++i) {
      const std::uint32_t r = members_[i];
      goes_left_[r] = t_.at(r, static_cast<std::size_t>(best.feature)) < best.threshold;
      if (goes_left_[r]) ++n_left;
    }
    auto partition_stable = [&](std::vector<std::uint32_t>& arr) {
      std::size_t put_left = lo, put_right = 0;
      for (std::size_t i = lo; i < hi; ++i) {
        const std::uint32_t r = arr[i];
        if (goes_left_[r]) {
          arr[put_left++] = r;
        } else {
          scratch_[put_right++] = r;
        }
      }
      std::copy(scratch_.begin(), scratch_.begin() + static_cast<std::ptrdiff_t>(put_right),
                arr.begin() + static_cast<std::ptrdiff_t>(lo + n_left));
    };
    partition_stable(members_);
    for (auto& ord : order_) partition_stable(ord);

    tree[id].feature = best.feature;
    tree[id].threshold = best.threshold;
    tree[id].gain = best.gain;
    tree[id].left = build_node(tree, lo, lo + n_left, depth + 1, raw, learning_rate);
    tree[id].right = build_node(tree, lo + n_left, hi, depth + 1, raw, learning_rate);
    return id;
  }

  SplitCandidate find_split(std::size_t lo, std::size_t hi, double g_sum, double h_sum) const {
    SplitCandidate best;
    const double parent = g_sum * g_sum / (h_sum + p_.lambda);
    const auto msl = static_cast<std::size_t>(p_.min_samples_leaf);

    for (std::size_t f = 0; f < t_.column_count; ++f) {
      const auto& ord = order_[f];
      double gl = 0.0, hl = 0.0;
      for (std::size_t i = lo; i + 1 < hi; ++i) {
        const std::uint32_t r = ord[i];
        gl += g_[r];
        hl += h_[r];
        const double a = t_.at(r, f);
        const double b = t_.at(ord[i + 1], f);
        if (!(a < b)) continue;  // no boundary between equal values
        const std::size_t left_count = i - lo + 1;
        const std::size_t right_count = hi - i - 1;
        if (left_count < msl || right_count < msl) continue;
        double threshold = 0.5 * (a + b);
        if (!(a < threshold)) threshold = b;
        const double gr = g_sum - gl;
        const double hr = h_sum - hl;
        const double gain =
            0.5 * (gl * gl / (hl + p_.lambda) + gr * gr / (hr + p_.lambda) - parent) - p_.gamma;
        if (gain > 0.0 && (!best.found || gain > best.gain)) {
          best = {gain, static_cast<int>(f), threshold, true};
        }
      }
    }
    return best;
  }

  const FeatureTable& t_;
  const std::vector<double>& g_;
  const std::vector<double>& h_;
  const GbdtParams& p_;
  std::vector<std::vector<std::uint32_t>> sorted_master_;
  std::vector<std::vector<std::uint32_t>> order_;
  std::vector<std::uint32_t> members_;
  std::vector<char> goes_left_;
  std::vector<std::uint32_t> scratch_;
};

}  // namespace detail

// Second-order (Newton) boosting with logistic loss: g = p - y, h = p(1-p),
// leaf value -G/(H+lambda), split gain
// 0.5*[GL^2/(HL+l) + GR^2/(HR+l) - G^2/(H+l)] - gamma. Exact greedy splits at
// midpoints between consecutive distinct sorted values; fully deterministic.
inline GbdtModel train(const FeatureTable& table, const GbdtParams& params) {
  const std::size_t m = table.row_count;
  if (m < 2) throw EmptyInput("training requires at least 2 rows, got " + std::to_string(m));
  bool has0 = false, has1 = false;
  for (int y : table.labels) (y == 1 ? has1 : has0) = true;
  if (!has0 || !has1) throw SingleClass("training data contains a single class");
  for (double v : table.values) {
    if (!std::isfinite(v)) throw NonFiniteInput("training matrix contains a non-finite value");
  }

  GbdtModel model;
  model.params = params;
  model.feature_names = table.feature_names;

  double mean_y = 0.0;
  for (int y : table.labels) mean_y += y;
  mean_y /= static_cast<double>(m);
  const double p_hat = std::clamp(mean_y, 1e-6, 1.0 - 1e-6);
  model.base_score = std::log(p_hat / (1.0 - p_hat));

  std::vector<double> raw(m, model.base_score);
  std::vector<double> grad(m), hess(m);
  detail::TreeBuilder builder(table, grad, hess, params);

  for (int round = 0; round < params.n_trees; ++round) {
    for (std::size_t i = 0; i < m; ++i) {
      const double p = sigmoid(raw[i]);
      grad[i] = p - static_cast<double>(table.labels[i]);
      hess[i] = p * (1.0 - p);
    }
    model.trees.push_back(builder.build(raw, params.learning_rate));
  }
  return model;
}

// Raw additive score; n_trees_limit allows per-round inspection in tests.
inline double predict_margin(const GbdtModel& model, std::span<const double> x,
                             std::size_t n_trees_limit = std::numeric_limits<std::size_t>::max()) {
  if (x.size() != model.n_features()) {
    throw DimensionMismatch("expected " + std::to_string(model.n_features()) +
                            " features, got " + std::to_string(x.size()));
  }
  for (double v : x) {
    if (!std::isfinite(v)) throw NonFiniteInput("prediction input contains a non-finite value");
  }
  double score = model.base_score;
  const std::size_t n = std::min(n_trees_limit, model.trees.size());
  for (std::size_t t = 0; t < n; ++t) {
    score += model.params.learning_rate * detail::tree_output(model.trees[t], x);
  }
  return score;
}

inline double predict_proba(const GbdtModel& model, std::span<const double> x) {
  return sigmoid(predict_margin(model, x));
}

// Label 1 (fake) when probability meets the threshold; ties predict 1.
inline int predict_label(const GbdtModel& model, std::span<const double> x,
                         double threshold = 0.5) {
  return predict_proba(model, x) >= threshold ? 1 : 0;
}

// Total split gain accumulated per feature over all trees.
inline std::vector<double> feature_importance(const GbdtModel& model) {
  std::vector<double> imp(model.n_features(), 0.0);
  for (const Tree& tree : model.trees) {
    for (const TreeNode& n : tree) {
      if (!n.is_leaf()) imp[static_cast<std::size_t>(n.feature)] += n.gain;
    }
  }
  return imp;
}

// ---------------------------------------------------------------------------
// Persistence (line-oriented text; see README for the schema)
// ---------------------------------------------------------------------------

inline std::string model_to_text(const GbdtModel& model) {
  std::ostringstream out;
  out << "antispoof-gbdt\n";
  out << "format_version " << model.format_version << "\n";
  out << "n_trees " << model.params.n_trees << "\n";
  out << "max_depth " << model.params.max_depth << "\n";
  out << "min_samples_leaf " << model.params.min_samples_leaf << "\n";
  out << "lambda " << detail::g17(model.params.lambda) << "\n";
  out << "gamma " << detail::g17(model.params.gamma) << "\n";
  out << "learning_rate " << detail::g17(model.params.learning_rate) << "\n";
  out << "base_score " << detail::g17(model.base_score) << "\n";
  out << "n_features " << model.feature_names.size() << "\n";
  for (const auto& name : model.feature_names) out << "feature " << name << "\n";
  out << "trees " << model.trees.size() << "\n";
  for (std::size_t t = 0; t < model.trees.size(); ++t) {
    const Tree& tree = model.trees[t];
    out << "tree " << t << " nodes " << tree.size() << "\n";
    for (std::size_t i = 0; i < tree.size(); ++i) {
      const TreeNode& n = tree[i];
      if (n.is_leaf()) {
        out << "node " << i << " leaf " << detail::g17(n.value) << "\n";
      } else {
        out << "node " << i << " split " << n.feature << " " << detail::g17(n.threshold) << " "
            << n.left << " " << n.right << " " << detail::g17(n.gain) << "\n";
      }
    }
  }
  return out.str();
}

inline void save_model(const GbdtModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError(path + ": cannot open for writing");
  out << model_to_text(model);
  if (!out) throw IoError(path + ": write failed");
}

namespace detail {

inline std::string model_line(std::istream& in, const std::string& path) {
  std::string line;
  if (!std::getline(in, line)) throw CorruptModel(path + ": unexpected end of file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

// Reads a `<key> <value...>` line, enforcing the key.
inline std::string model_field(std::istream& in, const std::string& path, const std::string& key) {
  const std::string line = model_line(in, path);
  if (line.size() < key.size() + 2 || line.compare(0, key.size(), key) != 0 ||
      line[key.size()] != ' ') {
    throw CorruptModel(path + ": expected '" + key + " ...', got '" + line + "'");
  }
  return line.substr(key.size() + 1);
}

inline long model_int(std::istream& in, const std::string& path, const std::string& key) {
  const std::string text = model_field(in, path, key);
  try {
    std::size_t used = 0;
    const long v = std::stol(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw CorruptModel(path + ": bad integer for " + key + ": '" + text + "'");
  }
}

inline double model_real(std::istream& in, const std::string& path, const std::string& key) {
  const std::string text = model_field(in, path, key);
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw CorruptModel(path + ": bad real for " + key + ": '" + text + "'");
  }
}

}  // namespace detail

inline GbdtModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path + ": cannot open");

  if (detail::model_line(in, path) != "antispoof-gbdt") {
    throw CorruptModel(path + ": missing antispoof-gbdt magic line");
  }
  const long version = detail::model_int(in, path, "format_version");
  if (version != kModelFormatVersion) {
    throw VersionMismatch(path + ": format_version " + std::to_string(version) +
                          " (supported: " + std::to_string(kModelFormatVersion) + ")");
  }

  GbdtModel model;
  model.format_version = static_cast<int>(version);
  model.params.n_trees = static_cast<int>(detail::model_int(in, path, "n_trees"));
  model.params.max_depth = static_cast<int>(detail::model_int(in, path, "max_depth"));
  model.params.min_samples_leaf = static_cast<int>(detail::model_int(in, path, "min_samples_leaf"));
  model.params.lambda = detail::model_real(in, path, "lambda");
  model.params.gamma = detail::model_real(in, path, "gamma");
  model.params.learning_rate = detail::model_real(in, path, "learning_rate");
  model.base_score = detail::model_real(in, path, "base_score");

  const long n_features = detail::model_int(in, path, "n_features");
  if (n_features < 0) throw CorruptModel(path + ": negative n_features");
  for (long f = 0; f < n_features; ++f) {
    model.feature_names.push_back(detail::model_field(in, path, "feature"));
  }

  const long n_trees = detail::model_int(in, path, "trees");
  if (n_trees < 0) throw CorruptModel(path + ": negative tree count");
  for (long t = 0; t < n_trees; ++t) {
    std::istringstream header(detail::model_line(in, path));
    std::string kw_tree, kw_nodes;
    long tree_id = -1, n_nodes = -1;
    header >> kw_tree >> tree_id >> kw_nodes >> n_nodes;
    if (!header || kw_tree != "tree" || kw_nodes != "nodes" || tree_id != t || n_nodes < 1) {
      throw CorruptModel(path + ": bad tree header for tree " + std::to_string(t));
    }
    Tree tree(static_cast<std::size_t>(n_nodes));
    for (long i = 0; i < n_nodes; ++i) {
      std::istringstream row(detail::model_line(in, path));
      std::string kw_node, kind;
      long node_id = -1;
      row >> kw_node >> node_id >> kind;
      if (!row || kw_node != "node" || node_id != i) {
        throw CorruptModel(path + ": bad node line in tree " + std::to_string(t));
      }
      TreeNode& n = tree[static_cast<std::size_t>(i)];
      if (kind == "leaf") {
        row >> n.value;
      } else if (kind == "split") {
        row >> n.feature >> n.threshold >> n.left >> n.right >> n.gain;
        if (row && (n.feature < 0 || n.feature >= n_features || n.left <= i || n.right <= i ||
                    n.left >= n_nodes || n.right >= n_nodes)) {
          throw CorruptModel(path + ": invalid node references in tree " + std::to_string(t));
        }
      } else {
        throw CorruptModel(path + ": unknown node kind '" + kind + "'");
      }
      if (!row) throw CorruptModel(path + ": malformed node line in tree " + std::to_string(t));
      std::string extra;
      if (row >> extra) throw CorruptModel(path + ": trailing tokens on node line");
    }
    model.trees.push_back(std::move(tree));
  }

  std::string trailing;
  while (std::getline(in, trailing)) {
    if (!trailing.empty() && trailing != "\r") {
      throw CorruptModel(path + ": trailing content after trees");
    }
  }
  return model;
}

}  // namespace antispoof
