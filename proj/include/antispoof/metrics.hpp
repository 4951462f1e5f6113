#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "antispoof/config.hpp"
#include "antispoof/errors.hpp"
#include "antispoof/textio.hpp"

namespace antispoof {

// Counts with fake (label 1) as the positive class.
struct ConfusionMatrix {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
};

inline ConfusionMatrix confusion(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
  if (y_true.size() != y_pred.size()) {
    throw LengthMismatch("y_true has " + std::to_string(y_true.size()) + " entries, y_pred has " +
                         std::to_string(y_pred.size()));
  }
  if (y_true.empty()) throw EmptyInput("no samples to evaluate");
  ConfusionMatrix c;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const bool t = y_true[i] == 1;
    const bool p = y_pred[i] == 1;
    if (t && p) ++c.tp;
    else if (!t && p) ++c.fp;
    else if (!t && !p) ++c.tn;
    else ++c.fn;
  }
  return c;
}

struct ClassScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct EvalReport {
  ClassScores real;
  ClassScores fake;
  double accuracy = 0.0;
  double macro_precision = 0.0, macro_recall = 0.0, macro_f1 = 0.0;
  double weighted_precision = 0.0, weighted_recall = 0.0, weighted_f1 = 0.0;
  std::string model_id;
  double threshold = 0.5;
  std::string selection_mode;
};

namespace detail {

// Score ratios with an empty denominator are defined as 0 (documented
// convention), keeping every report entry finite.
inline double safe_div(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

inline double f1_of(double p, double r) { return safe_div(2.0 * p * r, p + r); }

}  // namespace detail

// Per-class precision/recall/F1 plus accuracy and macro / support-weighted
// averages. Weighted recall is computed through its algebraic reduction
// (correct / total), so the weighted-recall = accuracy identity holds exactly
// in floating point, not just approximately.
inline EvalReport evaluate(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
  const ConfusionMatrix c = confusion(y_true, y_pred);
  const auto total = static_cast<double>(c.total());

  EvalReport r;
  r.fake.support = c.tp + c.fn;
  r.real.support = c.tn + c.fp;
  r.fake.precision = detail::safe_div(static_cast<double>(c.tp), static_cast<double>(c.tp + c.fp));
  r.fake.recall = detail::safe_div(static_cast<double>(c.tp), static_cast<double>(c.tp + c.fn));
  r.fake.f1 = detail::f1_of(r.fake.precision, r.fake.recall);
  r.real.precision = detail::safe_div(static_cast<double>(c.tn), static_cast<double>(c.tn + c.fn));
  r.real.recall = detail::safe_div(static_cast<double>(c.tn), static_cast<double>(c.tn + c.fp));
  r.real.f1 = detail::f1_of(r.real.precision, r.real.recall);

  r.accuracy = static_cast<double>(c.tp + c.tn) / total;
  r.macro_precision = 0.5 * (r.real.precision + r.fake.precision);
  r.macro_recall = 0.5 * (r.real.recall + r.fake.recall);
  r.macro_f1 = 0.5 * (r.real.f1 + r.fake.f1);

  const auto sr = static_cast<double>(r.real.support);
  const auto sf = static_cast<double>(r.fake.support);
  r.weighted_precision = (sr * r.real.precision + sf * r.fake.precision) / total;
  r.weighted_recall = static_cast<double>(c.tp + c.tn) / total;
  r.weighted_f1 = (sr * r.real.f1 + sf * r.fake.f1) / total;
  return r;
}

// Aligned plain-text block: rows Real, Fake, Accuracy, Macro avg.,
// Weighted avg.
inline std::string report_to_table(const EvalReport& r) {
  const std::size_t total = r.real.support + r.fake.support;
  char line[160];
  std::ostringstream out;
  out << "              precision    recall  f1-score   support\n";
  auto row3 = [&](const char* name, double p, double rec, double f1, std::size_t support) {
    std::snprintf(line, sizeof(line), "%-13s %9.4f %9.4f %9.4f %9zu\n", name, p, rec, f1, support);
    out << line;
  };
  row3("Real", r.real.precision, r.real.recall, r.real.f1, r.real.support);
  row3("Fake", r.fake.precision, r.fake.recall, r.fake.f1, r.fake.support);
  std::snprintf(line, sizeof(line), "%-13s %9s %9s %9.4f %9zu\n", "Accuracy", "", "", r.accuracy,
                total);
  out << line;
  row3("Macro avg.", r.macro_precision, r.macro_recall, r.macro_f1, total);
  row3("Weighted avg.", r.weighted_precision, r.weighted_recall, r.weighted_f1, total);
  return out.str();
}

// Structured key-value form; round-trips losslessly via 17-digit reals.
inline std::string report_to_kv(const EvalReport& r) {
  std::ostringstream out;
  out << "model_id = " << r.model_id << "\n";
  out << "threshold = " << detail::g17(r.threshold) << "\n";
  out << "selection_mode = " << r.selection_mode << "\n";
  out << "support_real = " << r.real.support << "\n";
  out << "support_fake = " << r.fake.support << "\n";
  out << "precision_real = " << detail::g17(r.real.precision) << "\n";
  out << "recall_real = " << detail::g17(r.real.recall) << "\n";
  out << "f1_real = " << detail::g17(r.real.f1) << "\n";
  out << "precision_fake = " << detail::g17(r.fake.precision) << "\n";
  out << "recall_fake = " << detail::g17(r.fake.recall) << "\n";
  out << "f1_fake = " << detail::g17(r.fake.f1) << "\n";
  out << "accuracy = " << detail::g17(r.accuracy) << "\n";
  out << "macro_precision = " << detail::g17(r.macro_precision) << "\n";
  out << "macro_recall = " << detail::g17(r.macro_recall) << "\n";
  out << "macro_f1 = " << detail::g17(r.macro_f1) << "\n";
  out << "weighted_precision = " << detail::g17(r.weighted_precision) << "\n";
  out << "weighted_recall = " << detail::g17(r.weighted_recall) << "\n";
  out << "weighted_f1 = " << detail::g17(r.weighted_f1) << "\n";
  return out.str();
}

inline void save_report(const EvalReport& r, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError(path + ": cannot open for writing");
  out << report_to_kv(r);
  if (!out) throw IoError(path + ": write failed");
}

inline EvalReport load_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path + ": cannot open");
  const auto kv = detail::parse_kv(in);
  auto need = [&](const std::string& key) {
    const auto it = kv.find(key);
    if (it == kv.end()) throw SchemaMismatch(path + ": missing key '" + key + "'");
    return it->second;
  };
  auto real_of = [&](const std::string& key) {
    const std::string text = need(key);
    try {
      std::size_t used = 0;
      const double v = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return v;
    } catch (const std::exception&) {
      throw SchemaMismatch(path + ": bad number for '" + key + "'");
    }
  };
  auto count_of = [&](const std::string& key) {
    return static_cast<std::size_t>(std::llround(real_of(key)));
  };

  EvalReport r;
  r.model_id = need("model_id");
  r.threshold = real_of("threshold");
  r.selection_mode = need("selection_mode");
  r.real.support = count_of("support_real");
  r.fake.support = count_of("support_fake");
  r.real.precision = real_of("precision_real");
  r.real.recall = real_of("recall_real");
  r.real.f1 = real_of("f1_real");
  r.fake.precision = real_of("precision_fake");
  r.fake.recall = real_of("recall_fake");
  r.fake.f1 = real_of("f1_fake");
  r.accuracy = real_of("accuracy");
  r.macro_precision = real_of("macro_precision");
  r.macro_recall = real_of("macro_recall");
  r.macro_f1 = real_of("macro_f1");
  r.weighted_precision = real_of("weighted_precision");
  r.weighted_recall = real_of("weighted_recall");
  r.weighted_f1 = real_of("weighted_f1");
  return r;
}

// ---------------------------------------------------------------------------
// ROC / AUC
// ---------------------------------------------------------------------------

struct RocCurve {
  std::vector<double> thresholds;  // +inf sentinel first, then unique scores descending
  std::vector<std::pair<double, double>> points;  // (fpr, tpr), aligned with thresholds
  double auc = 0.0;
};

namespace detail {

inline void check_roc_inputs(const std::vector<double>& scores, const std::vector<int>& y_true) {
  if (scores.size() != y_true.size()) {
    throw LengthMismatch("scores has " + std::to_string(scores.size()) + " entries, y_true has " +
                         std::to_string(y_true.size()));
  }
  if (scores.empty()) throw EmptyInput("no samples for ROC");
  for (double s : scores) {
    if (!std::isfinite(s)) throw NonFiniteInput("ROC scores must be finite");
  }
  bool has0 = false, has1 = false;
  for (int y : y_true) (y == 1 ? has1 : has0) = true;
  if (!has0 || !has1) throw OneClassOnly("ROC requires both classes in y_true");
}

}  // namespace detail

// Threshold sweep over the unique observed scores (descending) with a +inf
// sentinel; at each threshold a sample is predicted fake iff score >= t.
// AUC by trapezoidal integration over the resulting points.
inline RocCurve roc(const std::vector<double>& scores, const std::vector<int>& y_true) {
  detail::check_roc_inputs(scores, y_true);

  std::vector<std::size_t> idx(scores.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });

  std::size_t pos = 0, neg = 0;
  for (int y : y_true) (y == 1 ? pos : neg)++;

  RocCurve curve;
  curve.thresholds.push_back(std::numeric_limits<double>::infinity());
  curve.points.emplace_back(0.0, 0.0);

  std::size_t tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < idx.size()) {
    const double t = scores[idx[i]];
    while (i < idx.size() && scores[idx[i]] == t) {
      (y_true[idx[i]] == 1 ? tp : fp)++;
      ++i;
    }
    curve.thresholds.push_back(t);
    curve.points.emplace_back(static_cast<double>(fp) / static_cast<double>(neg),
                              static_cast<double>(tp) / static_cast<double>(pos));
  }

  double auc = 0.0;
  for (std::size_t k = 1; k < curve.points.size(); ++k) {
    const auto& [x0, y0] = curve.points[k - 1];
    const auto& [x1, y1] = curve.points[k];
    auc += (x1 - x0) * (y0 + y1) * 0.5;
  }
  curve.auc = auc;
  return curve;
}

// Mann-Whitney pairwise concordance; the independent oracle for roc().auc.
inline double auc_by_concordance(const std::vector<double>& scores,
                                 const std::vector<int>& y_true) {
  detail::check_roc_inputs(scores, y_true);
  double wins = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (y_true[i] != 1) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (y_true[j] == 1) continue;
      ++pairs;
      if (scores[i] > scores[j]) wins += 1.0;
      else if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  return wins / static_cast<double>(pairs);
}

// CSV export: `threshold,fpr,tpr` rows plus a trailing `# auc = <value>`
// comment line. The +inf sentinel threshold prints as `inf`.
inline std::string roc_to_csv(const RocCurve& curve) {
  std::ostringstream out;
  out << "threshold,fpr,tpr\n";
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    out << detail::g17(curve.thresholds[i]) << "," << detail::g17(curve.points[i].first) << ","
        << detail::g17(curve.points[i].second) << "\n";
  }
  out << "# auc = " << detail::g17(curve.auc) << "\n";
  return out.str();
}

inline void save_roc(const RocCurve& curve, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError(path + ": cannot open for writing");
  out << roc_to_csv(curve);
  if (!out) throw IoError(path + ": write failed");
}

}  // namespace antispoof
