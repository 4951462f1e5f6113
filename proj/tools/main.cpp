// antispoof — command-line front end for the synthetic-speech detection
// toolkit. The pipeline is staged as files between subcommands:
//
//   synth-corpus -> extract -> select -> train -> eval / infer
//
// Every stage is deterministic given its inputs, the config, and the seed.

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "antispoof/antispoof.hpp"

namespace {

using namespace antispoof;

double accuracy_on(const GbdtModel& model, const FeatureTable& t, double threshold) {
  std::size_t correct = 0;
  for (std::size_t i = 0; i < t.row_count; ++i) {
    if (predict_label(model, t.row(i), threshold) == t.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(t.row_count);
}

std::string fmt4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

void cmd_extract(const RunConfig& cfg, const std::string& manifest_path,
                 const std::string& out_table, const std::string& report_path) {
  const Manifest manifest = load_manifest(manifest_path);
  const FeatureTable raw = build_table(manifest, cfg.features);
  const CleanResult cleaned = clean(raw);
  save_table(cleaned.table, out_table);

  const ExplorationReport report = explore(cleaned.table);
  std::ofstream out(report_path, std::ios::trunc);
  if (!out) throw IoError(report_path + ": cannot open for writing");
  out << report.to_text();

  std::cout << "rows: " << cleaned.table.row_count << "\n";
  std::cout << "dropped: " << cleaned.dropped_paths.size() << "\n";
  for (const auto& p : cleaned.dropped_paths) std::cout << "dropped_path: " << p << "\n";
}

void cmd_select(const RunConfig& cfg, const std::string& table_path,
                const std::string& out_selection) {
  const FeatureTable table = load_table(table_path);
  const bool train_only = cfg.selection_mode == "train-only";
  const FeatureTable& base =
      train_only ? split(table, cfg.test_fraction, cfg.seed).train : table;

  const SelectionResult result = rfe(base, static_cast<std::size_t>(cfg.target_k),
                                     static_cast<std::size_t>(cfg.step),
                                     preset_by_name(cfg.rfe_preset));
  save_selection(result, table.feature_names, out_selection);

  std::cout << "selected " << result.selected.size() << " features:\n";
  for (std::size_t idx : result.selected) {
    std::cout << "  " << table.feature_names[idx] << "\n";
  }
}

void cmd_train(const RunConfig& cfg, const std::string& table_path,
               const std::optional<std::string>& selection_path, const std::string& out_model) {
  FeatureTable table = load_table(table_path);
  if (selection_path) {
    const SelectionResult sel = load_selection(*selection_path);
    table = apply_selection(table, sel);
  }
  const SplitResult parts = split(table, cfg.test_fraction, cfg.seed);

  // Both boosted presets are trained for a side-by-side accuracy comparison;
  // the deep attention-based tabular model slot is intentionally absent.
  std::cout << "model         train_accuracy  test_accuracy\n";
  GbdtModel chosen;
  for (const std::string name : {"a", "b"}) {
    const GbdtModel model = train(parts.train, preset_by_name(name));
    const std::string train_acc = fmt4(accuracy_on(model, parts.train, cfg.threshold));
    const std::string test_acc = parts.test.row_count > 0
                                     ? fmt4(accuracy_on(model, parts.test, cfg.threshold))
                                     : std::string("n/a");
    char line[128];
    std::snprintf(line, sizeof(line), "preset-%-6s %-15s %-15s\n", name.c_str(),
                  train_acc.c_str(), test_acc.c_str());
    std::cout << line;
    if (name == cfg.preset) chosen = model;
  }
  std::cout << "deep-tabular  not implemented not implemented\n";

  save_model(chosen, out_model);
  std::cout << "saved: " << out_model << "\n";
}

void cmd_eval(const RunConfig& cfg, bool all_rows, const std::string& model_path,
              const std::string& table_path, const std::optional<std::string>& selection_path,
              const std::string& out_report, const std::string& out_roc) {
  const GbdtModel model = load_model(model_path);
  FeatureTable table = load_table(table_path);
  if (selection_path) {
    const SelectionResult sel = load_selection(*selection_path);
    table = apply_selection(table, sel);
  }
  if (table.column_count != model.n_features()) {
    throw DimensionMismatch("model expects " + std::to_string(model.n_features()) +
                            " features but table has " + std::to_string(table.column_count));
  }

  const FeatureTable rows = all_rows ? table : split(table, cfg.test_fraction, cfg.seed).test;
  if (rows.row_count == 0) throw EmptyInput("evaluation partition is empty");

  std::vector<double> scores(rows.row_count);
  std::vector<int> y_pred(rows.row_count);
  for (std::size_t i = 0; i < rows.row_count; ++i) {
    scores[i] = predict_proba(model, rows.row(i));
    y_pred[i] = scores[i] >= cfg.threshold ? 1 : 0;
  }

  EvalReport report = evaluate(rows.labels, y_pred);
  report.model_id = model_path;
  report.threshold = cfg.threshold;
  report.selection_mode = cfg.selection_mode;
  const RocCurve curve = roc(scores, rows.labels);

  save_report(report, out_report);
  std::ofstream text(out_report + ".txt", std::ios::trunc);
  if (!text) throw IoError(out_report + ".txt: cannot open for writing");
  text << report_to_table(report);
  save_roc(curve, out_roc);

  std::cout << report_to_table(report);
  std::cout << "AUC = " << detail::g17(curve.auc) << "\n";
}

void cmd_infer(const RunConfig& cfg, const std::string& model_path, const std::string& audio_path,
               const std::optional<std::string>& selection_path) {
  const GbdtModel model = load_model(model_path);
  const FeatureVector fv = extract_features(load_wav(audio_path), cfg.features);
  std::vector<double> x(fv.begin(), fv.end());
  if (selection_path) {
    const SelectionResult sel = load_selection(*selection_path);
    std::vector<double> reduced;
    for (std::size_t idx : sel.selected) {
      if (idx >= x.size()) throw IndexOutOfRange("selection index out of range for feature vector");
      reduced.push_back(x[idx]);
    }
    x = std::move(reduced);
  }
  const double proba = predict_proba(model, x);
  const int label = proba >= cfg.threshold ? 1 : 0;
  std::cout << "label=" << (label == 1 ? "fake" : "real") << " proba_fake=" << detail::g17(proba)
            << "\n";
}

void cmd_synth_corpus(const RunConfig& cfg, const std::string& out_dir, std::size_t n_real,
                      std::size_t n_fake, double duration) {
  const std::string manifest =
      generate_corpus(out_dir, n_real, n_fake, duration, cfg.seed, cfg.features.analysis_rate);
  std::cout << "manifest: " << manifest << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"synthetic-speech detection toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  unsigned seed_flag = 0;
  std::string preset_flag;
  double threshold_flag = 0.5;
  bool train_only = false;
  bool all_rows = false;

  auto* opt_config = app.add_option("--config", config_path, "run-config key-value file");
  auto* opt_seed = app.add_option("--seed", seed_flag, "PRNG seed for split / selection / synth");
  auto* opt_preset = app.add_option("--preset", preset_flag, "model preset to save (a or b)")
                         ->check(CLI::IsMember({"a", "b"}));
  auto* opt_threshold =
      app.add_option("--threshold", threshold_flag, "decision threshold on proba_fake");
  app.add_flag("--select-on-train-only", train_only,
               "run feature selection on the training partition only");
  app.add_flag("--all-rows", all_rows, "evaluate on the whole table instead of the test split");

  auto resolve = [&]() {
    RunConfig cfg;
    if (opt_config->count() > 0) cfg = load_run_config(config_path);
    if (opt_seed->count() > 0) cfg.seed = seed_flag;
    if (opt_preset->count() > 0) cfg.preset = preset_flag;
    if (opt_threshold->count() > 0) cfg.threshold = threshold_flag;
    if (train_only) cfg.selection_mode = "train-only";
    antispoof::validate_run_config(cfg);
    return cfg;
  };

  // extract
  auto* sub_extract = app.add_subcommand("extract", "manifest -> cleaned feature table CSV");
  std::string ex_manifest, ex_out, ex_report;
  sub_extract->add_option("manifest", ex_manifest, "manifest CSV (path,label)")->required();
  sub_extract->add_option("out_table", ex_out, "output feature table CSV")->required();
  sub_extract->add_option("--report", ex_report, "exploration report path (default <out>.explore.txt)");
  sub_extract->callback([&] {
    cmd_extract(resolve(), ex_manifest, ex_out,
                ex_report.empty() ? ex_out + ".explore.txt" : ex_report);
  });

  // select
  auto* sub_select = app.add_subcommand("select", "recursive feature elimination on a table");
  std::string se_table, se_out;
  sub_select->add_option("table", se_table, "feature table CSV")->required();
  sub_select->add_option("out_selection", se_out, "output selection file")->required();
  sub_select->callback([&] { cmd_select(resolve(), se_table, se_out); });

  // train
  auto* sub_train = app.add_subcommand("train", "split, train both presets, save the chosen one");
  std::string tr_table, tr_out, tr_selection;
  sub_train->add_option("table", tr_table, "feature table CSV")->required();
  sub_train->add_option("out_model", tr_out, "output model file")->required();
  sub_train->add_option("--selection", tr_selection, "selection file restricting features");
  sub_train->callback([&] {
    cmd_train(resolve(), tr_table,
              tr_selection.empty() ? std::nullopt : std::optional<std::string>(tr_selection),
              tr_out);
  });

  // eval
  auto* sub_eval = app.add_subcommand("eval", "evaluate a model; write report + ROC CSV");
  std::string ev_model, ev_table, ev_report, ev_roc, ev_selection;
  sub_eval->add_option("model", ev_model, "model file")->required();
  sub_eval->add_option("table", ev_table, "feature table CSV")->required();
  sub_eval->add_option("out_report", ev_report, "structured report path (text twin gets .txt)")
      ->required();
  sub_eval->add_option("out_roc", ev_roc, "ROC CSV path")->required();
  sub_eval->add_option("--selection", ev_selection, "selection file restricting features");
  sub_eval->callback([&] {
    cmd_eval(resolve(), all_rows, ev_model, ev_table,
             ev_selection.empty() ? std::nullopt : std::optional<std::string>(ev_selection),
             ev_report, ev_roc);
  });

  // infer
  auto* sub_infer = app.add_subcommand("infer", "score one WAV file");
  std::string in_model, in_audio, in_selection;
  sub_infer->add_option("model", in_model, "model file")->required();
  sub_infer->add_option("audio", in_audio, "WAV file")->required();
  sub_infer->add_option("--selection", in_selection, "selection file restricting features");
  sub_infer->callback([&] {
    cmd_infer(resolve(), in_model, in_audio,
              in_selection.empty() ? std::nullopt : std::optional<std::string>(in_selection));
  });

  // synth-corpus (fixture generator)
  auto* sub_synth = app.add_subcommand("synth-corpus", "generate the synthetic WAV fixture corpus");
  std::string sy_dir;
  std::size_t sy_real = 100, sy_fake = 100;
  double sy_duration = 2.0;
  sub_synth->add_option("out_dir", sy_dir, "output directory")->required();
  sub_synth->add_option("--n-real", sy_real, "number of real clips");
  sub_synth->add_option("--n-fake", sy_fake, "number of fake clips");
  sub_synth->add_option("--duration", sy_duration, "clip length in seconds");
  sub_synth->callback([&] { cmd_synth_corpus(resolve(), sy_dir, sy_real, sy_fake, sy_duration); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
