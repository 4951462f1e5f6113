#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <string>
#include <vector>

#include "antispoof/antispoof.hpp"
#include "test_util.hpp"

using namespace antispoof;
using testutil::TempDir;

namespace {

const std::string kCli = ANTISPOOF_CLI_PATH;

struct CommandResult {
  int exit_code = 0;
  std::string output;
};

CommandResult run_cli(const TempDir& dir, const std::string& args) {
  CommandResult r;
  r.exit_code = testutil::run_command(kCli + " " + args, r.output, dir.file("cli_capture.txt"));
  return r;
}

}  // namespace

TEST_CASE("cli end-to-end pipeline on a small synthetic corpus") {
  TempDir dir;
  const std::string corpus = dir.file("corpus");
  const std::string table = dir.file("features.csv");
  const std::string sel = dir.file("selection.txt");
  const std::string model = dir.file("model.txt");
  const std::string report = dir.file("report.kv");
  const std::string roc_csv = dir.file("roc.csv");

  auto r = run_cli(dir, "synth-corpus " + corpus +
                            " --n-real 6 --n-fake 6 --duration 0.5 --seed 5");
  INFO(r.output);
  REQUIRE(r.exit_code == 0);
  REQUIRE_THAT(r.output, Catch::Matchers::ContainsSubstring("manifest: "));
  const std::string manifest = corpus + "/manifest.csv";
  REQUIRE(std::filesystem::exists(manifest));

  r = run_cli(dir, "extract " + manifest + " " + table);
  INFO(r.output);
  REQUIRE(r.exit_code == 0);
  REQUIRE_THAT(r.output, Catch::Matchers::ContainsSubstring("rows: 12"));
  REQUIRE_THAT(r.output, Catch::Matchers::ContainsSubstring("dropped: 0"));
  REQUIRE(std::filesystem::exists(table));
  REQUIRE(std::filesystem::exists(table + ".explore.txt"));
  REQUIRE(load_table(table).row_count == 12);

  SECTION("extract is byte-deterministic") {
    const std::string first = testutil::read_file(table);
    const std::string first_report = testutil::read_file(table + ".explore.txt");
    r = run_cli(dir, "extract " + manifest + " " + table);
    REQUIRE(r.exit_code == 0);
    REQUIRE(testutil::read_file(table) == first);
    REQUIRE(testutil::read_file(table + ".explore.txt") == first_report);
  }

  const std::string config = dir.file("run.cfg");
  testutil::write_file(config, "target_k = 8\n");
  r = run_cli(dir, "select " + table + " " + sel + " --config " + config);
  INFO(r.output);
  REQUIRE(r.exit_code == 0);
  REQUIRE_THAT(r.output, Catch::Matchers::ContainsSubstring("selected 8 features:"));
  REQUIRE(load_selection(sel).selected.size() == 8);

  r = run_cli(dir, "train " + table + " " + model + " --selection " + sel +
                       " --seed 42 --preset a");
  INFO(r.output);
  REQUIRE(r.exit_code == 0);
  REQUIRE_THAT(r.output, Catch::Matchers::ContainsSubstring("preset-a"));
  REQUIRE_THAT(r.output, Catch::Matchers::ContainsSubstring("preset-b"));
  REQUIRE_THAT(r.output,
               Catch::Matchers::ContainsSubstring("deep-tabular  not implemented"));
  REQUIRE_THAT(r.output, Catch::Matchers::ContainsSubstring("saved: " + model));
  REQUIRE(load_model(model).n_features() == 8);

  r = run_cli(dir, "eval " + model + " " + table + " " + report + " " + roc_csv +
                       " --selection " + sel + " --seed 42");
  INFO(r.output);
  REQUIRE(r.exit_code == 0);
  REQUIRE_THAT(r.output, Catch::Matchers::ContainsSubstring("precision"));
  REQUIRE_THAT(r.output, Catch::Matchers::ContainsSubstring("Weighted avg."));
  REQUIRE_THAT(r.output, Catch::Matchers::ContainsSubstring("AUC = "));
  REQUIRE(std::filesystem::exists(report));
  REQUIRE(std::filesystem::exists(report + ".txt"));
  REQUIRE(std::filesystem::exists(roc_csv));
  REQUIRE(load_report(report).selection_mode == "paper-order");
  REQUIRE_THAT(testutil::read_file(roc_csv),
               Catch::Matchers::ContainsSubstring("# auc = "));

  const std::string clip = corpus + "/real_000.wav";
  r = run_cli(dir, "infer " + model + " " + clip + " --selection " + sel);
  INFO(r.output);
  REQUIRE(r.exit_code == 0);
  REQUIRE_THAT(r.output, Catch::Matchers::Matches("label=(real|fake) proba_fake=[0-9.e+-]+\n"));

  SECTION("a tiny threshold forces the fake label") {
    r = run_cli(dir, "infer " + model + " " + clip + " --selection " + sel +
                         " --threshold 0.000001");
    REQUIRE(r.exit_code == 0);
    REQUIRE_THAT(r.output, Catch::Matchers::StartsWith("label=fake"));
  }
}

TEST_CASE("cli failure modes exit nonzero with a diagnostic") {
  TempDir dir;

  SECTION("bad label in the manifest") {
    const std::string manifest = dir.file("bad.csv");
    testutil::write_file(manifest,
                         "path,label\n" + dir.file("a.wav") + ",real\n" +
                             dir.file("b.wav") + ",genuine\n");
    const auto r = run_cli(dir, "extract " + manifest + " " + dir.file("out.csv"));
    REQUIRE(r.exit_code != 0);
    REQUIRE_THAT(r.output, Catch::Matchers::ContainsSubstring("row 2"));
  }

  SECTION("missing manifest") {
    const auto r = run_cli(dir, "extract " + dir.file("absent.csv") + " " + dir.file("out.csv"));
    REQUIRE(r.exit_code != 0);
    REQUIRE_THAT(r.output, Catch::Matchers::ContainsSubstring("error:"));
  }

  SECTION("training on a single class") {
    std::vector<std::vector<double>> rows(6, std::vector<double>(kFeatureCount, 0.0));
    for (std::size_t i = 0; i < 6; ++i) rows[i][0] = static_cast<double>(i);
    const FeatureTable t = make_table(rows, std::vector<int>(6, 1), feature_names());
    const std::string table = dir.file("oneclass.csv");
    save_table(t, table);
    const auto r = run_cli(dir, "train " + table + " " + dir.file("m.txt"));
    REQUIRE(r.exit_code != 0);
    REQUIRE_THAT(r.output, Catch::Matchers::ContainsSubstring("single class"));
  }

  SECTION("inference on a corrupt wav") {
    // Build a real model first so only the audio is at fault.
    std::vector<std::vector<double>> rows(6, std::vector<double>(kFeatureCount, 0.0));
    std::vector<int> labels = {0, 0, 0, 1, 1, 1};
    for (std::size_t i = 0; i < 6; ++i) rows[i][0] = i < 3 ? -1.0 - double(i) : 1.0 + double(i);
    const FeatureTable t = make_table(rows, labels, feature_names());
    GbdtParams p = preset_b();
    p.n_trees = 5;
    const std::string model = dir.file("m.txt");
    save_model(train(t, p), model);

    const std::string wav = dir.file("broken.wav");
    testutil::write_file(wav, "not really a wav");
    const auto r = run_cli(dir, "infer " + model + " " + wav);
    REQUIRE(r.exit_code != 0);
    REQUIRE_THAT(r.output, Catch::Matchers::ContainsSubstring("broken.wav"));
  }

  SECTION("unknown subcommand") {
    REQUIRE(run_cli(dir, "frobnicate").exit_code != 0);
  }

  SECTION("no subcommand") {
    REQUIRE(run_cli(dir, "").exit_code != 0);
  }

  SECTION("invalid preset flag") {
    REQUIRE(run_cli(dir, "train x.csv out.txt --preset z").exit_code != 0);
  }

  SECTION("out-of-range threshold") {
    const auto r = run_cli(dir, "infer m.txt a.wav --threshold 1.5");
    REQUIRE(r.exit_code != 0);
  }
}

TEST_CASE("cli synth-corpus regeneration is byte-identical") {
  TempDir dir;
  const std::string corpus = dir.file("c");
  const std::string args = "synth-corpus " + corpus + " --n-real 2 --n-fake 2 --duration 0.3 --seed 11";
  REQUIRE(run_cli(dir, args).exit_code == 0);
  const std::string wav = testutil::read_file(corpus + "/real_000.wav");
  const std::string manifest = testutil::read_file(corpus + "/manifest.csv");
  REQUIRE(run_cli(dir, args).exit_code == 0);
  REQUIRE(testutil::read_file(corpus + "/real_000.wav") == wav);
  REQUIRE(testutil::read_file(corpus + "/manifest.csv") == manifest);

  // The manifest rows point at files that exist, labeled as written.
  const Manifest m = load_manifest(corpus + "/manifest.csv");
  REQUIRE(m.entries.size() == 4);
  for (const ManifestEntry& e : m.entries) REQUIRE(std::filesystem::exists(e.path));
}
