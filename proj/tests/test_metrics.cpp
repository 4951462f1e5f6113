#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>
#include <vector>

#include "antispoof/antispoof.hpp"
#include "test_util.hpp"

using namespace antispoof;
using testutil::TempDir;

TEST_CASE("confusion matrix counts with fake as the positive class") {
  const std::vector<int> y_true = {1, 1, 0, 0, 1, 0};
  const std::vector<int> y_pred = {1, 0, 0, 1, 1, 0};
  const ConfusionMatrix c = confusion(y_true, y_pred);
  REQUIRE(c.tp == 2);
  REQUIRE(c.fn == 1);
  REQUIRE(c.fp == 1);
  REQUIRE(c.tn == 2);
  REQUIRE(c.total() == 6);

  SECTION("input validation") {
    REQUIRE_THROWS_AS(confusion({1, 0}, {1}), LengthMismatch);
    REQUIRE_THROWS_AS(confusion({}, {}), EmptyInput);
  }
}

TEST_CASE("evaluate on a hand-worked fixture") {
  // tp=2 fp=1 tn=2 fn=1: both classes score P=2/3, R=2/3, F1=2/3.
  const std::vector<int> y_true = {1, 1, 0, 0, 1, 0};
  const std::vector<int> y_pred = {1, 0, 0, 1, 1, 0};
  const EvalReport r = evaluate(y_true, y_pred);

  REQUIRE(r.fake.support == 3);
  REQUIRE(r.real.support == 3);
  REQUIRE(r.fake.precision == 2.0 / 3.0);
  REQUIRE(r.fake.recall == 2.0 / 3.0);
  REQUIRE(r.fake.f1 == Catch::Approx(2.0 / 3.0).margin(1e-15));
  REQUIRE(r.real.precision == 2.0 / 3.0);
  REQUIRE(r.real.recall == 2.0 / 3.0);
  REQUIRE(r.accuracy == 4.0 / 6.0);
  REQUIRE(r.macro_precision == Catch::Approx(2.0 / 3.0).margin(1e-15));
  REQUIRE(r.macro_f1 == Catch::Approx(2.0 / 3.0).margin(1e-15));
}

TEST_CASE("evaluate when every prediction is fake") {
  // Balanced truth, constant fake prediction: real recall collapses to 0 and
  // the 0/0 real precision is defined as 0.
  const std::vector<int> y_true = {1, 1, 0, 0};
  const std::vector<int> y_pred = {1, 1, 1, 1};
  const EvalReport r = evaluate(y_true, y_pred);
  REQUIRE(r.fake.precision == 0.5);
  REQUIRE(r.fake.recall == 1.0);
  REQUIRE(r.real.precision == 0.0);
  REQUIRE(r.real.recall == 0.0);
  REQUIRE(r.real.f1 == 0.0);
  REQUIRE(r.accuracy == 0.5);
}

TEST_CASE("evaluate on perfect predictions") {
  const std::vector<int> y = {0, 1, 0, 1, 1};
  const EvalReport r = evaluate(y, y);
  REQUIRE(r.accuracy == 1.0);
  REQUIRE(r.fake.precision == 1.0);
  REQUIRE(r.fake.recall == 1.0);
  REQUIRE(r.real.f1 == 1.0);
  REQUIRE(r.macro_f1 == 1.0);
  REQUIRE(r.weighted_f1 == 1.0);
}

TEST_CASE("weighted recall equals accuracy exactly") {
  Rng rng(33);
  for (int it = 0; it < 200; ++it) {
    const std::size_t n = 1 + rng.below(60);
    std::vector<int> y_true(n), y_pred(n);
    for (std::size_t i = 0; i < n; ++i) {
      y_true[i] = static_cast<int>(rng.below(2));
      y_pred[i] = static_cast<int>(rng.below(2));
    }
    const EvalReport r = evaluate(y_true, y_pred);
    REQUIRE(r.weighted_recall == r.accuracy);
  }
}

TEST_CASE("report text block has the expected rows") {
  const EvalReport r = evaluate({1, 1, 0, 0, 1, 0}, {1, 0, 0, 1, 1, 0});
  const std::string text = report_to_table(r);
  REQUIRE_THAT(text, Catch::Matchers::ContainsSubstring(
                         "              precision    recall  f1-score   support"));
  REQUIRE_THAT(text, Catch::Matchers::ContainsSubstring("Real"));
  REQUIRE_THAT(text, Catch::Matchers::ContainsSubstring("Fake"));
  REQUIRE_THAT(text, Catch::Matchers::ContainsSubstring("Accuracy"));
  REQUIRE_THAT(text, Catch::Matchers::ContainsSubstring("Macro avg."));
  REQUIRE_THAT(text, Catch::Matchers::ContainsSubstring("Weighted avg."));
  REQUIRE_THAT(text, Catch::Matchers::ContainsSubstring("0.6667"));

  // Rows appear in the documented order.
  REQUIRE(text.find("Real") < text.find("Fake"));
  REQUIRE(text.find("Fake") < text.find("Accuracy"));
  REQUIRE(text.find("Accuracy") < text.find("Macro avg."));
  REQUIRE(text.find("Macro avg.") < text.find("Weighted avg."));
}

TEST_CASE("reports round-trip losslessly through the key-value format") {
  TempDir dir;
  EvalReport r = evaluate({1, 1, 0, 0, 1, 0}, {1, 0, 0, 1, 1, 0});
  r.model_id = "models/run_1.txt";
  r.threshold = 0.37;
  r.selection_mode = "train-only";

  const std::string path = dir.file("report.kv");
  save_report(r, path);
  const EvalReport back = load_report(path);
  REQUIRE(back.model_id == r.model_id);
  REQUIRE(back.threshold == r.threshold);
  REQUIRE(back.selection_mode == r.selection_mode);
  REQUIRE(back.accuracy == r.accuracy);
  REQUIRE(back.fake.precision == r.fake.precision);
  REQUIRE(back.fake.support == r.fake.support);
  REQUIRE(back.real.recall == r.real.recall);
  REQUIRE(back.macro_f1 == r.macro_f1);
  REQUIRE(back.weighted_f1 == r.weighted_f1);

  SECTION("missing keys are rejected") {
    testutil::write_file(path, "model_id x\nthreshold 0.5\n");
    REQUIRE_THROWS_AS(load_report(path), SchemaMismatch);
  }
}

TEST_CASE("roc on separable scores") {
  const std::vector<double> scores = {0.9, 0.8, 0.3, 0.2};
  const std::vector<int> y = {1, 1, 0, 0};
  const RocCurve curve = roc(scores, y);
  REQUIRE(curve.auc == 1.0);
  REQUIRE(curve.thresholds.front() == std::numeric_limits<double>::infinity());
  REQUIRE(curve.points.front() == std::pair<double, double>{0.0, 0.0});
  REQUIRE(curve.points.back() == std::pair<double, double>{1.0, 1.0});
}

TEST_CASE("roc on the interleaved example") {
  // Descending thresholds 0.9, 0.6, 0.4, 0.2 trace (0,0) -> (0,.5) ->
  // (.5,.5) -> (.5,1) -> (1,1): area 0.75.
  const std::vector<double> scores = {0.9, 0.6, 0.4, 0.2};
  const std::vector<int> y = {1, 0, 1, 0};
  const RocCurve curve = roc(scores, y);
  REQUIRE(curve.auc == 0.75);
  REQUIRE(curve.thresholds.size() == 5);
  REQUIRE(curve.points[1] == std::pair<double, double>{0.0, 0.5});
  REQUIRE(curve.points[2] == std::pair<double, double>{0.5, 0.5});
}

TEST_CASE("roc handles tied scores as one threshold") {
  const std::vector<double> scores = {0.5, 0.5, 0.5, 0.5};
  const std::vector<int> y = {1, 0, 1, 0};
  const RocCurve curve = roc(scores, y);
  REQUIRE(curve.thresholds.size() == 2);  // sentinel plus the single value
  REQUIRE(curve.points.back() == std::pair<double, double>{1.0, 1.0});
  REQUIRE(curve.auc == 0.5);
  REQUIRE(auc_by_concordance(scores, y) == 0.5);
}

TEST_CASE("roc input validation") {
  REQUIRE_THROWS_AS(roc({0.5}, {1, 0}), LengthMismatch);
  REQUIRE_THROWS_AS(roc({}, {}), EmptyInput);
  REQUIRE_THROWS_AS(roc({0.1, std::nan("")}, {1, 0}), NonFiniteInput);
  REQUIRE_THROWS_AS(roc({0.1, 0.9}, {1, 1}), OneClassOnly);
  REQUIRE_THROWS_AS(auc_by_concordance({0.1, 0.9}, {0, 0}), OneClassOnly);
}

TEST_CASE("trapezoid auc agrees with pairwise concordance") {
  Rng rng(55);
  for (int it = 0; it < 100; ++it) {
    const std::size_t n = 4 + rng.below(60);
    std::vector<double> scores(n);
    std::vector<int> y(n);
    bool h0 = false, h1 = false;
    for (std::size_t i = 0; i < n; ++i) {
      // Coarse grid makes score ties frequent.
      scores[i] = 0.1 * static_cast<double>(rng.below(11));
      y[i] = static_cast<int>(rng.below(2));
      (y[i] == 1 ? h1 : h0) = true;
    }
    if (!h0) y[0] = 0;
    if (!h1) y[n - 1] = 1;
    const double a = roc(scores, y).auc;
    const double b = auc_by_concordance(scores, y);
    REQUIRE(a == Catch::Approx(b).margin(1e-12));
  }
}

TEST_CASE("negating the scores reflects the auc") {
  Rng rng(60);
  std::vector<double> scores(40);
  std::vector<int> y(40);
  for (std::size_t i = 0; i < 40; ++i) {
    scores[i] = rng.uniform();
    y[i] = static_cast<int>(rng.below(2));
  }
  y[0] = 0;
  y[1] = 1;
  std::vector<double> negated = scores;
  for (double& s : negated) s = -s;
  REQUIRE(roc(negated, y).auc == Catch::Approx(1.0 - roc(scores, y).auc).margin(1e-12));
}

TEST_CASE("roc points are monotone and anchored") {
  Rng rng(61);
  std::vector<double> scores(30);
  std::vector<int> y(30);
  for (std::size_t i = 0; i < 30; ++i) {
    scores[i] = rng.uniform();
    y[i] = static_cast<int>(rng.below(2));
  }
  y[0] = 0;
  y[1] = 1;
  const RocCurve curve = roc(scores, y);
  REQUIRE(curve.points.front() == std::pair<double, double>{0.0, 0.0});
  REQUIRE(curve.points.back() == std::pair<double, double>{1.0, 1.0});
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    REQUIRE(curve.points[i].first >= curve.points[i - 1].first);
    REQUIRE(curve.points[i].second >= curve.points[i - 1].second);
    REQUIRE(curve.thresholds[i] < curve.thresholds[i - 1]);
  }
}

TEST_CASE("roc csv format") {
  TempDir dir;
  const RocCurve curve = roc({0.9, 0.6, 0.4, 0.2}, {1, 0, 1, 0});
  const std::string csv = roc_to_csv(curve);
  REQUIRE_THAT(csv, Catch::Matchers::StartsWith("threshold,fpr,tpr\n"));
  REQUIRE_THAT(csv, Catch::Matchers::ContainsSubstring("inf,0,0\n"));
  REQUIRE_THAT(csv, Catch::Matchers::EndsWith("# auc = 0.75\n"));

  const std::string path = dir.file("roc.csv");
  save_roc(curve, path);
  REQUIRE(testutil::read_file(path) == csv);
}
