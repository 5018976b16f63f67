#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "parsebench/layout_map.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

namespace parsebench {
namespace {

using L = MatchLabel;

TEST(Iou, Examples) {
  const BoundingBox a{0, 0, 10, 10};
  EXPECT_EQ(iou(a, a), 1.0);
  EXPECT_EQ(iou(a, BoundingBox{20, 20, 5, 5}), 0.0);
  EXPECT_EQ(iou(a, BoundingBox{10, 0, 10, 10}), 0.0);  // touching edge
  EXPECT_DOUBLE_EQ(iou(a, BoundingBox{5, 0, 10, 10}), 50.0 / 150.0);
  EXPECT_DOUBLE_EQ(oracle::box_iou(a, BoundingBox{5, 0, 10, 10}), 1.0 / 3.0);
  EXPECT_EQ(iou(BoundingBox{1, 1, 0, 5}, BoundingBox{1, 1, 0, 5}), 0.0);
  EXPECT_EQ(iou(BoundingBox{0, 0, 0, 0}, a), 0.0);
}

TEST(Iou, SymmetricBoundedAndScaleInvariant) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> pos(0, 100), len(0.5, 60);
  for (int k = 0; k < 500; ++k) {
    const BoundingBox a{pos(rng), pos(rng), len(rng), len(rng)};
    const BoundingBox b{pos(rng), pos(rng), len(rng), len(rng)};
    const double v = iou(a, b);
    EXPECT_EQ(v, iou(b, a));
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
    EXPECT_NEAR(v, oracle::box_iou(a, b), 1e-12);
    const double s = 4.0;  // power of two keeps the arithmetic exact
    EXPECT_EQ(v, iou(BoundingBox{a.x * s, a.y * s, a.w * s, a.h * s},
                     BoundingBox{b.x * s, b.y * s, b.w * s, b.h * s}));
  }
}

Detection det(BoundingBox b, double score, int cat = 1, std::string image = "1") {
  return Detection{std::move(image), cat, b, score};
}

GroundTruthBox gtbox(BoundingBox b, int cat = 1, std::string image = "1", std::string id = "") {
  return GroundTruthBox{std::move(image), std::move(id), cat, b};
}

TEST(MatchDetections, Examples) {
  const BoundingBox b{0, 0, 10, 10};
  const std::vector<GroundTruthBox> gts = {gtbox(b)};
  EXPECT_EQ(match_detections(std::vector{det(b, 0.9)}, gts, 0.5), std::vector{L::TruePositive});
  EXPECT_EQ(match_detections(std::vector{det(b, 0.9), det(b, 0.8)}, gts, 0.5),
            (std::vector{L::TruePositive, L::FalsePositive}));
  // labels stay in input order even when the higher score comes second
  EXPECT_EQ(match_detections(std::vector{det(b, 0.8), det(b, 0.9)}, gts, 0.5),
            (std::vector{L::FalsePositive, L::TruePositive}));
  // equal scores: input order decides
  EXPECT_EQ(match_detections(std::vector{det(b, 0.5), det(b, 0.5)}, gts, 0.5),
            (std::vector{L::TruePositive, L::FalsePositive}));
  // below threshold
  EXPECT_EQ(match_detections(std::vector{det(BoundingBox{5, 0, 10, 10}, 0.9)}, gts, 0.5),
            std::vector{L::FalsePositive});
}

TEST(MatchDetections, PrefersHighestIouFreeGroundTruth) {
  const std::vector<GroundTruthBox> gts = {gtbox({0, 0, 10, 10}), gtbox({1, 0, 10, 10})};
  // first det overlaps gt1 perfectly, second det then falls back to gt0
  const std::vector<Detection> dets = {det({1, 0, 10, 10}, 0.9), det({0, 0, 10, 10}, 0.8)};
  EXPECT_EQ(match_detections(dets, gts, 0.5), (std::vector{L::TruePositive, L::TruePositive}));
  EXPECT_EQ(match_detections(dets, gts, 0.95), (std::vector{L::TruePositive, L::TruePositive}));
}

TEST(MatchDetections, AgreesWithReferenceOnRandomScenes) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> pos(0, 40), len(5, 30), score(0, 1);
  for (int scene = 0; scene < 300; ++scene) {
    std::vector<Detection> dets;
    std::vector<GroundTruthBox> gts;
    const int nd = static_cast<int>(rng() % 7), ng = static_cast<int>(rng() % 6);
    for (int k = 0; k < ng; ++k) gts.push_back(gtbox({pos(rng), pos(rng), len(rng), len(rng)}));
    for (int k = 0; k < nd; ++k) {
      dets.push_back(det({pos(rng), pos(rng), len(rng), len(rng)}, score(rng)));
    }
    for (double t : iou_thresholds()) {
      const auto labels = match_detections(dets, gts, t);
      const auto ref = oracle::reference_match(dets, gts, t);
      ASSERT_EQ(labels.size(), ref.size());
      for (std::size_t i = 0; i < ref.size(); ++i) {
        EXPECT_EQ(labels[i] == L::TruePositive, ref[i]) << "scene " << scene << " t " << t;
      }
    }
  }
}

TEST(MatchDetections, TruePositivesNeverIncreaseWithThreshold) {
  synth::Rng rng(31);
  for (int k = 0; k < 50; ++k) {
    const auto scene = synth::random_layout_scene(rng, 1, 10);
    std::size_t prev = scene.dets.size() + 1;
    for (double t : iou_thresholds()) {
      const auto labels = match_detections(scene.dets, scene.gt.boxes, t);
      const auto tps = static_cast<std::size_t>(std::ranges::count(labels, L::TruePositive));
      EXPECT_LE(tps, prev);
      prev = tps;
    }
  }
}

TEST(AveragePrecision, Examples) {
  EXPECT_EQ(average_precision(std::vector{L::TruePositive}, 1), 1.0);
  EXPECT_EQ(average_precision(std::vector{L::FalsePositive}, 1), 0.0);
  EXPECT_EQ(average_precision(std::vector<L>{}, 3), 0.0);
  EXPECT_EQ(average_precision(std::vector{L::FalsePositive}, 0), 0.0);
  EXPECT_FALSE(average_precision(std::vector<L>{}, 0).has_value());

  const std::vector ranked = {L::TruePositive, L::FalsePositive, L::TruePositive};
  // recall 0..0.50 at precision 1, 0.51..1.00 at precision 2/3
  const double frozen = (51.0 + 50.0 * 2.0 / 3.0) / 101.0;
  const double oracle_value = oracle::interpolated_ap({true, false, true}, 2);
  EXPECT_NEAR(oracle_value, frozen, 1e-12);
  EXPECT_NEAR(*average_precision(ranked, 2), oracle_value, 1e-12);
}

TEST(AveragePrecision, AgreesWithInterpolationOracle) {
  std::mt19937_64 rng(77);
  for (int k = 0; k < 500; ++k) {
    const std::size_t n = rng() % 30;
    std::vector<L> labels;
    std::vector<bool> flags;
    std::size_t tps = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const bool tp = rng() % 2 == 0;
      tps += tp;
      labels.push_back(tp ? L::TruePositive : L::FalsePositive);
      flags.push_back(tp);
    }
    const std::size_t num_gt = tps + rng() % 5;
    if (num_gt == 0) continue;
    const double ap = *average_precision(labels, num_gt);
    EXPECT_NEAR(ap, oracle::interpolated_ap(flags, num_gt), 1e-12);
    EXPECT_GE(ap, 0.0);
    EXPECT_LE(ap, 1.0);
  }
}

TEST(MeanAp, ThresholdList) {
  const auto t = iou_thresholds();
  ASSERT_EQ(t.size(), 10u);
  EXPECT_EQ(t.front(), 0.5);
  EXPECT_EQ(t.back(), 0.95);
  for (std::size_t i = 1; i < t.size(); ++i) EXPECT_NEAR(t[i] - t[i - 1], 0.05, 1e-12);
}

TEST(MeanAp, PerfectPredictionsScoreOne) {
  synth::Rng rng(4);
  const auto scene = synth::random_layout_scene(rng, 20);
  std::vector<Detection> dets;
  for (const auto& g : scene.gt.boxes) dets.push_back({g.image_id, g.category_id, g.box, 1.0});
  const LayoutReport r = mean_ap(dets, scene.gt);
  EXPECT_EQ(r.overall_map, 1.0);
  for (const auto& ap : r.per_category_ap) EXPECT_EQ(ap.value_or(1.0), 1.0);
}

TEST(MeanAp, AgreesWithReferenceOnRandomScenes) {
  synth::Rng rng(55);
  for (int k = 0; k < 25; ++k) {
    const auto scene = synth::random_layout_scene(rng, 1 + k % 6);
    const LayoutReport r = mean_ap(scene.dets, scene.gt);
    EXPECT_NEAR(r.overall_map, oracle::reference_map(scene.dets, scene.gt.boxes), 1e-9);
  }
}

TEST(MeanAp, InvariantToInputOrderAndScale) {
  synth::Rng rng(56);
  const auto scene = synth::random_layout_scene(rng, 8);
  const double base = mean_ap(scene.dets, scene.gt).overall_map;

  auto shuffled = scene.dets;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  EXPECT_EQ(mean_ap(shuffled, scene.gt).overall_map, base);

  auto scaled = scene;
  for (auto& d : scaled.dets) d.box = {d.box.x * 2, d.box.y * 2, d.box.w * 2, d.box.h * 2};
  for (auto& g : scaled.gt.boxes) g.box = {g.box.x * 2, g.box.y * 2, g.box.w * 2, g.box.h * 2};
  EXPECT_EQ(mean_ap(scaled.dets, scaled.gt).overall_map, base);
}

TEST(MeanAp, CategoryWithoutGroundTruthButWithDetectionsScoresZero) {
  LayoutGroundTruth gt;
  gt.images["1"] = {};
  gt.boxes.push_back(gtbox({0, 0, 10, 10}, 1));
  const std::vector<Detection> dets = {det({0, 0, 10, 10}, 0.9, 1), det({50, 50, 5, 5}, 0.4, 3)};
  const LayoutReport r = mean_ap(dets, gt);
  EXPECT_EQ(r.per_category_ap[0], 1.0);
  EXPECT_EQ(r.per_category_ap[2], 0.0);
  EXPECT_FALSE(r.per_category_ap[1].has_value());
  EXPECT_EQ(r.overall_map, 0.5);
}

TEST(MeanAp, UnknownImagesAndEmptyGroundTruth) {
  LayoutGroundTruth gt;
  gt.images["1"] = {};
  EXPECT_THROW(mean_ap(std::vector<Detection>{}, gt), EmptyGroundTruth);
  gt.boxes.push_back(gtbox({0, 0, 10, 10}));
  const std::vector<Detection> dets = {det({0, 0, 10, 10}, 0.9), det({0, 0, 10, 10}, 0.9, 1, "9")};
  const LayoutReport r = mean_ap(dets, gt);
  EXPECT_EQ(r.overall_map, 1.0);
  EXPECT_EQ(r.num_detections, 1u);
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_THROW(mean_ap(dets, gt, LayoutOptions{true}), IdMismatch);
}

}  // namespace
}  // namespace parsebench
