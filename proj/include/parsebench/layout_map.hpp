#pragma once

// Layout detection scoring: box IoU, greedy confidence-ranked matching,
// 101-point interpolated average precision and mAP over IoU 0.50:0.95.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "parsebench/errors.hpp"

namespace parsebench {

inline constexpr int kNumCategories = 5;

// Category ids 1..5 in the column order of the leaderboard table.
inline constexpr std::array<std::string_view, kNumCategories> kCategoryNames = {
    "Text", "Title", "List", "Table", "Figure"};

inline bool valid_category(int id) { return id >= 1 && id <= kNumCategories; }

inline constexpr std::size_t kNumThresholds = 10;

// 0.50, 0.55, ..., 0.95, each the nearest double to its decimal value.
inline std::array<double, kNumThresholds> iou_thresholds() {
  std::array<double, kNumThresholds> out{};
  for (std::size_t i = 0; i < kNumThresholds; ++i) {
    out[i] = static_cast<double>(10 + i) / 20.0;
  }
  return out;
}

struct BoundingBox {
  double x = 0, y = 0, w = 0, h = 0;  // pixels, top-left origin

  double area() const { return w * h; }
};

struct Detection {
  std::string image_id;
  int category_id = 1;
  BoundingBox box;
  double score = 0.0;
};

struct GroundTruthBox {
  std::string image_id;
  std::string annotation_id;
  int category_id = 1;
  BoundingBox box;
};

struct ImageInfo {
  std::string file_name;
  double width = 0;
  double height = 0;
};

struct LayoutGroundTruth {
  std::map<std::string, ImageInfo> images;
  std::vector<GroundTruthBox> boxes;
};

inline double iou(const BoundingBox& a, const BoundingBox& b) {
  const double ix = std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x);
  const double iy = std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y);
  const double inter = (ix > 0 && iy > 0) ? ix * iy : 0.0;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0 || inter <= 0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

enum class MatchLabel : std::uint8_t { FalsePositive, TruePositive };

namespace detail {

// Detection indices sorted by descending score, ties in input order.
inline std::vector<std::size_t> rank_by_score(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });
  return order;
}

// Greedy matching on a precomputed IoU matrix (row = detection in `order`'s
// index space, column = ground truth). Labels are written per detection.
inline void greedy_match(std::span<const std::size_t> order,
                         std::span<const double> ious, std::size_t num_gt,
                         double threshold, std::span<MatchLabel> labels) {
  std::vector<bool> taken(num_gt, false);
  for (std::size_t d : order) {
    std::size_t best = num_gt;
    double best_iou = threshold;
    for (std::size_t g = 0; g < num_gt; ++g) {
      if (taken[g]) continue;
      const double v = ious[d * num_gt + g];
      if (v > 0 && v >= best_iou && (best == num_gt || v > best_iou)) {
        best = g;
        best_iou = v;
      }
    }
    if (best < num_gt) {
      taken[best] = true;
      labels[d] = MatchLabel::TruePositive;
    } else {
      labels[d] = MatchLabel::FalsePositive;
    }
  }
}

}  // namespace detail

// Labels each detection (in input order) as a true or false positive.
// Detections are processed by descending score, ties in input order; each
// takes the unmatched ground truth with the highest IoU >= threshold
// (lowest index on equal IoU).
inline std::vector<MatchLabel> match_detections(std::span<const Detection> dets,
                                                std::span<const GroundTruthBox> gts,
                                                double threshold) {
  std::vector<double> scores(dets.size());
  std::vector<double> ious(dets.size() * gts.size());
  for (std::size_t d = 0; d < dets.size(); ++d) {
    scores[d] = dets[d].score;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      ious[d * gts.size() + g] = iou(dets[d].box, gts[g].box);
    }
  }
  std::vector<MatchLabel> labels(dets.size(), MatchLabel::FalsePositive);
  detail::greedy_match(detail::rank_by_score(scores), ious, gts.size(), threshold,
                       labels);
  return labels;
}

// 101-point interpolated AP over labels already in rank order. Returns
// nullopt when there is nothing to evaluate (no ground truth and no
// detections); 0 when there is no ground truth but some detections.
inline std::optional<double> average_precision(std::span<const MatchLabel> ranked,
                                               std::size_t num_gt) {
  if (num_gt == 0) {
    if (ranked.empty()) return std::nullopt;
    return 0.0;
  }
  const std::size_t n = ranked.size();
  std::vector<std::size_t> tp_cum(n);
  std::vector<double> precision(n);
  std::size_t tp = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (ranked[k] == MatchLabel::TruePositive) ++tp;
    tp_cum[k] = tp;
    precision[k] = static_cast<double>(tp) / static_cast<double>(k + 1);
  }
  for (std::size_t k = n; k-- > 1;) {
    precision[k - 1] = std::max(precision[k - 1], precision[k]);
  }
  // Recall point r/100 is reached at the first rank with
  // tp_cum / num_gt >= r / 100, compared exactly in integers.
  double sum = 0.0;
  for (std::size_t r = 0; r <= 100; ++r) {
    const auto it = std::lower_bound(
        tp_cum.begin(), tp_cum.end(), r,
        [num_gt](std::size_t tps, std::size_t rr) { return tps * 100 < rr * num_gt; });
    if (it != tp_cum.end()) sum += precision[static_cast<std::size_t>(it - tp_cum.begin())];
  }
  return sum / 101.0;
}

struct LayoutReport {
  // AP per category averaged over thresholds; empty for a category with
  // neither ground truth nor detections.
  std::array<std::optional<double>, kNumCategories> per_category_ap{};
  double overall_map = 0.0;
  std::array<double, kNumThresholds> thresholds{};
  std::array<std::array<std::optional<double>, kNumCategories>, kNumThresholds>
      per_threshold_ap{};
  std::array<std::optional<double>, kNumThresholds> per_threshold_map{};
  std::size_t num_images = 0;
  std::size_t num_gt_boxes = 0;
  std::size_t num_detections = 0;
  std::vector<std::string> warnings;
};

struct LayoutOptions {
  bool strict_ids = false;  // detections on unknown images throw IdMismatch
};

namespace detail {

inline std::optional<double> mean_of(std::span<const std::optional<double>> xs) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& x : xs) {
    if (x) {
      sum += *x;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

}  // namespace detail

// Corpus-level mAP: for each threshold and category, detections from all
// images are ranked together after per-image matching. Per-category AP is
// the mean over thresholds; the overall score is the mean over categories.
inline LayoutReport mean_ap(std::span<const Detection> dets,
                            const LayoutGroundTruth& gt,
                            const LayoutOptions& opts = {}) {
  if (gt.boxes.empty()) throw EmptyGroundTruth("layout ground truth has no boxes");

  LayoutReport report;
  report.thresholds = iou_thresholds();
  report.num_images = gt.images.size();
  report.num_gt_boxes = gt.boxes.size();

  struct Group {
    std::vector<std::size_t> dets;  // indices into `dets`, input order
    std::vector<std::size_t> gts;
    std::vector<double> ious;
  };
  using Key = std::pair<int, std::string>;  // category, image
  std::map<Key, Group> groups;
  for (std::size_t g = 0; g < gt.boxes.size(); ++g) {
    const auto& b = gt.boxes[g];
    if (!valid_category(b.category_id)) {
      throw std::invalid_argument("ground-truth box with category " +
                                  std::to_string(b.category_id));
    }
    groups[{b.category_id, b.image_id}].gts.push_back(g);
  }
  std::size_t unknown = 0;
  for (std::size_t d = 0; d < dets.size(); ++d) {
    if (!valid_category(dets[d].category_id)) {
      throw std::invalid_argument("detection with category " +
                                  std::to_string(dets[d].category_id));
    }
    if (!gt.images.contains(dets[d].image_id)) {
      ++unknown;
      continue;
    }
    groups[{dets[d].category_id, dets[d].image_id}].dets.push_back(d);
  }
  if (unknown > 0) {
    const std::string msg = std::to_string(unknown) +
                            " detections reference images absent from the ground truth";
    if (opts.strict_ids) throw IdMismatch(msg);
    report.warnings.push_back(msg + "; ignored");
  }
  report.num_detections = dets.size() - unknown;

  std::array<std::size_t, kNumCategories> num_gt{};
  std::array<std::vector<std::size_t>, kNumCategories> ranked{};
  for (auto& [key, group] : groups) {
    const auto c = static_cast<std::size_t>(key.first - 1);
    num_gt[c] += group.gts.size();
    group.ious.resize(group.dets.size() * group.gts.size());
    for (std::size_t i = 0; i < group.dets.size(); ++i) {
      ranked[c].push_back(group.dets[i]);
      for (std::size_t j = 0; j < group.gts.size(); ++j) {
        group.ious[i * group.gts.size() + j] =
            iou(dets[group.dets[i]].box, gt.boxes[group.gts[j]].box);
      }
    }
  }
  for (auto& r : ranked) {
    std::ranges::sort(r);
    std::stable_sort(r.begin(), r.end(), [&](std::size_t a, std::size_t b) {
      return dets[a].score > dets[b].score;
    });
  }

  std::vector<MatchLabel> labels(dets.size(), MatchLabel::FalsePositive);
  std::vector<MatchLabel> ranked_labels;
  for (std::size_t t = 0; t < kNumThresholds; ++t) {
    for (auto& [key, group] : groups) {
      std::vector<double> scores(group.dets.size());
      for (std::size_t i = 0; i < group.dets.size(); ++i) {
        scores[i] = dets[group.dets[i]].score;
      }
      std::vector<MatchLabel> local(group.dets.size());
      detail::greedy_match(detail::rank_by_score(scores), group.ious,
                           group.gts.size(), report.thresholds[t], local);
      for (std::size_t i = 0; i < group.dets.size(); ++i) {
        labels[group.dets[i]] = local[i];
      }
    }
    for (std::size_t c = 0; c < kNumCategories; ++c) {
      ranked_labels.clear();
      for (std::size_t d : ranked[c]) ranked_labels.push_back(labels[d]);
      report.per_threshold_ap[t][c] = average_precision(ranked_labels, num_gt[c]);
    }
    report.per_threshold_map[t] = detail::mean_of(report.per_threshold_ap[t]);
  }

  for (std::size_t c = 0; c < kNumCategories; ++c) {
    std::array<std::optional<double>, kNumThresholds> column{};
    for (std::size_t t = 0; t < kNumThresholds; ++t) {
      column[t] = report.per_threshold_ap[t][c];
    }
    report.per_category_ap[c] = detail::mean_of(column);
  }
  report.overall_map = detail::mean_of(report.per_category_ap).value_or(0.0);
  return report;
}

}  // namespace parsebench
