#pragma once

// Tree-Edit-Distance-based Similarity for table recognition output.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "parsebench/errors.hpp"
#include "parsebench/parallel.hpp"
#include "parsebench/records.hpp"
#include "parsebench/table_model.hpp"
#include "parsebench/tree_edit.hpp"

namespace parsebench {

struct TedsOptions {
  StyleSet ignored_styles;      // final evaluation used {b}
  bool structure_only = false;  // ignore cell content entirely
};

// Insert/delete cost 1. Substitution: 1 on tag mismatch, 0 between equal
// non-td tags, and for two tds 1 if either span differs, otherwise the
// normalized Levenshtein distance of their contents.
struct TedsCost {
  bool structure_only = false;

  double insert_cost(const TreeNode&) const { return 1.0; }
  double delete_cost(const TreeNode&) const { return 1.0; }
  double substitute_cost(const TreeNode& a, const TreeNode& b) const {
    if (a.tag != b.tag) return 1.0;
    if (a.tag != NodeTag::Td) return 0.0;
    if (a.colspan != b.colspan || a.rowspan != b.rowspan) return 1.0;
    if (structure_only) return 0.0;
    return normalized_levenshtein(a.content, b.content);
  }
};

inline CostModel teds_cost_model(bool structure_only = false) {
  const TedsCost c{structure_only};
  return CostModel{
      [c](const TreeNode& n) { return c.insert_cost(n); },
      [c](const TreeNode& n) { return c.delete_cost(n); },
      [c](const TreeNode& a, const TreeNode& b) { return c.substitute_cost(a, b); }};
}

inline double teds(const TableTree& gt, const TableTree& pred,
                   const TedsOptions& opts = {}) {
  const TableTree a = strip_style(gt, opts.ignored_styles);
  const TableTree b = strip_style(pred, opts.ignored_styles);
  const double distance =
      tree_edit_distance(a, b, TedsCost{opts.structure_only});
  const double denom = static_cast<double>(std::max(a.size(), b.size()));
  return std::clamp(1.0 - distance / denom, 0.0, 1.0);
}

struct SampleScore {
  double score = 0.0;
  Complexity complexity = Complexity::Simple;
  std::optional<std::string> error;  // why the prediction scored 0
};

struct ClassSummary {
  std::size_t count = 0;
  std::optional<double> mean;  // empty when count == 0
};

struct TedsReport {
  std::map<std::string, SampleScore> per_sample;
  ClassSummary simple;
  ClassSummary complex;
  ClassSummary all;
  std::vector<std::string> warnings;
};

struct BatchOptions {
  std::size_t workers = 1;
  bool strict_ids = false;  // missing or extra prediction ids throw IdMismatch
};

// Scores every ground-truth sample. Missing or unparseable predictions score
// 0 and keep a diagnostic; extra prediction ids are reported as warnings.
// Complexity comes from the ground-truth tree. Means are summed in ascending
// id order, so the report does not depend on the worker count.
inline TedsReport batch_teds(const TableCorpus& gt, const TablePredictions& pred,
                             const TedsOptions& opts = {},
                             const BatchOptions& batch = {}) {
  if (gt.empty()) throw EmptyCorpus("ground-truth corpus is empty");

  TedsReport report;
  std::vector<std::string> missing;
  for (const auto& [id, html] : pred) {
    if (!gt.contains(id)) {
      report.warnings.push_back("prediction for unknown id '" + id + "' ignored");
    }
  }
  for (const auto& [id, rec] : gt) {
    if (!pred.contains(id)) missing.push_back(id);
  }
  if (batch.strict_ids && (!missing.empty() || !report.warnings.empty())) {
    std::string msg = std::to_string(missing.size()) + " missing and " +
                      std::to_string(report.warnings.size()) +
                      " unexpected prediction ids";
    if (!missing.empty()) msg += " (first missing: '" + missing.front() + "')";
    throw IdMismatch(msg);
  }

  std::vector<const TableRecord*> samples;
  samples.reserve(gt.size());
  for (const auto& [id, rec] : gt) samples.push_back(&rec);
  std::vector<SampleScore> scores(samples.size());

  parallel_for(samples.size(), batch.workers, [&](std::size_t i) {
    const TableRecord& rec = *samples[i];
    TableTree gt_tree;
    try {
      gt_tree = parse_table_html(rec.html);
    } catch (const MalformedHtml& e) {
      throw MalformedHtml("ground truth '" + rec.id + "': " + e.what());
    }
    SampleScore& out = scores[i];
    out.complexity = classify_complexity(gt_tree);
    const auto it = pred.find(rec.id);
    if (it == pred.end()) {
      out.error = "missing prediction";
      return;
    }
    try {
      out.score = teds(gt_tree, parse_table_html(it->second), opts);
    } catch (const MalformedHtml& e) {
      out.error = std::string("unparseable prediction: ") + e.what();
    }
  });

  double sum_all = 0.0, sum_simple = 0.0, sum_complex = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const SampleScore& s = scores[i];
    sum_all += s.score;
    ++report.all.count;
    if (s.complexity == Complexity::Simple) {
      sum_simple += s.score;
      ++report.simple.count;
    } else {
      sum_complex += s.score;
      ++report.complex.count;
    }
    report.per_sample.emplace(samples[i]->id, s);
  }
  auto mean = [](double sum, std::size_t n) -> std::optional<double> {
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
  };
  report.all.mean = mean(sum_all, report.all.count);
  report.simple.mean = mean(sum_simple, report.simple.count);
  report.complex.mean = mean(sum_complex, report.complex.count);
  return report;
}

}  // namespace parsebench
